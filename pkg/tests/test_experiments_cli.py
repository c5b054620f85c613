import json

import pytest

from oneshot.cli import main
from oneshot.experiments import ConfigError, ExperimentConfig, run_experiment

SEED_HEX = "5e" * 32
SEED = bytes.fromhex(SEED_HEX)


def test_trials_zero_is_rejected():
    with pytest.raises(ConfigError):
        ExperimentConfig("sign_rounds", 0, SEED)
    assert main(["experiment", "run", "--name", "sign_rounds", "--trials", "0", "--seed", SEED_HEX]) == 2


def test_unknown_experiment_is_usage_error():
    assert main(["experiment", "run", "--name", "nope", "--trials", "3", "--seed", SEED_HEX]) == 2


def test_bad_seed_is_usage_error():
    assert main(["selftest", "all", "--seed", "xyz"]) == 2


def test_report_bytes_are_reproducible():
    a = run_experiment(ExperimentConfig("sign_rounds", 30, SEED)).text()
    b = run_experiment(ExperimentConfig("sign_rounds", 30, SEED)).text()
    assert a == b
    lines = [json.loads(x) for x in a.splitlines()]
    assert lines[0]["type"] == "config" and lines[0]["trials"] == 30
    assert [x["type"] for x in lines[1:-1]] == ["trial"] * 30
    assert set(lines[-1]["summary"]["final_mismatch"]) == {"mean", "median", "stderr"}
    assert "round_bands" in lines[-1]["tolerance"]


def test_worker_pool_does_not_change_output():
    one = run_experiment(ExperimentConfig("birthday_scaling", 6, SEED, workers=1)).text()
    two = run_experiment(ExperimentConfig("birthday_scaling", 6, SEED, workers=2)).text()
    assert one == two


def test_experiment_writes_out_file(tmp_path):
    out = tmp_path / "r.jsonl"
    code = main(["experiment", "run", "--name", "superspace_uniformity", "--trials", "700", "--seed", SEED_HEX, "--out", str(out)])
    assert code == 0
    last = json.loads(out.read_text().splitlines()[-1])
    assert last["passed"] is True and last["summary"]["classes"] == 7


def test_oss_cli_lifecycle(tmp_path, capsys):
    key = tmp_path / "k.json"
    assert main(["oss", "keygen", "--seed", SEED_HEX, "--out", str(key)]) == 0
    code = main(["oss", "sign", "--key", str(key), "--msg", "a0"])
    sig = json.loads(capsys.readouterr().out)
    assert code == (0 if sig["success"] else 1)
    # key is burnt on disk
    assert json.loads(key.read_text())["spent"] is True
    assert main(["oss", "sign", "--key", str(key), "--msg", "a0"]) == 1
    capsys.readouterr()
    v = main(["oss", "verify", "--pk", sig["pk"], "--msg", "a0", "--sig", sig["sig"], "--seed", SEED_HEX])
    assert v == (0 if sig["success"] else 1)
    assert main(["oss", "verify", "--pk", sig["pk"], "--msg", "a0", "--sig", "00", "--seed", SEED_HEX]) == 2


def test_oracle_query_script(tmp_path, capsys):
    script = tmp_path / "q.txt"
    script.write_text("# transcript\nP 0000a0\n")
    assert main(["oracle", "query", "--seed", SEED_HEX, "--script", str(script)]) == 0
    first = json.loads(capsys.readouterr().out)
    script.write_text(f"P 0000a0\nPinv {first['y']} {first['u']}\nD {first['y']} 0000\n")
    assert main(["oracle", "query", "--seed", SEED_HEX, "--script", str(script)]) == 0
    lines = [json.loads(x) for x in capsys.readouterr().out.splitlines()]
    assert lines[0] == first
    assert lines[1]["x"] == "0000a0"
    assert lines[2]["c"] == "0000"  # 12 zero bits
    script.write_text("Q 00\n")
    assert main(["oracle", "query", "--seed", SEED_HEX, "--script", str(script)]) == 2


def test_cpf_selftest_cli(capsys):
    assert main(["cpf", "selftest", "--n", "8", "--r", "4", "--seed", SEED_HEX]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["passed"] and rep["checks"]["withheld_trapdoor_untouched"]
    assert main(["cpf", "selftest", "--n", "10", "--r", "7", "--seed", SEED_HEX]) == 2


def test_lab_commands(capsys):
    assert main(["lab", "superspace", "--trials", "5", "--seed", SEED_HEX]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 5
    assert main(["lab", "intersect", "--trials", "300", "--seed", SEED_HEX]) == 0
    assert json.loads(capsys.readouterr().out)["trials"] == 300
    assert main(["lab", "anticoncentration", "--k", "6", "--r", "1", "--s", "2", "--eps", "1", "--seed", SEED_HEX]) == 0
    last = json.loads(capsys.readouterr().out.splitlines()[-1])
    assert last["summary"]["ell"] == 6 * 4
