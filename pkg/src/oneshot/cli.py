"""Command-line entry point: ``oneshot <group> <command> ...``.

Exit codes: 0 success / pass, 1 failed check or experiment, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .coset_state import SymbolicCosetState
from .cpf import FoldingCPF, ReductionParamError, cpf_battery
from .experiments import EXPERIMENTS, ConfigError, ExperimentConfig, dumps, run_experiment, selftest_all
from .gf2 import BitVec, DimensionError, Subspace
from .lazy_random import DeterministicRng, derive_seed, parse_seed
from .oracle_suite import OracleSuite, ParamError, Params, toy_params
from .oss import KeyPair, code_for, sign, siggen, verify
from .subspace_lab import anticoncentration_reduction, random_subspace, sample_superspace, trivial_intersection_probability

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _seed(text: Optional[str]) -> bytes:
    try:
        return parse_seed(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _params(path: Optional[str]) -> Params:
    if path is None:
        return toy_params()
    try:
        with open(path) as fh:
            return Params.from_json(json.load(fh))
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read params from {path}: {exc}") from exc


def _hex(text: str, n: int, what: str) -> BitVec:
    try:
        return BitVec.from_hex(text, n)
    except ValueError as exc:
        raise UsageError(f"{what}: {exc}") from exc


def _emit(lines: Sequence[str], out: Optional[str] = None) -> None:
    text = "".join(line + "\n" for line in lines)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# oss


def cmd_keygen(args) -> int:
    params = _params(args.params)
    seed = _seed(args.seed)
    suite = OracleSuite(params, seed)
    kp = siggen(suite, DeterministicRng(derive_seed(seed, "KEYGEN"), "KEYGEN"))
    key = {"params": params.to_json(), "seed": seed.hex(), "pk": kp.pk.to_hex(), "sk": kp.sk.to_json(), "spent": False}
    _emit([json.dumps(key, sort_keys=True, indent=1)], args.out)
    return EXIT_OK


def cmd_sign(args) -> int:
    try:
        with open(args.key) as fh:
            key = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read key: {exc}") from exc
    if key.get("spent") or key.get("sk") is None:
        print("error: key already used", file=sys.stderr)
        return EXIT_FAIL
    params = Params.from_json(key["params"])
    seed = parse_seed(key["seed"])
    suite = OracleSuite(params, seed)
    pk = BitVec.from_hex(key["pk"], params.r)
    kp = KeyPair(pk, SymbolicCosetState.from_json(key["sk"]))
    msg = _hex(args.msg, params.msg_len, "--msg")
    rng = DeterministicRng(derive_seed(seed, "SIGN", pk.v), "SIGN")
    sig, tr = sign(suite, kp, msg, code_for(params, seed), rng)
    # burn the key on disk as well
    key["spent"], key["sk"] = True, None
    with open(args.key, "w") as fh:
        json.dump(key, fh, sort_keys=True, indent=1)
    _emit([dumps({"pk": pk.to_hex(), "msg": msg.to_hex(), "sig": sig.sigma.to_hex(), "success": tr.success})], args.out)
    return EXIT_OK if tr.success else EXIT_FAIL


def cmd_verify(args) -> int:
    params = _params(args.params)
    seed = _seed(args.seed)
    suite = OracleSuite(params, seed)
    pk = _hex(args.pk, params.r, "--pk")
    msg = _hex(args.msg, params.msg_len, "--msg")
    sigma = _hex(args.sig, params.k, "--sig")
    ok = verify(suite, pk, msg, sigma, code_for(params, seed))
    print(dumps({"valid": ok}))
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# oracle


def cmd_oracle_query(args) -> int:
    if args.suite:
        try:
            with open(args.suite) as fh:
                obj = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read suite: {exc}") from exc
        params = Params.from_json(obj)
        seed = _seed(obj.get("seed", args.seed))
    else:
        params, seed = _params(args.params), _seed(args.seed)
    suite = OracleSuite(params, seed)
    src = open(args.script) if args.script else sys.stdin
    out = []
    for lineno, raw in enumerate(src, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        op, *rest = line.split()
        try:
            if op == "P" and len(rest) == 1:
                res = suite.p_forward(BitVec.from_hex(rest[0], params.n))
                reply = {"y": res.y.to_hex(), "u": res.u.to_hex()}
            elif op == "Pinv" and len(rest) == 2:
                x = suite.p_inverse(BitVec.from_hex(rest[0], params.r), BitVec.from_hex(rest[1], params.k))
                reply = {"x": None if x is None else x.to_hex()}
            elif op == "D" and len(rest) == 2:
                c = suite.d_oracle(BitVec.from_hex(rest[0], params.r), BitVec.from_hex(rest[1], params.k))
                reply = {"c": None if c is None else c.to_hex()}
            else:
                raise UsageError(f"line {lineno}: cannot parse {line!r}")
        except (ValueError, DimensionError) as exc:
            raise UsageError(f"line {lineno}: {exc}") from exc
        out.append(dumps({"query": line, **reply}))
    if src is not sys.stdin:
        src.close()
    _emit(out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# cpf


def cmd_cpf_selftest(args) -> int:
    if not 0 <= args.r < args.n <= 16:
        raise UsageError("need 0 <= r < n <= 16")
    cpf = FoldingCPF(args.n, args.r, _seed(args.seed))
    rep = cpf_battery(cpf)
    print(json.dumps({"n": args.n, "r": args.r, **rep.to_json()}, sort_keys=True))
    return EXIT_OK if rep.passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# lab


def cmd_lab_superspace(args) -> int:
    rng = DeterministicRng(derive_seed(_seed(args.seed), "LAB-SUPER"), "LAB-SUPER")
    base = Subspace(args.k, [1 << i for i in range(args.r)])
    lines = []
    for i in range(args.trials):
        T = sample_superspace(base, args.s, rng)
        lines.append(dumps({"trial": i, "basis": [BitVec(args.k, b).to_hex() for b in T.basis]}))
    _emit(lines, args.out)
    return EXIT_OK


def cmd_lab_intersect(args) -> int:
    rng = DeterministicRng(derive_seed(_seed(args.seed), "LAB-INTERSECT"), "LAB-INTERSECT")
    est = trivial_intersection_probability(args.k, args.r, args.s, args.t, args.trials, rng)
    line = dumps({"estimate": est.estimate, "stderr": est.stderr, "bound": est.bound, "hits": est.hits, "trials": est.trials,
                  "satisfies_bound": est.satisfies_bound()})
    _emit([line], args.out)
    return EXIT_OK if est.satisfies_bound() else EXIT_FAIL


def _random_adversary(k):
    return lambda oracle, rng: rng.randbits(k)


def _peeking_adversary(k):
    # reads the hidden subspace directly; an upper reference for the bookkeeping
    def adv(oracle, rng):
        return oracle.subspace.dual().random_element(rng)
    return adv


ADVERSARIES = {"random": _random_adversary, "peek": _peeking_adversary}


def cmd_lab_anticoncentration(args) -> int:
    rng = DeterministicRng(derive_seed(_seed(args.seed), "LAB-AC"), "LAB-AC")
    S = random_subspace(args.k, args.r, rng)
    run = anticoncentration_reduction(ADVERSARIES[args.adversary](args.k), args.k, args.r, args.s, args.eps, rng, S=S, mode=args.mode)
    lines = [
        dumps({"index": e.index, "bucket": e.bucket, "output": BitVec(args.k, e.output).to_hex(), "in_S_dual": e.in_S_dual,
               "in_T_dual_nonzero": e.in_T_dual_nonzero, "bucket_success": e.bucket_success})
        for e in run.executions
    ]
    lines.append(dumps({"summary": run.summary()}))
    _emit(lines, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# experiments


def cmd_experiment_run(args) -> int:
    params = _params(args.params)
    try:
        cfg = ExperimentConfig(args.name, args.trials, _seed(args.seed), params, args.workers)
    except ConfigError as exc:
        raise UsageError(str(exc)) from exc
    rep = run_experiment(cfg)
    _emit(rep.lines(), args.out)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_selftest_all(args) -> int:
    lines, ok = selftest_all(_seed(args.seed))
    _emit(lines, args.out)
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="oneshot", description="One-shot signature toolkit over lazily sampled GF(2) oracles.")
    groups = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def seed_opt(sp):
        sp.add_argument("--seed", help="64 hex chars; defaults to $ONESHOT_SEED")

    oss = groups.add_parser("oss").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    kg = oss.add_parser("keygen")
    kg.add_argument("--params")
    seed_opt(kg)
    kg.add_argument("--out")
    kg.set_defaults(func=cmd_keygen)
    sg = oss.add_parser("sign")
    sg.add_argument("--key", required=True)
    sg.add_argument("--msg", required=True)
    sg.add_argument("--out")
    sg.set_defaults(func=cmd_sign)
    vf = oss.add_parser("verify")
    vf.add_argument("--pk", required=True)
    vf.add_argument("--msg", required=True)
    vf.add_argument("--sig", required=True)
    vf.add_argument("--params")
    seed_opt(vf)
    vf.set_defaults(func=cmd_verify)

    oq = groups.add_parser("oracle").add_subparsers(dest="cmd", required=True, parser_class=_Parser).add_parser("query")
    oq.add_argument("--suite", help="JSON with params and seed")
    oq.add_argument("--params")
    seed_opt(oq)
    oq.add_argument("--script", help="query file; stdin if omitted")
    oq.set_defaults(func=cmd_oracle_query)

    cs = groups.add_parser("cpf").add_subparsers(dest="cmd", required=True, parser_class=_Parser).add_parser("selftest")
    cs.add_argument("--n", type=int, default=12)
    cs.add_argument("--r", type=int, default=8)
    seed_opt(cs)
    cs.set_defaults(func=cmd_cpf_selftest)

    lab = groups.add_parser("lab").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    ss = lab.add_parser("superspace")
    for name, default in (("k", 4), ("r", 1), ("s", 1), ("trials", 100)):
        ss.add_argument(f"--{name}", type=int, default=default)
    seed_opt(ss)
    ss.add_argument("--out")
    ss.set_defaults(func=cmd_lab_superspace)
    it = lab.add_parser("intersect")
    for name, default in (("k", 12), ("r", 2), ("s", 6), ("t", 4), ("trials", 10000)):
        it.add_argument(f"--{name}", type=int, default=default)
    seed_opt(it)
    it.add_argument("--out")
    it.set_defaults(func=cmd_lab_intersect)
    ac = lab.add_parser("anticoncentration")
    for name, default in (("k", 8), ("r", 2), ("s", 3)):
        ac.add_argument(f"--{name}", type=int, default=default)
    ac.add_argument("--eps", type=float, default=0.5)
    ac.add_argument("--mode", choices=("iid", "shared"), default="iid")
    ac.add_argument("--adversary", choices=sorted(ADVERSARIES), default="peek")
    seed_opt(ac)
    ac.add_argument("--out")
    ac.set_defaults(func=cmd_lab_anticoncentration)

    ex = groups.add_parser("experiment").add_subparsers(dest="cmd", required=True, parser_class=_Parser).add_parser("run")
    ex.add_argument("--name", required=True, choices=EXPERIMENTS)
    ex.add_argument("--trials", type=int, required=True)
    seed_opt(ex)
    ex.add_argument("--params")
    ex.add_argument("--workers", type=int, default=1)
    ex.add_argument("--out")
    ex.set_defaults(func=cmd_experiment_run)

    st = groups.add_parser("selftest").add_subparsers(dest="cmd", required=True, parser_class=_Parser).add_parser("all")
    seed_opt(st)
    st.add_argument("--out")
    st.set_defaults(func=cmd_selftest_all)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except (UsageError, ParamError, DimensionError, ReductionParamError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
