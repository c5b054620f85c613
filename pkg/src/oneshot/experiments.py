"""Seeded experiments with JSON-lines reports.

Every trial derives its own seed from (master seed, experiment name, trial
index), so reports are byte-identical for the same config and independent of
the worker count.
"""

from __future__ import annotations

import json
import math
import statistics
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

from scipy.stats import chisquare

from .battery import suite_battery
from .cpf import (
    FoldingCPF,
    claw_index_counts,
    collision_search_birthday,
    cpf_battery,
    simulate_bloated_from_dualfree,
    simulate_dualfree_suite,
)
from .gf2 import BitVec, Subspace
from .lazy_random import DeterministicRng, derive_seed
from .oracle_suite import OracleSuite, Params, toy_params
from .oss import code_for, sign, siggen, verify
from .subspace_lab import sample_superspace, trivial_intersection_probability

EXPERIMENTS = (
    "birthday_scaling",
    "sign_rounds",
    "reduction_equivalence",
    "superspace_uniformity",
    "intersection_bound",
    "cpf_exhaustive",
)


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    name: str
    trials: int
    seed: bytes
    params: Params = field(default_factory=toy_params)
    workers: int = 1

    def __post_init__(self):
        if self.name not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.name!r}; choose from {', '.join(EXPERIMENTS)}")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if len(self.seed) != 32:
            raise ConfigError("seed must be 32 bytes")

    def echo(self) -> dict:
        return {"name": self.name, "trials": self.trials, "seed": self.seed.hex(), "params": self.params.to_json()}


@dataclass
class Report:
    config: dict
    trials: list[dict]
    summary: dict
    tolerance: dict
    passed: bool

    def lines(self) -> list[str]:
        out = [dumps({"type": "config", **self.config})]
        out += [dumps({"type": "trial", **t}) for t in self.trials]
        out.append(dumps({"type": "summary", "summary": self.summary, "tolerance": self.tolerance, "passed": self.passed}))
        return out

    def text(self) -> str:
        return "\n".join(self.lines()) + "\n"


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _rng(seed: bytes, *labels) -> DeterministicRng:
    return DeterministicRng(derive_seed(seed, *labels), "/".join(map(str, labels)))


def _map(fn: Callable, args: list, workers: int) -> list:
    if workers <= 1:
        return [fn(*a) for a in args]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, *zip(*args)))


def _stats(xs: list[float]) -> dict:
    if not xs:
        return {"mean": None, "median": None, "stderr": None}
    sd = statistics.stdev(xs) if len(xs) > 1 else 0.0
    return {"mean": statistics.fmean(xs), "median": statistics.median(xs), "stderr": sd / math.sqrt(len(xs))}


# ---------------------------------------------------------------------------
# birthday scaling

BIRTHDAY_RS = (8, 10, 12)
BIRTHDAY_EXTRA_BITS = 4


def _birthday_trial(seed: bytes, r: int, i: int) -> dict:
    n = r + BIRTHDAY_EXTRA_BITS
    suite = OracleSuite(Params(lam=0, s=0, r=r, n=n, k=n - r, ell_code=0, msg_len=0), derive_seed(seed, "birthday", r, i))
    res = collision_search_birthday(suite.h_int, n, _rng(seed, "birthday-search", r, i))
    return {"r": r, "trial": i, "queries": res.queries, "found": res.collision is not None}


def birthday_scaling(cfg: ExperimentConfig) -> Report:
    args = [(cfg.seed, r, i) for r in BIRTHDAY_RS for i in range(cfg.trials)]
    rows = _map(_birthday_trial, args, cfg.workers)
    medians = {}
    for r in BIRTHDAY_RS:
        medians[r] = statistics.median(row["queries"] for row in rows if row["r"] == r)
    ratios = [medians[b] / medians[a] for a, b in zip(BIRTHDAY_RS, BIRTHDAY_RS[1:])]
    normalized = {r: medians[r] / math.sqrt(2**r) for r in BIRTHDAY_RS}
    tol = {"ratio": [1.4, 2.9], "normalized_median": [0.5, 4.0]}
    ok = all(1.4 <= q <= 2.9 for q in ratios) and all(0.5 <= v <= 4.0 for v in normalized.values())
    summary = {
        "medians": {str(r): v for r, v in medians.items()},
        "ratios": ratios,
        "normalized_medians": {str(r): v for r, v in normalized.items()},
        "per_r": {str(r): _stats([row["queries"] for row in rows if row["r"] == r]) for r in BIRTHDAY_RS},
    }
    return Report(cfg.echo(), rows, summary, tol, ok)


# ---------------------------------------------------------------------------
# signing dynamics

ROUND_BANDS = ([0.45, 0.55], [0.20, 0.30], [0.08, 0.17])
MIN_SUCCESS = 0.85


def sign_trial(params: Params, seed: bytes, i: int) -> dict:
    tseed = derive_seed(seed, "sign", i)
    suite = OracleSuite(params, tseed)
    code = code_for(params, tseed)
    rng = _rng(tseed, "signer")
    kp = siggen(suite, rng)
    msg = BitVec(params.msg_len, rng.randbits(params.msg_len))
    sig, tr = sign(suite, kp, msg, code, rng)
    return {
        "trial": i,
        "mismatch": [rec.mismatch_count for rec in tr.rounds],
        "final_mismatch": tr.final_mismatch,
        "success": tr.success,
        "verified": verify(suite, kp.pk, msg, sig.sigma, code),
        "in_fiber": suite.p_inverse(kp.pk, sig.sigma) is not None,
    }


def sign_rounds(cfg: ExperimentConfig) -> Report:
    p = cfg.params
    rows = _map(sign_trial, [(p, cfg.seed, i) for i in range(cfg.trials)], cfg.workers)
    ell = p.ell_code
    fracs = [statistics.fmean(row["mismatch"][t] / ell for row in rows) for t in range(p.rounds)]
    success = statistics.fmean(1.0 if row["verified"] else 0.0 for row in rows)
    in_fiber = all(row["in_fiber"] for row in rows)
    ok = success >= MIN_SUCCESS and in_fiber
    for t, band in enumerate(ROUND_BANDS[: p.rounds]):
        ok = ok and band[0] <= fracs[t] <= band[1]
    summary = {
        "mismatch_fraction_by_round": fracs,
        "predicted": [2.0 ** -(t + 1) for t in range(p.rounds)],
        "success_rate": success,
        "all_sigmas_in_fiber": in_fiber,
        "final_mismatch": _stats([row["final_mismatch"] for row in rows]),
    }
    tol = {"round_bands": [list(b) for b in ROUND_BANDS[: p.rounds]], "min_success": MIN_SUCCESS}
    return Report(cfg.echo(), rows, summary, tol, ok)


# ---------------------------------------------------------------------------
# reduction equivalence

DUALFREE_SHAPE = {"n": 12, "r": 8, "k": 8}
BLOATED_SHAPE = {"n": 10, "r": 4, "k": 10, "s": 2, "ell": 2, "inner_n": 6, "inner_k": 6}
TRANSPORTS_PER_TRIAL = 250


def _fibers(suite) -> dict[int, list[int]]:
    out: dict[int, list[int]] = {}
    for x in range(1 << suite.n):
        out.setdefault(suite.p_forward(BitVec(suite.n, x)).y.v, []).append(x)
    return out


def _reduction_trial(seed: bytes, i: int) -> dict:
    tseed = derive_seed(seed, "reduction", i)
    rng = _rng(tseed, "setup")
    d = DUALFREE_SHAPE
    cpf = FoldingCPF(d["n"], d["r"], derive_seed(tseed, "cpf"))
    df = simulate_dualfree_suite(cpf, d["k"], rng)
    withheld_before = cpf.instances[df.i_star].trapdoor_calls
    df_report = suite_battery(df)
    withheld_clean = cpf.instances[df.i_star].trapdoor_calls == withheld_before

    b = BLOATED_SHAPE
    inner_cpf = FoldingCPF(b["inner_n"], b["r"], derive_seed(tseed, "inner-cpf"))
    inner = simulate_dualfree_suite(inner_cpf, b["inner_k"], rng)
    outer = simulate_bloated_from_dualfree(inner, b["n"], b["r"], b["k"], b["s"], b["ell"], rng)
    outer_report = suite_battery(outer)

    # dual-free transport: same simulated H  =>  distinct colliding inputs of Q
    pick = _rng(tseed, "collisions")
    fib = _fibers(df)
    ys = sorted(fib)
    df_ok = 0
    for _ in range(TRANSPORTS_PER_TRIAL):
        xs = fib[ys[pick.randbelow(len(ys))]]
        a = pick.randbelow(len(xs))
        c = (a + 1 + pick.randbelow(len(xs) - 1)) % len(xs)
        w0, w1 = df.transport(xs[a], xs[c])
        if w0 != w1 and cpf.forward_int(w0)[0] == cpf.forward_int(w1)[0]:
            df_ok += 1

    # bloated transport: strong outer collisions  =>  inner collisions
    ofib = _fibers(outer)
    oys = sorted(ofib)
    strong_ok = strong_total = 0
    attempts = 0
    while strong_total < TRANSPORTS_PER_TRIAL and attempts < 50 * TRANSPORTS_PER_TRIAL:
        attempts += 1
        xs = ofib[oys[pick.randbelow(len(oys))]]
        a = pick.randbelow(len(xs))
        c = (a + 1 + pick.randbelow(len(xs) - 1)) % len(xs)
        x0, x1 = BitVec(outer.n, xs[a]), BitVec(outer.n, xs[c])
        o0, o1 = outer.p_forward(x0), outer.p_forward(x1)
        if not outer.is_strong_collision(o0.y, o0.u, o1.u):
            continue
        strong_total += 1
        xb0, xb1 = outer.transport(x0, x1)
        if xb0 != xb1 and inner.p_forward(xb0).y == inner.p_forward(xb1).y == o0.y:
            strong_ok += 1

    return {
        "trial": i,
        "dualfree_battery": df_report.to_json(),
        "withheld_trapdoor_untouched": withheld_clean,
        "bloated_battery": outer_report.to_json(),
        "dualfree_transports": [df_ok, TRANSPORTS_PER_TRIAL],
        "strong_transports": [strong_ok, strong_total],
    }


def reduction_equivalence(cfg: ExperimentConfig) -> Report:
    rows = _map(_reduction_trial, [(cfg.seed, i) for i in range(cfg.trials)], cfg.workers)
    ok = all(
        row["dualfree_battery"]["passed"]
        and row["bloated_battery"]["passed"]
        and row["withheld_trapdoor_untouched"]
        and row["dualfree_transports"][0] == row["dualfree_transports"][1]
        and row["strong_transports"][0] == row["strong_transports"][1]
        for row in rows
    )
    summary = {
        "dualfree_transports": sum(row["dualfree_transports"][1] for row in rows),
        "strong_transports": sum(row["strong_transports"][1] for row in rows),
        "batteries_passed": sum(row["dualfree_battery"]["passed"] + row["bloated_battery"]["passed"] for row in rows),
    }
    tol = {"all_invariants": True, "transport_failures": 0}
    return Report(cfg.echo(), rows, summary, tol, ok)


# ---------------------------------------------------------------------------
# superspace uniformity

SUPERSPACE_SHAPE = (4, 1, 1)  # k, r, s
CHI_P_MIN = 0.001


def enumerate_superspaces(base: Subspace, s: int) -> list[Subspace]:
    """Every superspace of the given dimension, by brute force over generator sets."""
    k = base.ambient
    found = {base}
    for _ in range(s):
        nxt = set()
        for sub in found:
            for v in range(1 << k):
                if not sub.contains(v):
                    nxt.add(Subspace(k, sub.basis + (v,)))
        found = nxt
    return sorted(found, key=lambda sp: sp.basis)


def superspace_uniformity(cfg: ExperimentConfig) -> Report:
    k, r, s = SUPERSPACE_SHAPE
    base = Subspace(k, [1 << i for i in range(r)])
    classes = enumerate_superspaces(base, s)
    index = {sp: j for j, sp in enumerate(classes)}
    rng = _rng(cfg.seed, "superspace")
    rows = []
    counts = Counter()
    for i in range(cfg.trials):
        j = index[sample_superspace(base, s, rng)]
        counts[j] += 1
        rows.append({"trial": i, "class": j})
    observed = [counts[j] for j in range(len(classes))]
    stat, p = chisquare(observed)
    summary = {"classes": len(classes), "observed": observed, "chi2": float(stat), "p_value": float(p)}
    return Report(cfg.echo(), rows, summary, {"p_min": CHI_P_MIN}, bool(p > CHI_P_MIN))


# ---------------------------------------------------------------------------
# intersection bound

INTERSECTION_SHAPE = (12, 2, 6, 4)  # k, r, s, t


def intersection_bound(cfg: ExperimentConfig) -> Report:
    k, r, s, t = INTERSECTION_SHAPE
    est = trivial_intersection_probability(k, r, s, t, cfg.trials, _rng(cfg.seed, "intersection"))
    summary = {"estimate": est.estimate, "stderr": est.stderr, "bound": est.bound, "hits": est.hits}
    tol = {"rule": "estimate >= bound - 3 stderr"}
    rows = [{"trial": 0, "hits": est.hits, "trials": est.trials}]
    return Report(cfg.echo(), rows, summary, tol, est.satisfies_bound(3.0))


# ---------------------------------------------------------------------------
# CPF battery

CPF_SHAPE = (12, 8)
CLAW_COLLISIONS = 2000


def _cpf_trial(seed: bytes, i: int, n: int, r: int) -> dict:
    cpf = FoldingCPF(n, r, derive_seed(seed, "cpf", i))
    rep = cpf_battery(cpf)
    counts = claw_index_counts(cpf, _rng(seed, "claws", i), CLAW_COLLISIONS)
    total = sum(counts)
    share = 1 / cpf.m
    sigma = math.sqrt(share * (1 - share) / total)
    uniform = all(abs(c / total - share) <= 3 * sigma for c in counts)
    return {"trial": i, "battery": rep.to_json(), "claw_counts": counts, "claw_uniform": uniform}


def cpf_exhaustive(cfg: ExperimentConfig, n: Optional[int] = None, r: Optional[int] = None) -> Report:
    n = n or CPF_SHAPE[0]
    r = r or CPF_SHAPE[1]
    rows = _map(_cpf_trial, [(cfg.seed, i, n, r) for i in range(cfg.trials)], cfg.workers)
    ok = all(row["battery"]["passed"] and row["claw_uniform"] for row in rows)
    summary = {"n": n, "r": r, "instances_checked": len(rows)}
    return Report(cfg.echo(), rows, summary, {"all_checks": True, "claw_share": "1/(n-r) +- 3 sigma"}, ok)


RUNNERS: dict[str, Callable[[ExperimentConfig], Report]] = {
    "birthday_scaling": birthday_scaling,
    "sign_rounds": sign_rounds,
    "reduction_equivalence": reduction_equivalence,
    "superspace_uniformity": superspace_uniformity,
    "intersection_bound": intersection_bound,
    "cpf_exhaustive": cpf_exhaustive,
}


def run_experiment(cfg: ExperimentConfig) -> Report:
    return RUNNERS[cfg.name](cfg)


# trial counts for the quick end-to-end self test
SELFTEST_TRIALS = {
    "birthday_scaling": 60,
    "sign_rounds": 200,
    "reduction_equivalence": 1,
    "superspace_uniformity": 700,
    "intersection_bound": 1000,
    "cpf_exhaustive": 1,
}


def selftest_all(seed: bytes) -> tuple[list[str], bool]:
    lines = []
    ok = True
    for name in EXPERIMENTS:
        rep = run_experiment(ExperimentConfig(name, SELFTEST_TRIALS[name], derive_seed(seed, "selftest", name)))
        lines.append(dumps({"experiment": name, "summary": rep.summary, "passed": rep.passed}))
        ok = ok and rep.passed
    lines.append(dumps({"selftest": "all", "passed": ok}))
    return lines, ok
