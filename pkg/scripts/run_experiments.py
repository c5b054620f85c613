#!/usr/bin/env python3
"""Run every experiment at full trial counts and write one JSON-lines report each.

    python3 scripts/run_experiments.py --seed <64 hex> --out reports/
"""

import argparse
import pathlib
import sys
import time

from oneshot.experiments import EXPERIMENTS, ExperimentConfig, run_experiment
from oneshot.lazy_random import derive_seed, parse_seed

FULL_TRIALS = {
    "birthday_scaling": 200,
    "sign_rounds": 2000,
    "reduction_equivalence": 2,
    "superspace_uniformity": 7000,
    "intersection_bound": 10_000,
    "cpf_exhaustive": 3,
}


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", default=None)
    ap.add_argument("--out", default="reports")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--only", nargs="*", choices=EXPERIMENTS)
    args = ap.parse_args()
    seed = parse_seed(args.seed)
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ok = True
    for name in args.only or EXPERIMENTS:
        t0 = time.perf_counter()
        cfg = ExperimentConfig(name, FULL_TRIALS[name], derive_seed(seed, name), workers=args.workers)
        rep = run_experiment(cfg)
        (out / f"{name}.jsonl").write_text(rep.text())
        print(f"{name:24s} {'pass' if rep.passed else 'FAIL'}  {time.perf_counter() - t0:6.1f}s")
        ok &= rep.passed
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
