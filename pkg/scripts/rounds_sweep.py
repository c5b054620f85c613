#!/usr/bin/env python3
"""Success rate and residual mismatch as the number of signing rounds varies."""

import argparse
import json
import statistics

from oneshot.experiments import sign_trial
from oneshot.lazy_random import derive_seed, parse_seed
from oneshot.oracle_suite import toy_params

ap = argparse.ArgumentParser()
ap.add_argument("--seed", default=None)
ap.add_argument("--trials", type=int, default=300)
ap.add_argument("--max-rounds", type=int, default=5)
args = ap.parse_args()

seed = parse_seed(args.seed)
for rounds in range(args.max_rounds + 1):
    p = toy_params(rounds=rounds)
    rows = [sign_trial(p, derive_seed(seed, "sweep", rounds), i) for i in range(args.trials)]
    print(json.dumps({
        "rounds": rounds,
        "success_rate": statistics.fmean(r["verified"] for r in rows),
        "mean_final_mismatch": statistics.fmean(r["final_mismatch"] for r in rows),
    }, sort_keys=True))
