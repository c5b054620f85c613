#!/usr/bin/env python3
"""Win rates of the reference attackers in the two-signature game."""

import argparse

from oneshot.game import brute_force_attacker, forgery_game, honest_attacker, random_guess_attacker
from oneshot.lazy_random import DeterministicRng, derive_seed, parse_seed
from oneshot.oracle_suite import OracleSuite, Params, toy_params
from oneshot.oss import code_for

ap = argparse.ArgumentParser()
ap.add_argument("--seed", default=None)
ap.add_argument("--games", type=int, default=200)
args = ap.parse_args()
seed = parse_seed(args.seed)

setups = {
    "honest": (toy_params(), 100, lambda s, c: honest_attacker(s, c)),
    "brute_force": (Params(lam=2, s=0, r=4, n=12, k=10, ell_code=6, msg_len=1), 1 << 12, lambda s, c: brute_force_attacker(c)),
    "random_guess": (Params(lam=12, s=0, r=12, n=20, k=20, ell_code=8, msg_len=1), 100, lambda s, c: random_guess_attacker(c)),
}
for name, (params, budget, make) in setups.items():
    wins = 0
    games = args.games if name != "brute_force" else min(args.games, 20)
    for i in range(games):
        s = derive_seed(seed, name, i)
        suite = OracleSuite(params, s)
        code = code_for(params, s)
        out = forgery_game(suite, make(suite, code), budget, code, DeterministicRng(derive_seed(s, "play"), "play"))
        wins += out.win
    print(f"{name:14s} {wins}/{games} wins")
