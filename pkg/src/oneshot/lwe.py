"""Toy noisy claw-free function  (t, f, b) -> B t + f + b c  (mod q).

Only evaluation and exhaustive claw search are provided; there is no lattice
trapdoor. Parameter relations are checked in their concrete form
sigma <= B_bar <= B <= q with B and q powers of two; the asymptotic
``v >= u log q`` relation is reported, not enforced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

Vec = tuple[int, ...]

BRUTE_LIMITS = {"u": 3, "v": 6, "q": 64}


class LweParamError(ValueError):
    pass


def _pow2(x: int) -> bool:
    return x > 0 and x & (x - 1) == 0


@dataclass(frozen=True)
class LweParams:
    u: int
    v: int
    q: int
    B: int
    B_bar: int
    sigma: float

    def __post_init__(self):
        if self.u < 1 or self.v < 1:
            raise LweParamError("u and v must be positive")
        if not (_pow2(self.q) and _pow2(self.B)):
            raise LweParamError("q and B must be powers of two")
        if not (0 < self.sigma <= self.B_bar <= self.B <= self.q):
            raise LweParamError("need 0 < sigma <= B_bar <= B <= q")

    def report(self) -> dict:
        return {
            "in_bits": 1 + self.u * int(math.log2(self.q)) + self.v * int(math.log2(self.B)),
            "out_bits": self.v * int(math.log2(self.q)),
            "effective_bits": self.u * int(math.log2(self.q)),
            "v_ge_u_log_q": self.v >= self.u * math.log2(self.q),
        }


@dataclass(frozen=True)
class LweTcfKey:
    params: LweParams
    B: tuple[Vec, ...]  # v rows of length u
    c: Vec
    s: Vec  # secret; kept only so tests can check claws
    e: Vec


def _centered(x: int, q: int) -> int:
    """Representative of x mod q in (-q/2, q/2]."""
    x %= q
    return x - q if x > q // 2 else x


def _sample_noise(rng, sigma: float, bound: int) -> int:
    """Discrete Gaussian of width sigma restricted to (-bound, bound], by rejection."""
    lo = -bound + 1
    span = 2 * bound
    while True:
        x = lo + rng.randbelow(span)
        if rng.random() < math.exp(-math.pi * x * x / (sigma * sigma)):
            return x


def keygen(params: LweParams, rng) -> LweTcfKey:
    p = params
    Bm = tuple(tuple(rng.randbelow(p.q) for _ in range(p.u)) for _ in range(p.v))
    s = tuple(rng.randbelow(p.q) for _ in range(p.u))
    e = tuple(_sample_noise(rng, p.sigma, p.B_bar) for _ in range(p.v))
    c = tuple((sum(a * b for a, b in zip(row, s)) + ei) % p.q for row, ei in zip(Bm, e))
    return LweTcfKey(p, Bm, c, s, e)


def lwe_tcf_eval(key: LweTcfKey, t: Sequence[int], f: Sequence[int], b: int) -> Vec:
    p = key.params
    if len(t) != p.u or len(f) != p.v:
        raise LweParamError("input shape mismatch")
    return tuple(
        (sum(a * x for a, x in zip(row, t)) + fi + b * ci) % p.q
        for row, fi, ci in zip(key.B, f, key.c)
    )


def noise_from_effective(key: LweTcfKey, t: Sequence[int], b: int, y: Sequence[int]) -> Optional[Vec]:
    """Recover f from (t, b, y): f = y - B t - b c, if it lies in (-B, B]."""
    p = key.params
    f = tuple(
        _centered(yi - sum(a * x for a, x in zip(row, t)) - b * ci, p.q)
        for row, yi, ci in zip(key.B, y, key.c)
    )
    if all(-p.B < fi <= p.B for fi in f):
        return f
    return None


def _all_t(u: int, q: int):
    if u == 0:
        yield ()
        return
    for head in range(q):
        for rest in _all_t(u - 1, q):
            yield (head,) + rest


def preimages(key: LweTcfKey, y: Sequence[int]) -> list[tuple[Vec, Vec, int]]:
    p = key.params
    if p.u > BRUTE_LIMITS["u"] or p.v > BRUTE_LIMITS["v"] or p.q > BRUTE_LIMITS["q"]:
        raise LweParamError(f"brute force limited to {BRUTE_LIMITS}")
    out = []
    for t in _all_t(p.u, p.q):
        for b in (0, 1):
            f = noise_from_effective(key, t, b, y)
            if f is not None:
                out.append((t, f, b))
    return out


def lwe_tcf_claw_bruteforce(key: LweTcfKey, y: Sequence[int]) -> Optional[tuple[tuple[Vec, Vec, int], tuple[Vec, Vec, int]]]:
    """A pair of preimages of y with selector bits 0 and 1, if one exists."""
    pre = preimages(key, y)
    zero = [x for x in pre if x[2] == 0]
    one = [x for x in pre if x[2] == 1]
    if not zero or not one:
        return None
    return zero[0], one[0]
