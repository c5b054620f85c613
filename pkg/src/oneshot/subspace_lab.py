"""Random superspaces, membership oracles, subspace-hiding families and the
dual anti-concentration bookkeeping, as classical Monte Carlo tools."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .gf2 import BitVec, DimensionError, Eliminator, SamplingError, Subspace, intersect, joint_span, rank_int


def sample_superspace(base: Subspace, s: int, rng) -> Subspace:
    """Uniform T with base <= T and dim T = dim base + s."""
    if base.dim + s > base.ambient:
        raise DimensionError(f"cannot extend a {base.dim}-dim subspace by {s} inside Z_2^{base.ambient}")
    gens = list(base.basis)
    cur = base
    while cur.dim < base.dim + s:
        v = rng.randbits(base.ambient)
        if not cur.contains(v):
            gens.append(v)
            cur = Subspace(base.ambient, gens)
    return cur


def random_subspace(k: int, dim: int, rng) -> Subspace:
    return sample_superspace(Subspace.zero(k), dim, rng)


class MembershipOracle:
    """Counts its queries. ``subspace`` stays reachable for scripted adversaries."""

    def __init__(self, sub: Subspace):
        self.subspace = sub
        self.queries = 0

    def __call__(self, v: BitVec | int) -> int:
        self.queries += 1
        return int(self.subspace.contains(v))


def membership_oracle(sub: Subspace) -> MembershipOracle:
    return MembershipOracle(sub)


# ---------------------------------------------------------------------------
# subspace-hiding families


def standard_intermediates(s0: Subspace, big: Subspace) -> list[Subspace]:
    """Hyperplanes S_i of S over S_0 whose common intersection is exactly S_0.

    Pick a complement c_1..c_lam of S_0 inside S and drop one c_i at a time.
    """
    comp: list[int] = []
    cur = s0
    for b in big.basis:
        if not cur.contains(b):
            comp.append(b)
            cur = Subspace(big.ambient, cur.basis + (b,))
    return [Subspace(big.ambient, s0.basis + tuple(c for j, c in enumerate(comp) if j != i)) for i in range(len(comp))]


def _index(v: int, subs: Sequence[Subspace]) -> int:
    out = 0
    for i, sub in enumerate(subs):
        if not sub.contains(v):
            out |= 1 << i
    return out


@dataclass
class ShfFamily:
    S0: Subspace
    Si: list[Subspace]
    S: Subspace
    T0: Subspace
    Ti: list[Subspace]
    T: Subspace

    def index(self, v: BitVec | int) -> int:
        """Which parallel coset of T0 inside T holds v (bit i set iff v is outside T_i)."""
        x = v.v if isinstance(v, BitVec) else v
        if not self.T.contains(x):
            raise ValueError("vector outside T")
        return _index(x, self.Ti)

    def source_index(self, v: BitVec | int) -> int:
        x = v.v if isinstance(v, BitVec) else v
        if not self.S.contains(x):
            raise ValueError("vector outside S")
        return _index(x, self.Si)


def _validate_chain(S0: Subspace, Si: Sequence[Subspace], S: Subspace) -> None:
    lam = S.dim - S0.dim
    if not S.contains_subspace(S0):
        raise ValueError("S0 must be inside S")
    if len(Si) != lam:
        raise ValueError(f"need exactly {lam} intermediate subspaces")
    seen = set()
    meet = S
    for sub in Si:
        if sub.dim != S.dim - 1 or not sub.contains_subspace(S0) or not S.contains_subspace(sub):
            raise ValueError("each S_i must be a hyperplane of S containing S0")
        if sub in seen:
            raise ValueError("intermediate subspaces must be pairwise distinct")
        seen.add(sub)
        meet = intersect(meet, sub)
    if meet != S0:
        # otherwise the coset index is not injective
        raise ValueError("intermediate subspaces must intersect exactly in S0")


def sample_shf(S0: Subspace, intermediates: Sequence[Subspace], S: Subspace, s: int, rng, max_tries: int = 256) -> ShfFamily:
    _validate_chain(S0, intermediates, S)
    if S.dim + s > S.ambient:
        raise DimensionError("need r + lambda + s <= k")
    for _ in range(max_tries):
        T0 = sample_superspace(S0, s, rng)
        if intersect(T0, S) != S0:
            continue  # T0 would swallow part of S and dim T would drop
        Ti = [joint_span(T0, sub) for sub in intermediates]
        return ShfFamily(S0, list(intermediates), S, T0, Ti, joint_span(T0, S))
    raise SamplingError("could not sample T0 meeting S only in S0")


# ---------------------------------------------------------------------------
# trivial-intersection probability


@dataclass
class IntersectionEstimate:
    estimate: float
    stderr: float
    bound: float
    trials: int
    hits: int

    def satisfies_bound(self, slack_sigmas: float = 3.0) -> bool:
        return self.estimate >= self.bound - slack_sigmas * self.stderr


def _meets_trivially(a: Subspace, b: Subspace) -> bool:
    return rank_int(a.basis + b.basis) == a.dim + b.dim


def trivial_intersection_probability(k: int, r: int, s: int, t: int, trials: int, rng) -> IntersectionEstimate:
    """Estimate Pr[T^perp meets t fixed reference duals only in 0], T a random (r+s)-superspace of S.

    The references are duals of other random superspaces of S, fixed for the
    whole run. The comparison bound is 1 - t * 2^((k-r-s) - s).
    """
    if r + s > k or min(k, r, s, t, trials) < 0:
        raise DimensionError("need 0 <= r + s <= k")
    S = random_subspace(k, r, rng)
    refs = [sample_superspace(S, s, rng).dual() for _ in range(t)]
    hits = 0
    for _ in range(trials):
        Td = sample_superspace(S, s, rng).dual()
        if all(_meets_trivially(Td, ref) for ref in refs):
            hits += 1
    p = hits / trials if trials else 1.0
    stderr = math.sqrt(p * (1 - p) / trials) if trials else 0.0
    d = k - r - s
    bound = 1.0 - t * 2.0 ** (d - s)
    return IntersectionEstimate(p, stderr, bound, trials, hits)


# ---------------------------------------------------------------------------
# anti-concentration reduction


@dataclass
class Execution:
    index: int
    bucket: int
    output: int
    in_S_dual: bool
    in_T_dual_nonzero: bool
    in_S_dual_minus_T_dual: bool
    bucket_success: bool


@dataclass
class AntiConcentrationRun:
    k: int
    r: int
    s: int
    t: int
    ell: int
    epsilon: float
    mode: str
    executions: list[Execution] = field(default_factory=list)
    buckets: list[list[int]] = field(default_factory=list)
    winners: list[Optional[int]] = field(default_factory=list)
    collected: list[int] = field(default_factory=list)
    span_dim: int = 0

    @property
    def frac_in_T_dual(self) -> float:
        return sum(e.in_T_dual_nonzero for e in self.executions) / max(1, len(self.executions))

    @property
    def frac_escaping(self) -> float:
        return sum(e.in_S_dual_minus_T_dual for e in self.executions) / max(1, len(self.executions))

    def summary(self) -> dict:
        return {
            "k": self.k,
            "r": self.r,
            "s": self.s,
            "t": self.t,
            "ell": self.ell,
            "epsilon": self.epsilon,
            "mode": self.mode,
            "span_dim": self.span_dim,
            "buckets_won": sum(w is not None for w in self.winners),
            "frac_in_T_dual": self.frac_in_T_dual,
            "frac_in_S_dual_minus_T_dual": self.frac_escaping,
        }


Adversary = Callable[[MembershipOracle, object], int]


def anticoncentration_reduction(
    adversary: Adversary,
    k: int,
    r: int,
    s: int,
    eps: float,
    rng,
    *,
    S: Optional[Subspace] = None,
    mode: str = "iid",
    max_ell: int = 100_000,
) -> AntiConcentrationRun:
    """Run the adversary ell = ceil(k (t + 1) / eps) times and track the span of its in-S^perp outputs.

    ``mode="iid"`` hands out a fresh random superspace per execution;
    ``mode="shared"`` samples one T and reuses it for every execution.
    """
    if mode not in ("iid", "shared"):
        raise ValueError("mode must be 'iid' or 'shared'")
    if not 0 < eps <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    if S is None:
        S = random_subspace(k, r, rng)
    if S.dim != r or S.ambient != k:
        raise DimensionError("S must have dimension r inside Z_2^k")
    t = k - r - s
    ell = math.ceil(k * (t + 1) / eps)
    if ell > max_ell:
        raise ValueError(f"ell = {ell} exceeds the cap {max_ell}")
    S_dual = S.dual()
    run = AntiConcentrationRun(k, r, s, t, ell, eps, mode)
    nb = t + 1
    edges = [round(j * ell / nb) for j in range(nb + 1)]
    run.buckets = [list(range(edges[j], edges[j + 1])) for j in range(nb)]
    run.winners = [None] * nb
    winner_duals: list[Subspace] = []
    span = Eliminator()
    shared = sample_superspace(S, s, rng) if mode == "shared" else None

    for j, bucket in enumerate(run.buckets):
        for i in bucket:
            T = shared if shared is not None else sample_superspace(S, s, rng)
            u = adversary(MembershipOracle(T), rng)
            T_dual = T.dual()
            in_S = S_dual.contains(u)
            in_T = u != 0 and T_dual.contains(u)
            success = (
                run.winners[j] is None
                and in_T
                and all(_meets_trivially(T_dual, w) for w in winner_duals)
            )
            if success:
                run.winners[j] = i
                winner_duals.append(T_dual)
            if in_S:
                run.collected.append(u)
                span.add(u)
            run.executions.append(Execution(i, j, u, in_S, in_T, in_S and not T_dual.contains(u), success))
    run.span_dim = span.rank
    return run
