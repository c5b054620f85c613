from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from oneshot.gf2 import DimensionError, Subspace, intersect
from oneshot.lazy_random import DeterministicRng, derive_seed
from oneshot.subspace_lab import (
    anticoncentration_reduction,
    membership_oracle,
    random_subspace,
    sample_shf,
    sample_superspace,
    standard_intermediates,
    trivial_intersection_probability,
)

SEED = bytes([13]) * 32


def rng(*labels):
    return DeterministicRng(derive_seed(SEED, *labels), "lab")


def test_superspace_with_s_zero_is_base():
    base = random_subspace(6, 3, rng("b"))
    assert sample_superspace(base, 0, rng("s")) == base


def test_superspace_contains_base():
    r = rng("c")
    base = random_subspace(8, 3, r)
    for _ in range(20):
        T = sample_superspace(base, 2, r)
        assert T.dim == 5 and T.contains_subspace(base)


def test_superspace_too_big():
    with pytest.raises(DimensionError):
        sample_superspace(Subspace.full(3), 1, rng())


def test_superspace_uniform_small_case():
    # k=3, r=1: the 3 planes through a fixed line
    base = Subspace(3, [1])
    r = rng("u")
    c = Counter(sample_superspace(base, 1, r) for _ in range(3000))
    assert len(c) == 3
    assert all(900 < v < 1100 for v in c.values())


def test_membership_oracle():
    S = Subspace(5, [0b00011, 0b00100])
    o = membership_oracle(S)
    assert o(0) == 1
    assert all(o(b) == 1 for b in S.basis)
    assert o(0b01000) == 0 and o(0b10001) == 0
    assert o.queries == 5


def _family(k, r, lam, s, label):
    rr = rng(label)
    S0 = random_subspace(k, r, rr)
    S = sample_superspace(S0, lam, rr)
    return S0, S, sample_shf(S0, standard_intermediates(S0, S), S, s, rr)


def test_shf_with_s_zero():
    S0, S, fam = _family(8, 2, 3, 0, "z")
    assert fam.T == S and fam.T0 == S0
    assert fam.Ti == fam.Si


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_shf_index_separates_cosets(seed):
    k, r, lam, s = 9, 2, 3, 2
    rr = DeterministicRng(derive_seed(SEED, "shf", seed), "shf")
    S0 = random_subspace(k, r, rr)
    S = sample_superspace(S0, lam, rr)
    fam = sample_shf(S0, standard_intermediates(S0, S), S, s, rr)
    assert fam.T.dim == r + lam + s
    assert intersect(fam.T0, fam.S) == S0
    by_index = {}
    for v in fam.T.elements():
        by_index.setdefault(fam.index(v), set()).add(v)
    assert len(by_index) == 1 << lam
    for idx, pts in by_index.items():
        assert len(pts) == 1 << fam.T0.dim
        v0 = next(iter(pts))
        assert all(fam.T0.contains(v ^ v0) for v in pts)
    for v in S.elements():
        assert fam.index(v) == fam.source_index(v)


def test_shf_rejects_bad_chain():
    r = rng("bad")
    S0 = random_subspace(8, 2, r)
    S = sample_superspace(S0, 2, r)
    good = standard_intermediates(S0, S)
    with pytest.raises(ValueError):
        sample_shf(S0, [good[0], good[0]], S, 1, r)
    with pytest.raises(ValueError):
        sample_shf(S0, good[:1], S, 1, r)


def test_intersection_t_zero_is_certain():
    est = trivial_intersection_probability(8, 2, 3, 0, 200, rng("t0"))
    assert est.estimate == 1.0 and est.bound == 1.0


def test_intersection_bound_holds_when_s_dominates():
    est = trivial_intersection_probability(12, 2, 8, 2, 2000, rng("big-s"))
    assert est.bound == pytest.approx(1 - 2 * 2.0 ** (2 - 8))
    assert est.satisfies_bound()


def test_anticoncentration_zero_adversary():
    run = anticoncentration_reduction(lambda o, r: 0, 8, 2, 3, 0.5, rng("zero"))
    assert run.span_dim == 0
    assert run.ell == 8 * 4 * 2
    assert not any(run.winners[j] is not None for j in range(len(run.winners)))


def test_anticoncentration_round_robin_basis():
    k, r, s = 8, 2, 3
    S = random_subspace(k, r, rng("rr"))
    basis = S.dual().basis
    calls = iter(range(10**6))

    def adv(oracle, _):
        return basis[next(calls) % len(basis)]

    run = anticoncentration_reduction(adv, k, r, s, 0.5, rng("rr2"), S=S)
    assert run.span_dim == k - r
    assert len(run.collected) == run.ell


def test_anticoncentration_peeking_adversary_wins_buckets():
    k, r, s = 8, 2, 3

    def adv(oracle, rr):
        d = oracle.subspace.dual()
        while True:
            v = d.random_element(rr)
            if v:
                return v

    run = anticoncentration_reduction(adv, k, r, s, 0.5, rng("peek"))
    assert run.frac_in_T_dual == 1.0
    assert sum(w is not None for w in run.winners) >= 2
    assert run.summary()["mode"] == "iid"


def test_anticoncentration_shared_mode():
    run = anticoncentration_reduction(lambda o, r: 0, 6, 1, 2, 1.0, rng("sh"), mode="shared")
    assert run.mode == "shared"
    with pytest.raises(ValueError):
        anticoncentration_reduction(lambda o, r: 0, 6, 1, 2, 1.0, rng("sh"), mode="other")
