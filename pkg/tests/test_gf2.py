import itertools

import pytest
from hypothesis import given, settings, strategies as st

from oneshot.gf2 import (
    BitMatrix,
    BitVec,
    Coset,
    DimensionError,
    Eliminator,
    Subspace,
    affine_hull,
    coordinates,
    dual,
    intersect,
    invert,
    is_coset,
    joint_span,
    mat_mul,
    mat_vec,
    random_full_rank,
    rank,
    solve,
)
from oneshot.lazy_random import DeterministicRng


def M(*rows):
    return BitMatrix.from_lists(rows)


def V(*bits):
    return BitVec.from_bits(bits)


def brute_span(vectors):
    out = {0}
    for v in vectors:
        out |= {x ^ v for x in out}
    return out


# --- rank -------------------------------------------------------------------


def test_rank_identity():
    assert rank(BitMatrix.identity(3)) == 3


def test_rank_zero_matrix():
    assert rank(BitMatrix.zeros(2, 5)) == 0


def test_rank_dependent_rows():
    # third row is the sum of the first two
    assert rank(M([1, 1, 0], [0, 1, 1], [1, 0, 1])) == 2


# --- solve ------------------------------------------------------------------


def test_solve_identity():
    assert solve(BitMatrix.identity(3), V(1, 0, 1)) == V(1, 0, 1)


def test_solve_two_columns():
    m = BitMatrix.from_columns(2, [V(1, 1).v, V(0, 1).v])
    assert solve(m, V(1, 0)) == V(1, 1)


def test_solve_absent():
    m = BitMatrix.from_columns(2, [V(1, 1).v])
    assert solve(m, V(1, 0)) is None


# --- dual -------------------------------------------------------------------


def test_dual_of_full_space_is_zero():
    assert dual(Subspace.full(5)) == Subspace.zero(5)


def test_dual_of_zero_is_full():
    assert dual(Subspace.zero(4)) == Subspace.full(4)


def test_dual_of_two_dim_plane():
    s = Subspace.span(3, [V(1, 1, 0), V(0, 1, 1)])
    assert dual(s) == Subspace.span(3, [V(1, 1, 1)])


# --- coordinates --------------------------------------------------------------


def test_coordinates_identity_rows():
    assert coordinates(BitMatrix.identity(2), V(0, 1)) == V(0, 1)


def test_coordinates_sum_of_rows():
    assert coordinates(M([1, 1, 0], [0, 0, 1]), V(1, 1, 1)) == V(1, 1)


def test_coordinates_absent():
    assert coordinates(M([1, 1, 0]), V(1, 0, 0)) is None


# --- random_full_rank --------------------------------------------------------


def test_random_full_rank_square_is_invertible():
    m = random_full_rank(DeterministicRng(bytes(32), "t"), 3, 3)
    assert rank(m) == 3
    assert mat_mul(m, invert(m)) == BitMatrix.identity(3)


def test_random_full_rank_bottom_block():
    rng = DeterministicRng(bytes(32), "t")
    for _ in range(20):
        m = random_full_rank(rng, 4, 2, 2)
        assert rank(m) == 2
        assert rank(m.row_block(2, 4)) == 2


def test_random_full_rank_too_many_columns():
    with pytest.raises(DimensionError):
        random_full_rank(DeterministicRng(bytes(32), "t"), 2, 3)


# --- bit order and serialisation ---------------------------------------------


def test_hex_is_msb_first():
    # index 0 lands in the top bit of the first byte
    assert BitVec.unit(8, 0).to_hex() == "80"
    assert BitVec.unit(12, 11).to_hex() == "0010"
    assert BitVec.from_hex("c0", 3) == V(1, 1, 0)


def test_hex_rejects_padding():
    with pytest.raises(ValueError):
        BitVec.from_hex("01", 3)


@given(st.integers(0, 40).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, (1 << n) - 1))))
def test_hex_round_trip(nv):
    n, v = nv
    b = BitVec(n, v)
    assert BitVec.from_hex(b.to_hex(), n) == b
    assert BitVec.from_json(b.to_json()) == b


def test_matrix_json_round_trip():
    m = M([1, 0, 1, 1], [0, 1, 1, 0], [1, 1, 1, 1])
    assert BitMatrix.from_json(m.to_json()) == m


# --- properties against brute force ------------------------------------------

vec_lists = st.integers(1, 7).flatmap(
    lambda k: st.tuples(st.just(k), st.lists(st.integers(0, (1 << k) - 1), max_size=6))
)


@given(vec_lists)
def test_subspace_matches_enumerated_span(kv):
    k, vs = kv
    sub = Subspace(k, vs)
    span = brute_span(vs)
    assert set(sub.elements()) == span
    assert 1 << sub.dim == len(span)


@given(vec_lists)
def test_dual_matches_enumeration(kv):
    k, vs = kv
    span = brute_span(vs)
    expect = {w for w in range(1 << k) if all(bin(w & x).count("1") % 2 == 0 for x in span)}
    assert set(Subspace(k, vs).dual().elements()) == expect


@given(vec_lists, vec_lists)
def test_intersection_and_join(a, b):
    k = min(a[0], b[0])
    mask = (1 << k) - 1
    va = [x & mask for x in a[1]]
    vb = [x & mask for x in b[1]]
    A, B = Subspace(k, va), Subspace(k, vb)
    assert set(intersect(A, B).elements()) == brute_span(va) & brute_span(vb)
    assert set(joint_span(A, B).elements()) == brute_span(va + vb)


@given(vec_lists, st.integers(0, 127))
def test_eliminator_express(kv, target):
    k, vs = kv
    target &= (1 << k) - 1
    e = Eliminator(vs)
    combo = e.express(target)
    if target in brute_span(vs):
        assert combo is not None
        acc = 0
        for i, v in enumerate(vs):
            if (combo >> i) & 1:
                acc ^= v
        assert acc == target
    else:
        assert combo is None


@settings(max_examples=50)
@given(st.integers(1, 6), st.integers(0, 2**32))
def test_invert_random(n, seed):
    rng = DeterministicRng(seed.to_bytes(32, "little"), "inv")
    m = random_full_rank(rng, n, n)
    assert mat_mul(invert(m), m) == BitMatrix.identity(n)


@given(st.integers(1, 6).flatmap(lambda k: st.tuples(st.just(k), st.lists(st.integers(0, (1 << k) - 1), min_size=1, max_size=5), st.integers(0, (1 << k) - 1))))
def test_coset_tests(kvb):
    k, vs, b = kvb
    pts = {x ^ b for x in brute_span(vs)}
    c = Coset(Subspace(k, vs), b)
    assert set(c.elements()) == pts
    assert affine_hull(pts, k) == c
    assert is_coset(pts, k)


def test_is_coset_rejects_three_points():
    assert not is_coset({0, 1, 2}, 2)


def test_mat_vec_matches_definition():
    m = M([1, 0, 1], [0, 1, 1])
    for bits in itertools.product((0, 1), repeat=3):
        z = V(*bits)
        want = V(*[sum(a * b for a, b in zip(row, bits)) % 2 for row in ([1, 0, 1], [0, 1, 1])])
        assert mat_vec(m, z) == want
