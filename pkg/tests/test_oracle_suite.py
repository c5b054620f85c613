import json

import pytest
from hypothesis import given, settings, strategies as st

from oneshot.battery import dual_accept_set, suite_battery
from oneshot.gf2 import BitVec, Subspace, vec_mat_int
from oneshot.oracle_suite import OracleSuite, ParamError, Params, reference_params, suite_from_params_file, toy_params

SEED = bytes([7]) * 32
SMALL = Params(lam=2, s=2, r=4, n=10, k=8, ell_code=3, msg_len=1, bloat_s=2)


@pytest.fixture
def small():
    return OracleSuite(SMALL, SEED)


@pytest.fixture(scope="module")
def toy():
    return OracleSuite(toy_params(), SEED)


def test_toy_defaults():
    p = toy_params()
    assert (p.n, p.r, p.k, p.ell_code, p.msg_len, p.rounds) == (20, 6, 16, 12, 3, 3)


def test_reference_params_shape():
    p = reference_params(8)
    assert p.n - p.r >= p.ell_code
    assert p.k == p.n - p.r + 8


@pytest.mark.parametrize(
    "bad",
    [
        dict(r=21),  # r > n
        dict(ell_code=15),  # n - r < ell
        dict(k=10),  # k < n - r
        dict(msg_len=13),
        dict(bloat_s=3),  # n - r - ell = 2
    ],
)
def test_param_validation(bad):
    with pytest.raises(ParamError):
        toy_params(**bad)


def test_params_json_uses_lambda_key():
    obj = toy_params().to_json()
    assert "lambda" in obj and "lam" not in obj
    assert Params.from_json({**obj, "seed": "00" * 32}) == toy_params()


def test_round_trip_small(small):
    for x in range(1 << SMALL.n):
        out = small.p_forward(BitVec(SMALL.n, x))
        assert small.p_inverse(out.y, out.u) == BitVec(SMALL.n, x)


def test_u_outside_column_span_rejected(small):
    y = small.h(BitVec(SMALL.n, 0))
    A, b = small.coset(y)
    span = Subspace.column_span(A)
    outside = next(w for w in range(1 << SMALL.k) if not span.contains(w))
    assert small.p_inverse(y, BitVec(SMALL.k, b.v ^ outside)) is None


def test_d_oracle_zero_and_dual(small):
    y = small.h(BitVec(SMALL.n, 5))
    A, _ = small.coset(y)
    assert small.d_oracle(y, BitVec.zeros(SMALL.k)) == BitVec.zeros(SMALL.ell_code)
    for v in Subspace.column_span(A).dual().elements():
        assert small.d_oracle(y, BitVec(SMALL.k, v)) == BitVec.zeros(SMALL.ell_code)


def test_d_oracle_coordinates_reproduce_row_combination(small):
    y = small.h(BitVec(SMALL.n, 9))
    A, _ = small.coset(y)
    rows = list(A.rows)
    bottom = rows[SMALL.k - SMALL.ell_code:]
    for v in dual_accept_set(small, y):
        c = small.d_oracle(y, BitVec(SMALL.k, v)).v
        acc = 0
        for j, row in enumerate(bottom):
            if (c >> j) & 1:
                acc ^= row
        assert acc == vec_mat_int(v, rows)


def test_d_bloated_with_s_zero_is_d(small):
    y = small.h(BitVec(SMALL.n, 11))
    for v in range(1 << SMALL.k):
        vv = BitVec(SMALL.k, v)
        assert small.d_bloated(y, vv, s=0) == small.d_oracle(y, vv)


def test_d_bloated_kills_dual_of_a1(small):
    y = small.h(BitVec(SMALL.n, 2))
    for v in Subspace.column_span(small.a1(y)).dual().elements():
        assert small.d_bloated(y, BitVec(SMALL.k, v)) == BitVec.zeros(SMALL.ell_code)


def test_battery_small(small):
    rep = suite_battery(small, max_ys=4)
    assert rep.passed, rep.checks
    assert {"D_matches_enumeration", "Dprime_matches_enumeration", "D_accept_within_Dprime"} <= set(rep.checks)


def test_determinism_across_instances():
    a, b = OracleSuite(SMALL, SEED), OracleSuite(SMALL, SEED)
    xs = [3, 700, 3, 1]
    assert [a.p_forward(BitVec(10, x)) for x in xs] == [b.p_forward(BitVec(10, x)) for x in xs]
    c = OracleSuite(SMALL, bytes(32))
    assert [a.p_forward(BitVec(10, x)) for x in xs] != [c.p_forward(BitVec(10, x)) for x in xs]


def test_fiber_payload_independent_of_query_order():
    a, b = OracleSuite(SMALL, SEED), OracleSuite(SMALL, SEED)
    ys = [BitVec(4, v) for v in (1, 9, 14)]
    ca = [a.coset(y) for y in ys]
    cb = [b.coset(y) for y in reversed(ys)][::-1]
    assert ca == cb


@settings(max_examples=40, deadline=None)
@given(st.integers(0, (1 << 20) - 1))
def test_toy_round_trip_property(toy, x):
    out = toy.p_forward(BitVec(20, x))
    assert toy.p_inverse(out.y, out.u) == BitVec(20, x)
    assert toy.fiber_coset(out.y).contains(out.u)


def test_suite_json_and_file(tmp_path):
    s = OracleSuite(SMALL, SEED)
    obj = s.to_json()
    again = OracleSuite.from_json(obj)
    assert again.p_forward(BitVec(10, 77)) == s.p_forward(BitVec(10, 77))
    path = tmp_path / "p.json"
    path.write_text(json.dumps(SMALL.to_json()))
    assert suite_from_params_file(str(path), SEED).p_forward(BitVec(10, 77)) == s.p_forward(BitVec(10, 77))


def test_query_counters(small):
    y = small.h(BitVec(10, 0))
    small.p_forward(BitVec(10, 0))
    small.p_inverse(y, BitVec(8, 0))
    small.d_oracle(y, BitVec(8, 0))
    assert small.queries == {"P": 1, "Pinv": 1, "D": 1}
