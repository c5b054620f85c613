from collections import Counter

import pytest

from oneshot.coset_state import hadamard_all
from oneshot.ecc import encode
from oneshot.gf2 import BitVec
from oneshot.lazy_random import DeterministicRng, derive_seed
from oneshot.oracle_suite import OracleSuite, toy_params
from oneshot.oss import (
    KeyConsumedError,
    Signature,
    code_for,
    dual_functionals,
    sign,
    siggen,
    strong_unforgeability_witness,
    verify,
)

SEED = bytes([21]) * 32
P = toy_params()


@pytest.fixture(scope="module")
def env():
    suite = OracleSuite(P, SEED)
    return suite, code_for(P, SEED)


def rng(*labels):
    return DeterministicRng(derive_seed(SEED, *labels), "oss")


def signed(env, i, msg=0b101):
    suite, code = env
    r = rng("sign", i)
    kp = siggen(suite, r)
    m = BitVec(P.msg_len, msg)
    sig, tr = sign(suite, kp, m, code, r)
    return kp, sig, tr


def test_siggen_reproducible(env):
    suite, _ = env
    a = [siggen(suite, rng("kg")).pk for _ in range(1)]
    r1, r2 = rng("kg2"), rng("kg2")
    assert [siggen(suite, r1).pk for _ in range(5)] == [siggen(suite, r2).pk for _ in range(5)]
    assert a[0].n == P.r


def test_secret_state_is_uniform_over_fiber(env):
    suite, _ = env
    kp = siggen(suite, rng("fib"))
    assert kp.sk.support == suite.fiber_coset(kp.pk)
    assert kp.sk.subspace.dim == P.n - P.r


def test_sign_then_verify_mostly_succeeds(env):
    suite, code = env
    ok = 0
    for i in range(40):
        kp, sig, tr = signed(env, i)
        assert suite.p_inverse(kp.pk, sig.sigma) is not None
        assert verify(suite, kp.pk, sig.message, sig.sigma, code) == tr.success
        ok += tr.success
    assert ok >= 30


def test_key_is_single_use(env):
    suite, code = env
    r = rng("once")
    kp = siggen(suite, r)
    sign(suite, kp, BitVec(3, 1), code, r)
    assert kp.spent and kp.sk is None
    with pytest.raises(KeyConsumedError):
        sign(suite, kp, BitVec(3, 2), code, r)


def test_rounds_zero_gives_plain_fiber_sample(env):
    suite, code = env
    wins = 0
    for i in range(200):
        r = rng("r0", i)
        kp = siggen(suite, r)
        sig, tr = sign(suite, kp, BitVec(3, 6), code, r, rounds=0)
        assert tr.rounds == []
        assert suite.p_inverse(kp.pk, sig.sigma) is not None
        wins += tr.success
    # a random 12-bit tail lands within distance 2 of a fixed codeword with prob 79/4096
    assert wins <= 15


def test_mismatch_roughly_halves(env):
    totals = Counter()
    for i in range(150):
        _, _, tr = signed(env, 1000 + i, msg=i % 8)
        for t, rec in enumerate(tr.rounds):
            totals[t] += rec.mismatch_count
    fr = [totals[t] / (150 * P.ell_code) for t in range(3)]
    assert 0.4 < fr[0] < 0.6
    assert 0.17 < fr[1] < 0.33
    assert 0.06 < fr[2] < 0.19


def test_verify_rejects_outside_fiber(env):
    suite, code = env
    kp, sig, _ = signed(env, 3)
    span = suite.fiber_coset(kp.pk).subspace
    bad = next(w for w in range(1, 1 << P.k) if not span.contains(w))
    assert not verify(suite, kp.pk, sig.message, BitVec(P.k, sig.sigma.v ^ bad), code)


def test_verify_rejects_far_tail_inside_fiber(env):
    suite, code = env
    kp, sig, tr = next(t for t in (signed(env, 50 + i) for i in range(20)) if t[2].success)
    target = encode(code, sig.message)
    span = suite.fiber_coset(kp.pk).subspace
    lo = P.k - P.ell_code
    for w in span.elements():
        moved = BitVec(P.k, sig.sigma.v ^ w)
        if moved.slice(lo, P.k).distance(target) > code.radius:
            assert suite.p_inverse(kp.pk, moved) is not None
            assert not verify(suite, kp.pk, sig.message, moved, code)
            return
    pytest.fail("no far point in the fiber")


def test_verify_rejects_wrong_lengths(env):
    suite, code = env
    kp, sig, _ = signed(env, 4)
    assert not verify(suite, kp.pk, BitVec(4, 0), sig.sigma, code)
    assert not verify(suite, kp.pk, sig.message, BitVec(P.k + 1, 0), code)


def test_witness_none_for_equal_sigmas(env):
    suite, _ = env
    kp, sig, _ = signed(env, 5)
    assert strong_unforgeability_witness(suite, kp.pk, sig, Signature(sig.sigma, BitVec(3, 0))) is None


def test_witness_is_collision(env):
    suite, code = env
    kp, sig, _ = signed(env, 6)
    other = next(BitVec(P.k, sig.sigma.v ^ w) for w in suite.fiber_coset(kp.pk).subspace.elements() if w)
    x0, x1 = strong_unforgeability_witness(suite, kp.pk, sig, Signature(other, BitVec(3, 0)))
    assert x0 != x1
    assert suite.h(x0) == suite.h(x1) == kp.pk


def test_distinct_messages_force_distinct_sigmas(env):
    suite, code = env
    # verification windows of different messages are disjoint, so no sigma verifies for both
    kp, sig, tr = next(t for t in (signed(env, 80 + i) for i in range(20)) if t[2].success)
    for m in range(1 << P.msg_len):
        if m != sig.message.v:
            assert not verify(suite, kp.pk, BitVec(3, m), sig.sigma, code)


def test_dual_functionals_agree_with_direct_queries(env):
    suite, _ = env
    kp = siggen(suite, rng("df"))
    st = hadamard_all(kp.sk)
    funcs = dual_functionals(suite, kp.pk, st, list(range(P.ell_code)))
    r = rng("df-pts")
    for _ in range(30):
        v = st.offset ^ st.subspace.random_element(r)
        c = suite.d_oracle(kp.pk, BitVec(P.k, v))
        assert c is not None
        assert [f(v) for f in funcs] == c.bits()
