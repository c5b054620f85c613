import pytest
from hypothesis import given, settings, strategies as st

from oneshot.ecc import (
    LinearCode,
    decode_candidates,
    encode,
    min_distance_bruteforce,
    sample_code,
    sample_code_counted,
    within_radius,
)
from oneshot.gf2 import BitMatrix, BitVec, SamplingError
from oneshot.lazy_random import DeterministicRng

SEED = bytes([11]) * 32


def S(s):
    return BitVec.from_str(s)


def gen(*rows):
    return BitMatrix.from_rows([S(r) for r in rows])


def test_min_distance_repetition():
    assert min_distance_bruteforce(gen("111")) == 3


def test_min_distance_two_blocks():
    # codewords 000000, 111000, 000111, 111111
    assert min_distance_bruteforce(gen("111000", "000111")) == 3


def test_min_distance_identity():
    assert min_distance_bruteforce(BitMatrix.identity(5)) == 1


def test_min_distance_rank_deficient_is_zero():
    assert min_distance_bruteforce(gen("1100", "1100")) == 0


def test_single_message_bit_code():
    code = sample_code(DeterministicRng(SEED, "c"), 1, 6)
    assert code.generator.rows[0].bit_count() >= 3


def test_two_block_code_accepted():
    # distance 3 > floor(6/3) = 2, so this generator is admissible
    code = LinearCode.from_json({"msg_len": 2, "code_len": 6, "min_distance": 3,
                                 "generator_rows": [S("111000").to_hex(), S("000111").to_hex()]})
    assert code.certified_min_distance == 3


def test_too_many_message_bits_exhausts():
    # an [6,5] code has distance at most 2 (Singleton)
    with pytest.raises(SamplingError):
        sample_code(DeterministicRng(SEED, "c"), 5, 6, max_tries=300)


def test_encode_zero_and_units():
    code = sample_code(DeterministicRng(SEED, "e"), 3, 12)
    assert encode(code, BitVec.zeros(3)) == BitVec.zeros(12)
    for j in range(3):
        assert encode(code, BitVec.unit(3, j)).v == code.generator.rows[j]


def test_within_radius_boundary():
    code = sample_code(DeterministicRng(SEED, "r"), 3, 12)
    assert code.radius == 2
    c = encode(code, S("101"))
    assert within_radius(code, c, c)
    assert within_radius(code, c.flip(0).flip(5), c)
    assert not within_radius(code, c.flip(0).flip(5).flip(9), c)


def test_json_rejects_wrong_distance():
    code = sample_code(DeterministicRng(SEED, "j"), 2, 8)
    obj = code.to_json()
    assert LinearCode.from_json(obj) == code
    obj["min_distance"] += 1
    with pytest.raises(ValueError):
        LinearCode.from_json(obj)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 12), st.integers(0, 10**9))
def test_sampled_codes_have_disjoint_balls(ell, seed):
    lam = max(1, ell // 4)
    try:
        code, tries = sample_code_counted(DeterministicRng(seed.to_bytes(32, "little"), "b"), lam, ell, max_tries=200)
    except SamplingError:
        return
    assert tries >= 1
    assert code.certified_min_distance > ell // 3
    assert 2 * code.radius < code.certified_min_distance
    for w in range(1 << ell):
        assert len(decode_candidates(code, BitVec(ell, w))) <= 1
