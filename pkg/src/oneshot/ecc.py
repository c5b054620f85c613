"""Random linear codes certified by brute force.

A code is accepted only if its exact minimum distance exceeds floor(ell/3);
signatures are then checked against the target codeword with radius
floor(ell/6), so decoding balls never overlap.
"""

from __future__ import annotations

from dataclasses import dataclass

from .gf2 import BitMatrix, BitVec, DimensionError, SamplingError, rank_int

MAX_MSG_LEN = 20


@dataclass(frozen=True)
class LinearCode:
    msg_len: int
    code_len: int
    generator: BitMatrix
    certified_min_distance: int

    @property
    def radius(self) -> int:
        return self.code_len // 6

    def to_json(self) -> dict:
        return {
            "msg_len": self.msg_len,
            "code_len": self.code_len,
            "generator_rows": [BitVec(self.code_len, r).to_hex() for r in self.generator.rows],
            "min_distance": self.certified_min_distance,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LinearCode":
        ell = obj["code_len"]
        rows = [BitVec.from_hex(h, ell).v for h in obj["generator_rows"]]
        gen = BitMatrix(obj["msg_len"], ell, rows)
        d = min_distance_bruteforce(gen)
        if d != obj["min_distance"]:
            raise ValueError(f"stored min distance {obj['min_distance']} but generator gives {d}")
        return cls(obj["msg_len"], ell, gen, d)


def min_distance_bruteforce(generator: BitMatrix) -> int:
    """Smallest weight of a nonzero codeword, by Gray-code enumeration.

    Returns 0 when the generator is rank deficient (some nonzero message encodes to 0).
    """
    lam = generator.nrows
    if lam > MAX_MSG_LEN:
        raise ValueError(f"refusing to enumerate 2^{lam} codewords")
    rows = generator.rows
    best = generator.ncols + 1
    word = 0
    for i in range(1, 1 << lam):
        word ^= rows[(i & -i).bit_length() - 1]
        w = word.bit_count()
        if w < best:
            best = w
            if best == 0:
                break
    return best if lam else 0


def sample_code_counted(rng, msg_len: int, code_len: int, max_tries: int = 1000) -> tuple[LinearCode, int]:
    """Uniform generator conditioned on full rank and distance > floor(ell/3), plus the draw count."""
    if msg_len > code_len:
        raise DimensionError("message longer than the code")
    if msg_len > MAX_MSG_LEN:
        raise ValueError("message length too large to certify")
    threshold = code_len // 3
    for attempt in range(1, max_tries + 1):
        rows = [rng.randbits(code_len) for _ in range(msg_len)]
        if rank_int(rows) != msg_len:
            continue
        gen = BitMatrix(msg_len, code_len, rows)
        d = min_distance_bruteforce(gen)
        if d > threshold:
            return LinearCode(msg_len, code_len, gen, d), attempt
    raise SamplingError(f"no [{code_len},{msg_len}] code with distance > {threshold} in {max_tries} tries")


def sample_code(rng, msg_len: int, code_len: int, max_tries: int = 1000) -> LinearCode:
    return sample_code_counted(rng, msg_len, code_len, max_tries)[0]


def encode(code: LinearCode, m: BitVec) -> BitVec:
    if m.n != code.msg_len:
        raise DimensionError(f"message must be {code.msg_len} bits")
    word = 0
    v = m.v
    i = 0
    while v:
        if v & 1:
            word ^= code.generator.rows[i]
        v >>= 1
        i += 1
    return BitVec(code.code_len, word)


def within_radius(code: LinearCode, word: BitVec, codeword: BitVec) -> bool:
    return word.distance(codeword) <= code.radius


def decode_candidates(code: LinearCode, word: BitVec) -> list[BitVec]:
    """Messages whose codeword lies within the radius of ``word`` (brute force)."""
    out = []
    for m in range(1 << code.msg_len):
        msg = BitVec(code.msg_len, m)
        if within_radius(code, word, encode(code, msg)):
            out.append(msg)
    return out
