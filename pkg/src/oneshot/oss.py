"""One-shot signatures over the oracle suite, with measure-and-correct signing.

Signing keeps the key as a symbolic coset state. Each round measures the
message register, and for every position that disagrees with the target
codeword it goes to the Fourier side and measures the matching coordinate of
the dual oracle. That re-randomizes exactly the disagreeing positions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .coset_state import (
    AffineFunctional,
    SymbolicCosetState,
    hadamard_all,
    measure_bits,
    measure_functional,
    sample_support,
    uniform_over,
)
from .ecc import LinearCode, encode, sample_code, within_radius
from .gf2 import BitVec, DimensionError
from .lazy_random import DeterministicRng, derive_seed
from .oracle_suite import OracleSuite, Params


class KeyConsumedError(RuntimeError):
    """The signing key was already used."""


class InvariantViolation(AssertionError):
    """An internal guarantee of the signing procedure failed."""


@dataclass
class KeyPair:
    pk: BitVec
    sk: SymbolicCosetState
    spent: bool = False


@dataclass(frozen=True)
class Signature:
    sigma: BitVec
    message: BitVec

    def to_json(self) -> dict:
        return {"sigma": self.sigma.to_json(), "message": self.message.to_json()}


@dataclass
class RoundRecord:
    m_t: BitVec
    mismatch_count: int
    # debugging snapshots; only filled when sign(..., trace=True)
    after_measure: Optional[SymbolicCosetState] = None
    after_round: Optional[SymbolicCosetState] = None


@dataclass
class SignTranscript:
    rounds: list[RoundRecord] = field(default_factory=list)
    final_sigma: Optional[BitVec] = None
    final_mismatch: int = 0
    success: bool = False


def code_for(params: Params, seed: bytes) -> LinearCode:
    """The message code tied to a suite seed."""
    rng = DeterministicRng(derive_seed(seed, "ECC"), "ECC")
    return sample_code(rng, params.msg_len, params.ell_code)


def siggen(suite: OracleSuite, rng) -> KeyPair:
    x = rng.randbits(suite.n)
    y = BitVec(suite.r, suite.h_int(x))
    return KeyPair(y, uniform_over(suite.fiber_coset(y)))


def dual_functionals(suite, pk: BitVec, st: SymbolicCosetState, positions: list[int]) -> list[AffineFunctional]:
    """Pull the D-coordinates at ``positions`` back to affine functionals on st's support.

    D is linear on its accept set, so it suffices to query the support's basis
    and offset. Every query must be accepted or the support left the accept set.
    """
    k = st.k
    sub = st.subspace

    def query(v: int) -> int:
        c = suite.d_oracle(pk, BitVec(k, v))
        if c is None:
            raise InvariantViolation("dual-form support is not inside the accept set of D")
        return c.v

    at_offset = query(st.offset)
    on_basis = [query(b) for b in sub.basis]
    out = []
    for j in positions:
        lin = 0
        for piv, val in zip(sub.pivots, on_basis):
            if (val >> j) & 1:
                lin |= 1 << piv
        const = ((at_offset >> j) & 1) ^ (bin(lin & st.offset).count("1") & 1)
        out.append(AffineFunctional(lin, const))
    return out


def sign(
    suite: OracleSuite,
    keypair: KeyPair,
    message: BitVec,
    code: LinearCode,
    rng,
    *,
    rounds: Optional[int] = None,
    trace: bool = False,
) -> tuple[Signature, SignTranscript]:
    if keypair.spent:
        raise KeyConsumedError("this key has already signed")
    if code.code_len != suite.ell:
        raise DimensionError("code length must equal ell_code")
    keypair.spent = True
    rounds = suite.params.rounds if rounds is None else rounds
    k, ell = suite.k, suite.ell
    target = encode(code, message)
    tail = list(range(k - ell, k))
    st = keypair.sk
    transcript = SignTranscript()

    for _ in range(rounds):
        m_t, st = measure_bits(st, tail, rng)
        diff = m_t.v ^ target.v
        rec = RoundRecord(m_t, diff.bit_count())
        if trace:
            rec.after_measure = st
        if diff:
            st = hadamard_all(st)
            positions = [j for j in range(ell) if (diff >> j) & 1]
            for f in dual_functionals(suite, keypair.pk, st, positions):
                _, st = measure_functional(st, f, rng)  # outcome discarded
            st = hadamard_all(st)
        if trace:
            rec.after_round = st
        transcript.rounds.append(rec)

    sigma = BitVec(k, sample_support(st, rng))
    keypair.sk = None  # the state is gone after the final measurement
    transcript.final_sigma = sigma
    transcript.final_mismatch = sigma.slice(k - ell, k).distance(target)
    transcript.success = within_radius(code, sigma.slice(k - ell, k), target)
    return Signature(sigma, message), transcript


def verify(suite: OracleSuite, pk: BitVec, message: BitVec, sigma: BitVec, code: LinearCode) -> bool:
    if sigma.n != suite.k or pk.n != suite.r or message.n != code.msg_len:
        return False
    if suite.p_inverse(pk, sigma) is None:
        return False
    return within_radius(code, sigma.slice(suite.k - suite.ell, suite.k), encode(code, message))


def strong_unforgeability_witness(
    suite: OracleSuite, pk: BitVec, sig0: Signature, sig1: Signature
) -> Optional[tuple[BitVec, BitVec]]:
    """Two distinct signatures in pk's fiber give two preimages colliding under H."""
    if sig0.sigma == sig1.sigma:
        return None
    x0 = suite.p_inverse(pk, sig0.sigma)
    x1 = suite.p_inverse(pk, sig1.sigma)
    if x0 is None or x1 is None:
        raise ValueError("both signatures must lie in the fiber of pk")
    return x0, x1
