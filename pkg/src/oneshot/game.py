"""The two-signature forgery game against a budgeted classical query interface."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .ecc import LinearCode, decode_candidates
from .gf2 import BitVec
from .oss import Signature, sign, siggen, strong_unforgeability_witness, verify


class BudgetExceeded(RuntimeError):
    pass


class QueryInterface:
    """P, P^-1 and D with a shared query budget."""

    def __init__(self, suite, budget: int):
        self._suite = suite
        self.budget = budget
        self.used = 0
        self.n, self.r, self.k, self.ell = suite.n, suite.r, suite.k, suite.ell

    def _spend(self) -> None:
        if self.used >= self.budget:
            raise BudgetExceeded(f"budget of {self.budget} queries exhausted")
        self.used += 1

    def p(self, x: BitVec):
        self._spend()
        return self._suite.p_forward(x)

    def p_inv(self, y: BitVec, u: BitVec):
        self._spend()
        return self._suite.p_inverse(y, u)

    def d(self, y: BitVec, v: BitVec):
        self._spend()
        return self._suite.d_oracle(y, v)


@dataclass(frozen=True)
class Forgery:
    pk: BitVec
    sig0: Signature
    sig1: Signature


@dataclass
class GameOutcome:
    win: bool
    queries: int
    reason: str
    collision: Optional[tuple[BitVec, BitVec]] = None
    collision_valid: Optional[bool] = None

    def to_json(self) -> dict:
        return {
            "win": self.win,
            "queries": self.queries,
            "reason": self.reason,
            "collision_valid": self.collision_valid,
        }


Attacker = Callable[[QueryInterface, object], Optional[Forgery]]


def forgery_game(suite, attacker: Attacker, budget: int, code: LinearCode, rng) -> GameOutcome:
    iface = QueryInterface(suite, budget)
    try:
        forgery = attacker(iface, rng)
    except BudgetExceeded:
        return GameOutcome(False, iface.used, "budget exceeded")
    if forgery is None:
        return GameOutcome(False, iface.used, "no output")
    s0, s1 = forgery.sig0, forgery.sig1
    if s0.message == s1.message:
        return GameOutcome(False, iface.used, "messages coincide")
    if not (verify(suite, forgery.pk, s0.message, s0.sigma, code) and verify(suite, forgery.pk, s1.message, s1.sigma, code)):
        return GameOutcome(False, iface.used, "a signature does not verify")
    pair = strong_unforgeability_witness(suite, forgery.pk, s0, s1)
    ok = (
        pair is not None
        and pair[0] != pair[1]
        and suite.h(pair[0]) == forgery.pk
        and suite.h(pair[1]) == forgery.pk
    )
    return GameOutcome(True, iface.used, "two valid signatures", pair, ok)


# ---------------------------------------------------------------------------
# reference attackers


def honest_attacker(suite, code: LinearCode) -> Attacker:
    """Runs the real signer once and then claims the same sigma for a second message."""

    def attack(iface: QueryInterface, rng) -> Optional[Forgery]:
        kp = siggen(suite, rng)
        m0 = BitVec(code.msg_len, rng.randbits(code.msg_len))
        sig, _ = sign(suite, kp, m0, code, rng)
        m1 = BitVec(code.msg_len, m0.v ^ 1)
        return Forgery(kp.pk, sig, Signature(sig.sigma, m1))

    return attack


def brute_force_attacker(code: LinearCode) -> Attacker:
    """Walks the whole domain and stops at the first fiber holding two decodable points."""

    def attack(iface: QueryInterface, rng) -> Optional[Forgery]:
        k, ell = iface.k, iface.ell
        found: dict[BitVec, tuple[BitVec, BitVec]] = {}
        for x in range(1 << iface.n):
            out = iface.p(BitVec(iface.n, x))
            msgs = decode_candidates(code, out.u.slice(k - ell, k))
            if not msgs:
                continue
            prev = found.get(out.y)
            if prev is not None and prev[0] != msgs[0]:
                return Forgery(out.y, Signature(prev[1], prev[0]), Signature(out.u, msgs[0]))
            found.setdefault(out.y, (msgs[0], out.u))
        return None

    return attack


def random_guess_attacker(code: LinearCode) -> Attacker:
    """One forward query for a public key, then uniformly random guesses checked with P^-1."""

    def attack(iface: QueryInterface, rng) -> Optional[Forgery]:
        k, ell = iface.k, iface.ell
        out = iface.p(BitVec(iface.n, rng.randbits(iface.n)))
        valid: list[tuple[BitVec, BitVec]] = []

        def consider(u: BitVec) -> Optional[Forgery]:
            for msg in decode_candidates(code, u.slice(k - ell, k)):
                for m_prev, u_prev in valid:
                    if m_prev != msg:
                        return Forgery(out.y, Signature(u_prev, m_prev), Signature(u, msg))
                valid.append((msg, u))
            return None

        hit = consider(out.u)
        while hit is None and iface.used < iface.budget:
            guess = BitVec(k, rng.randbits(k))
            if iface.p_inv(out.y, guess) is not None:
                hit = consider(guess)
        return hit

    return attack

