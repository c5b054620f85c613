"""Exact simulation of real coset states  sum_{u in a+S} (-1)^<z,u> |u>.

The symbolic form is (S, a, z) with a reduced mod S and z reduced mod S^perp;
the global sign is dropped. ``DenseState`` is a brute-force integer
statevector used only to cross-check the symbolic rules at small k.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

import numpy as np

from .gf2 import BitVec, Coset, DimensionError, Subspace, parity

DENSE_MAX_K = 16


@dataclass(frozen=True)
class AffineFunctional:
    linear: int  # k-bit mask
    constant: int = 0

    def __call__(self, u: int) -> int:
        return parity(self.linear & u) ^ self.constant

    @classmethod
    def bit(cls, i: int) -> "AffineFunctional":
        return cls(1 << i, 0)


class SymbolicCosetState:
    __slots__ = ("k", "support", "phase")

    def __init__(self, k: int, support: Coset, phase: int = 0):
        if support.ambient != k:
            raise DimensionError("support lives in the wrong ambient space")
        self.k = k
        self.support = support
        self.phase = support.subspace.dual().reduce(phase)

    @property
    def subspace(self) -> Subspace:
        return self.support.subspace

    @property
    def offset(self) -> int:
        return self.support.offset

    def key(self) -> tuple:
        return (self.k, self.subspace.basis, self.offset, self.phase)

    def __eq__(self, other) -> bool:
        return isinstance(other, SymbolicCosetState) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return (
            f"SymbolicCosetState(k={self.k}, dim={self.subspace.dim}, "
            f"offset={BitVec(self.k, self.offset)}, phase={BitVec(self.k, self.phase)})"
        )

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "basis_rows": [BitVec(self.k, b).to_hex() for b in self.subspace.basis],
            "offset": BitVec(self.k, self.offset).to_hex(),
            "phase": BitVec(self.k, self.phase).to_hex(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SymbolicCosetState":
        k = obj["k"]
        sub = Subspace(k, [BitVec.from_hex(h, k).v for h in obj["basis_rows"]])
        return cls(
            k,
            Coset(sub, BitVec.from_hex(obj["offset"], k).v),
            BitVec.from_hex(obj["phase"], k).v,
        )


def uniform_over(c: Coset) -> SymbolicCosetState:
    return SymbolicCosetState(c.ambient, c, 0)


def hadamard_all(st: SymbolicCosetState) -> SymbolicCosetState:
    dual = st.subspace.dual()
    # support moves to z + S^perp and the old offset becomes the phase
    return SymbolicCosetState(st.k, Coset(dual, st.phase), st.offset)


def _slice(st: SymbolicCosetState, f: AffineFunctional) -> Optional[tuple[Subspace, int]]:
    """(S cap ker f.linear, a vector s0 in S with <l,s0>=1), or None if f is constant on the support."""
    basis = st.subspace.basis
    hit = [b for b in basis if parity(b & f.linear)]
    if not hit:
        return None
    s0 = hit[0]
    kept = [b for b in basis if not parity(b & f.linear)] + [b ^ s0 for b in hit[1:]]
    return Subspace(st.k, kept), s0


def measurement_branches(st: SymbolicCosetState, f: AffineFunctional) -> list[tuple[int, Fraction, SymbolicCosetState]]:
    """All outcomes with nonzero probability, each with its exact probability and post-state."""
    base = f(st.offset)
    sl = _slice(st, f)
    if sl is None:
        return [(base, Fraction(1), st)]
    sub, s0 = sl
    out = []
    for outcome in (0, 1):
        off = st.offset if outcome == base else st.offset ^ s0
        out.append((outcome, Fraction(1, 2), SymbolicCosetState(st.k, Coset(sub, off), st.phase)))
    return out


def measure_functional(st: SymbolicCosetState, f: AffineFunctional, rng) -> tuple[int, SymbolicCosetState]:
    branches = measurement_branches(st, f)
    if len(branches) == 1:
        return branches[0][0], branches[0][2]
    pick = rng.randbit()
    return branches[pick][0], branches[pick][2]


def _check_indices(k: int, indices: Sequence[int]) -> None:
    for i in indices:
        if not 0 <= i < k:
            raise IndexError(f"qubit index {i} outside 0..{k - 1}")


def measure_bits(st: SymbolicCosetState, indices: Sequence[int], rng) -> tuple[BitVec, SymbolicCosetState]:
    _check_indices(st.k, indices)
    bits = []
    for i in indices:
        b, st = measure_functional(st, AffineFunctional.bit(i), rng)
        bits.append(b)
    return BitVec.from_bits(bits) if bits else BitVec(0), st


def bits_branches(st: SymbolicCosetState, indices: Sequence[int]) -> list[tuple[BitVec, Fraction, SymbolicCosetState]]:
    """Joint measurement of several qubits, fully enumerated."""
    _check_indices(st.k, indices)
    frontier = [((), Fraction(1), st)]
    for i in indices:
        nxt = []
        for bits, p, cur in frontier:
            for b, q, post in measurement_branches(cur, AffineFunctional.bit(i)):
                nxt.append((bits + (b,), p * q, post))
        frontier = nxt
    return [(BitVec.from_bits(bits) if bits else BitVec(0), p, s) for bits, p, s in frontier]


def sample_support(st: SymbolicCosetState, rng) -> int:
    """A full computational-basis measurement (uniform over the support)."""
    return st.offset ^ st.subspace.random_element(rng)


# ---------------------------------------------------------------------------
# dense oracle

_PARITY_CACHE: dict[int, np.ndarray] = {}


def _parities(k: int, mask: int) -> np.ndarray:
    idx = _PARITY_CACHE.get(k)
    if idx is None:
        idx = np.arange(1 << k, dtype=np.uint32)
        _PARITY_CACHE[k] = idx
    return (np.bitwise_count(idx & np.uint32(mask)) & 1).astype(np.int64)


class DenseState:
    """Real statevector with amplitudes amps[u] / sqrt(norm); sum amps^2 == norm exactly."""

    __slots__ = ("k", "amps", "norm")

    def __init__(self, k: int, amps: np.ndarray, norm: int):
        if k > DENSE_MAX_K:
            raise ValueError(f"dense states are limited to k <= {DENSE_MAX_K}")
        amps = np.asarray(amps, dtype=np.int64)
        sq = int((amps * amps).sum())
        if sq != norm:
            raise ValueError("amplitudes are not normalized")
        g = gcd(*(int(x) for x in np.unique(np.abs(amps)))) if amps.any() else 0
        if g > 1:
            amps = amps // g
            norm //= g * g
        self.k = k
        self.amps = amps
        self.norm = norm

    def hadamard_all(self) -> "DenseState":
        a = self.amps.copy()
        h = 1
        n = a.shape[0]
        while h < n:
            a = a.reshape(-1, 2, h)
            lo = a[:, 0, :].copy()
            hi = a[:, 1, :]
            a[:, 0, :] = lo + hi
            a[:, 1, :] = lo - hi
            a = a.reshape(n)
            h *= 2
        return DenseState(self.k, a, self.norm * (1 << self.k))

    def branches(self, f: AffineFunctional) -> list[tuple[int, Fraction, "DenseState"]]:
        vals = _parities(self.k, f.linear) ^ f.constant
        out = []
        for outcome in (0, 1):
            kept = np.where(vals == outcome, self.amps, 0)
            mass = int((kept * kept).sum())
            if mass:
                out.append((outcome, Fraction(mass, self.norm), DenseState(self.k, kept, mass)))
        return out

    def support(self) -> set[int]:
        return set(int(i) for i in np.nonzero(self.amps)[0])


def to_dense(st: SymbolicCosetState) -> DenseState:
    if st.k > DENSE_MAX_K:
        raise ValueError(f"to_dense needs k <= {DENSE_MAX_K}")
    amps = np.zeros(1 << st.k, dtype=np.int64)
    for u in st.support.elements():
        amps[u] = -1 if parity(st.phase & u) else 1
    return DenseState(st.k, amps, 1 << st.subspace.dim)


def dense_equal_up_to_global_sign(a: DenseState, b: DenseState) -> bool:
    if a.k != b.k or a.norm != b.norm:
        return False
    return bool(np.array_equal(a.amps, b.amps) or np.array_equal(a.amps, -b.amps))


def random_state(k: int, rng, dim: Optional[int] = None) -> SymbolicCosetState:
    """Random subspace, offset and phase; ``dim`` defaults to a uniform choice in 0..k."""
    if dim is None:
        dim = rng.randbelow(k + 1)
    gens: list[int] = []
    while Subspace(k, gens).dim < dim:
        gens.append(rng.randbits(k))
    sub = Subspace(k, gens)
    return SymbolicCosetState(k, Coset(sub, rng.randbits(k)), rng.randbits(k))
