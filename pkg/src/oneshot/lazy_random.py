"""Deterministic randomness plus lazily sampled permutations and functions.

The byte stream is BLAKE2b in counter mode: block ``i`` is
``blake2b(key=seed, data=tag || i)``, 64 bytes each. It is fixed here and does
not depend on platform or Python hash seeds.
"""

from __future__ import annotations

import hashlib
import os
from typing import Callable, Generic, TypeVar

from .gf2 import BitVec, DimensionError

T = TypeVar("T")

SEED_ENV = "ONESHOT_SEED"
DEFAULT_SEED_HEX = "00" * 32


def parse_seed(text: str | bytes | None) -> bytes:
    """Accept a 64-char hex string (or raw 32 bytes); None falls back to the env var."""
    if text is None:
        text = os.environ.get(SEED_ENV, DEFAULT_SEED_HEX)
    if isinstance(text, bytes):
        if len(text) != 32:
            raise ValueError("seed must be 32 bytes")
        return text
    text = text.strip().lower()
    if len(text) != 64:
        raise ValueError("seed must be 64 hex characters")
    return bytes.fromhex(text)


def derive_seed(seed: bytes, *labels: str | int | bytes) -> bytes:
    h = hashlib.blake2b(key=seed, digest_size=32, person=b"oneshot-derive")
    for lab in labels:
        if isinstance(lab, int):
            lab = b"i" + lab.to_bytes(16, "little", signed=True)
        elif isinstance(lab, str):
            lab = b"s" + lab.encode()
        else:
            lab = b"b" + lab
        h.update(len(lab).to_bytes(4, "little"))
        h.update(lab)
    return h.digest()


class DeterministicRng:
    """Seeded bit source; identical (seed, tag, call sequence) gives identical output."""

    def __init__(self, seed: bytes, tag: str = ""):
        if len(seed) != 32:
            raise ValueError("seed must be 32 bytes")
        self.seed = seed
        self.tag = tag
        self._prefix = tag.encode() + b"\x00"
        self._counter = 0
        self._pool = 0  # buffered random bits
        self._pool_bits = 0

    @classmethod
    def from_hex(cls, hexseed: str, tag: str = "") -> "DeterministicRng":
        return cls(parse_seed(hexseed), tag)

    def child(self, *labels: str | int | bytes) -> "DeterministicRng":
        """Independent stream derived from (seed, tag, labels); does not consume from self."""
        return DeterministicRng(derive_seed(self.seed, self.tag, *labels), "/".join(map(str, labels)))

    def _refill(self) -> None:
        block = hashlib.blake2b(
            self._prefix + self._counter.to_bytes(8, "little"), key=self.seed
        ).digest()
        self._counter += 1
        self._pool |= int.from_bytes(block, "little") << self._pool_bits
        self._pool_bits += 512

    def randbits(self, k: int) -> int:
        if k < 0:
            raise ValueError("negative bit count")
        while self._pool_bits < k:
            self._refill()
        out = self._pool & ((1 << k) - 1)
        self._pool >>= k
        self._pool_bits -= k
        return out

    def randbelow(self, n: int) -> int:
        if n <= 0:
            raise ValueError("empty range")
        k = (n - 1).bit_length()
        while True:
            x = self.randbits(k)
            if x < n:
                return x

    def randbit(self) -> int:
        return self.randbits(1)

    def random(self) -> float:
        return self.randbits(53) / (1 << 53)

    def bitvec(self, n: int) -> BitVec:
        return BitVec(n, self.randbits(n))

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]

    def choice(self, seq):
        return seq[self.randbelow(len(seq))]


class LazyPermutation:
    """Uniform permutation of {0,1}^n, materialized only where queried."""

    def __init__(self, domain_bits: int, rng: DeterministicRng):
        self.domain_bits = domain_bits
        self.rng = rng
        self.forward_map: dict[int, int] = {}
        self.inverse_map: dict[int, int] = {}

    def _check(self, x: BitVec) -> None:
        if x.n != self.domain_bits:
            raise DimensionError(f"expected {self.domain_bits} bits, got {x.n}")

    def forward_int(self, x: int) -> int:
        y = self.forward_map.get(x)
        if y is None:
            # uniform among images not yet used
            while True:
                y = self.rng.randbits(self.domain_bits)
                if y not in self.inverse_map:
                    break
            self.forward_map[x] = y
            self.inverse_map[y] = x
        return y

    def inverse_int(self, y: int) -> int:
        x = self.inverse_map.get(y)
        if x is None:
            while True:
                x = self.rng.randbits(self.domain_bits)
                if x not in self.forward_map:
                    break
            self.forward_map[x] = y
            self.inverse_map[y] = x
        return x

    def forward(self, x: BitVec) -> BitVec:
        self._check(x)
        return BitVec(self.domain_bits, self.forward_int(x.v))

    def inverse(self, y: BitVec) -> BitVec:
        self._check(y)
        return BitVec(self.domain_bits, self.inverse_int(y.v))

    def __len__(self) -> int:
        return len(self.forward_map)


def perm_forward(p: LazyPermutation, x: BitVec) -> BitVec:
    return p.forward(x)


def perm_inverse(p: LazyPermutation, y: BitVec) -> BitVec:
    return p.inverse(y)


class LazyFunction(Generic[T]):
    """Random function with a fixed payload sampler.

    Each input gets its own RNG stream derived from (seed, tag, input), so the
    payload for ``y`` does not depend on which other inputs were queried first.
    """

    def __init__(self, seed: bytes, tag: str, sampler: Callable[[DeterministicRng], T]):
        self.seed = seed
        self.tag = tag
        self.sampler = sampler
        self.memo: dict[tuple[int, int], T] = {}

    def __call__(self, y: BitVec) -> T:
        key = (y.n, y.v)
        out = self.memo.get(key)
        if out is None:
            rng = DeterministicRng(derive_seed(self.seed, self.tag, y.n, y.v), self.tag)
            out = self.sampler(rng)
            self.memo[key] = out
        return out


def fn_query(f: LazyFunction[T], y: BitVec) -> T:
    return f(y)
