"""The classical oracles P, P^-1, D and the bloated dual D'.

``Pi`` is a lazy permutation of {0,1}^n. For an input x the low r bits of
Pi(x) form y = H(x) and the remaining n - r bits form J(x). Each y owns an
affine embedding u = A(y) z + b(y) of Z_2^(n-r) into Z_2^k, drawn from a lazy
random function.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from typing import Optional

from .gf2 import BitMatrix, BitVec, Coset, DimensionError, Eliminator, Subspace, random_full_rank, vec_mat_int
from .lazy_random import DeterministicRng, LazyFunction, LazyPermutation, derive_seed, parse_seed


class ParamError(ValueError):
    pass


@dataclass(frozen=True)
class Params:
    lam: int
    s: int
    r: int
    n: int
    k: int
    ell_code: int
    rounds: int = 3
    bloat_s: Optional[int] = None
    msg_len: int = 3  # message bits fed to the code (lambda')

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise ParamError("; ".join(problems))

    def problems(self) -> list[str]:
        out = []
        if min(self.lam, self.s, self.r, self.n, self.k, self.ell_code, self.rounds, self.msg_len) < 0:
            out.append("negative parameter")
        # r == n (zero-dimensional fibers) only shows up as the inner instance of the s = 0 bloating
        if not self.r <= self.n:
            out.append("need r <= n")
        if self.n - self.r < self.ell_code:
            out.append("need n - r >= ell_code")
        if self.k < self.n - self.r:
            out.append("need k >= n - r so A(y) can have full column rank")
        if self.ell_code > self.k:
            out.append("need ell_code <= k")
        if self.msg_len > self.ell_code:
            out.append("need msg_len <= ell_code")
        if self.bloat_s is not None and not 0 <= self.bloat_s <= self.n - self.r - self.ell_code:
            out.append("need 0 <= bloat_s <= n - r - ell_code")
        return out

    @property
    def m(self) -> int:
        """Dimension n - r of each fiber."""
        return self.n - self.r

    def to_json(self) -> dict:
        d = dataclasses.asdict(self)
        d["lambda"] = d.pop("lam")
        return d

    @classmethod
    def from_json(cls, obj: dict) -> "Params":
        fields = {f.name for f in dataclasses.fields(cls)}
        d = {("lam" if k == "lambda" else k): v for k, v in obj.items()}
        unknown = set(d) - fields - {"seed"}
        if unknown:
            raise ParamError(f"unknown parameter fields: {sorted(unknown)}")
        d.pop("seed", None)
        return cls(**d)


def reference_params(lam: int) -> Params:
    """Asymptotic parameter shape at a given lambda, with k widened to n - r + lambda."""
    s = 16 * lam
    r = s * (lam - 1)
    n = r + (3 * s) // 2
    k = n - r + lam
    return Params(lam=lam, s=s, r=r, n=n, k=k, ell_code=lam, msg_len=max(1, lam // 4))


def toy_params(**overrides) -> Params:
    base = dict(lam=12, s=14, r=6, n=20, k=16, ell_code=12, rounds=3, msg_len=3)
    base.update(overrides)
    return Params(**base)


@dataclass(frozen=True)
class PointOutput:
    y: BitVec
    u: BitVec


class _Fiber:
    """Per-y embedding with the eliminations the oracles need, computed once."""

    __slots__ = ("A", "b", "columns", "cols", "bottom", "bloat")

    def __init__(self, A: BitMatrix, b: BitVec, ell: int, bloat_s: Optional[int]):
        self.A = A
        self.b = b
        self.columns = A.columns()
        self.cols = Eliminator(self.columns)
        k = A.nrows
        self.bottom = Eliminator(A.rows[k - ell:])
        self.bloat: dict[int, Eliminator] = {}
        if bloat_s is not None:
            self.bloat_block(bloat_s)

    def bloat_block(self, s: int) -> Eliminator:
        elim = self.bloat.get(s)
        if elim is None:
            m = self.A.ncols
            mask = (1 << (m - s)) - 1
            k = self.A.nrows
            ell = self.bottom.count
            elim = Eliminator(((row >> s) & mask) for row in self.A.rows[k - ell:])
            if elim.rank != ell:
                raise ParamError(f"bottom rows of the last {m - s} columns are not full rank for this y")
            self.bloat[s] = elim
        return elim


class OracleSuite:
    def __init__(self, params: Params, seed: bytes | str):
        self.params = params
        self.seed = parse_seed(seed) if isinstance(seed, str) else seed
        p = params
        self.n, self.r, self.k, self.ell = p.n, p.r, p.k, p.ell_code
        self.bloat_s = p.bloat_s
        self.pi = LazyPermutation(p.n, DeterministicRng(derive_seed(self.seed, "PI"), "PI"))
        self.coset_fn: LazyFunction[_Fiber] = LazyFunction(self.seed, "F", self._sample_fiber)
        self.queries = {"P": 0, "Pinv": 0, "D": 0}

    def _sample_fiber(self, rng: DeterministicRng) -> _Fiber:
        p = self.params
        m = p.m
        if p.bloat_s is not None:
            A = random_full_rank(rng, p.k, m, p.ell_code, block_cols=(p.bloat_s, m))
        else:
            A = random_full_rank(rng, p.k, m, p.ell_code)
        b = rng.bitvec(p.k)
        return _Fiber(A, b, p.ell_code, p.bloat_s)

    @classmethod
    def from_json(cls, obj: dict) -> "OracleSuite":
        return cls(Params.from_json(obj), parse_seed(obj["seed"]))

    def to_json(self) -> dict:
        d = self.params.to_json()
        d["seed"] = self.seed.hex()
        return d

    # -- H and the embedding -------------------------------------------------

    def h_int(self, x: int) -> int:
        return self.pi.forward_int(x) & ((1 << self.r) - 1)

    def h(self, x: BitVec) -> BitVec:
        self._len(x, self.n)
        return BitVec(self.r, self.h_int(x.v))

    def fiber(self, y: BitVec) -> _Fiber:
        return self.coset_fn(y)

    def coset(self, y: BitVec) -> tuple[BitMatrix, BitVec]:
        self._len(y, self.r)
        f = self.coset_fn(y)
        return f.A, f.b

    def fiber_coset(self, y: BitVec) -> Coset:
        A, b = self.coset(y)
        return Coset(Subspace.column_span(A), b)

    @staticmethod
    def _len(v: BitVec, n: int) -> None:
        if v.n != n:
            raise DimensionError(f"expected {n} bits, got {v.n}")

    # -- oracles ------------------------------------------------------------

    def p_forward(self, x: BitVec) -> PointOutput:
        self._len(x, self.n)
        self.queries["P"] += 1
        full = self.pi.forward_int(x.v)
        y = BitVec(self.r, full & ((1 << self.r) - 1))
        z = full >> self.r
        f = self.coset_fn(y)
        u = vec_mat_int(z, f.columns) ^ f.b.v
        return PointOutput(y, BitVec(self.k, u))

    def p_inverse(self, y: BitVec, u: BitVec) -> Optional[BitVec]:
        self._len(y, self.r)
        self._len(u, self.k)
        self.queries["Pinv"] += 1
        f = self.coset_fn(y)
        z = f.cols.express(u.v ^ f.b.v)
        if z is None:
            return None
        return BitVec(self.n, self.pi.inverse_int(y.v | (z << self.r)))

    def d_oracle(self, y: BitVec, v: BitVec) -> Optional[BitVec]:
        self._len(y, self.r)
        self._len(v, self.k)
        self.queries["D"] += 1
        f = self.coset_fn(y)
        c = f.bottom.express(vec_mat_int(v.v, f.A.rows))
        return None if c is None else BitVec(self.ell, c)

    def d_bloated(self, y: BitVec, v: BitVec, s: Optional[int] = None) -> Optional[BitVec]:
        """Dual check against the last n - r - s columns of A(y) only."""
        if s is None:
            s = self.bloat_s
        if s is None:
            raise ParamError("bloat_s is not configured")
        self._len(y, self.r)
        self._len(v, self.k)
        self.queries["D"] += 1
        f = self.coset_fn(y)
        elim = f.bloat_block(s)
        w = vec_mat_int(v.v, f.A.rows) >> s
        c = elim.express(w)
        return None if c is None else BitVec(self.ell, c)

    def a1(self, y: BitVec) -> BitMatrix:
        s = self.bloat_s or 0
        A, _ = self.coset(y)
        return A.col_block(s, A.ncols)


def suite_from_params_file(path: str, seed: bytes) -> OracleSuite:
    with open(path) as fh:
        return OracleSuite(Params.from_json(json.load(fh)), seed)
