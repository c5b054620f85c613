"""Claw-free permutations, the folding coset partition function, and the two reductions.

Layout conventions (all little-index-first):

* an input ``w`` of the folded function is n - r packets of lambda_c + 1 bits;
  packet i starts with its selector bit b_i followed by lambda_c effective bits;
* the output ``y`` concatenates the n - r images, lambda_c bits each;
* the folded vector is the n - r selector bits followed by the XOR of all
  effective parts (lambda_c bits).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Hashable, Optional

from .battery import BatteryReport
from .gf2 import (
    BitMatrix,
    BitVec,
    Coset,
    DimensionError,
    Eliminator,
    Subspace,
    affine_hull,
    random_full_rank,
    vec_mat_int,
)
from .lazy_random import DeterministicRng, LazyFunction, LazyPermutation, derive_seed
from .oracle_suite import PointOutput


class ReductionParamError(ValueError):
    pass


class ClawFreePermutation:
    """H*(b, x) = Pi_b(x) for two independent random permutations of lambda_c bits.

    The inverse tables act as the trapdoor; every trapdoor use is counted.
    """

    def __init__(self, bit_len: int, seed: bytes):
        self.bit_len = bit_len
        self.pi = (
            LazyPermutation(bit_len, DeterministicRng(derive_seed(seed, "PI0"), "PI0")),
            LazyPermutation(bit_len, DeterministicRng(derive_seed(seed, "PI1"), "PI1")),
        )
        self.trapdoor_calls = 0

    def eval_int(self, b: int, x: int) -> int:
        return self.pi[b].forward_int(x)

    def invert_int(self, b: int, y: int) -> int:
        self.trapdoor_calls += 1
        return self.pi[b].inverse_int(y)

    def claw_int(self, y: int) -> tuple[int, int]:
        """Both preimages of y without touching the counter (for analysis code only)."""
        return self.pi[0].inverse_int(y), self.pi[1].inverse_int(y)

    def claw(self, y: BitVec) -> tuple[BitVec, BitVec]:
        self.trapdoor_calls += 1
        x0, x1 = self.claw_int(y.v)
        return BitVec(self.bit_len, x0), BitVec(self.bit_len, x1)


def claw_eval(cf: ClawFreePermutation, b: int, x: BitVec) -> BitVec:
    if x.n != cf.bit_len:
        raise DimensionError(f"expected {cf.bit_len} bits")
    return BitVec(cf.bit_len, cf.eval_int(b, x.v))


class FoldingCPF:
    def __init__(self, n: int, r: int, seed: bytes):
        m = n - r
        if m <= 0 or n % m:
            raise ReductionParamError("need n - r > 0 dividing n")
        lam_c = n // m - 1
        if lam_c < 1:
            raise ReductionParamError("need n >= 2 (n - r)")
        self.n, self.r, self.m, self.lam_c = n, r, m, lam_c
        self.seed = seed
        self.instances = [ClawFreePermutation(lam_c, derive_seed(seed, "CFP", i)) for i in range(m)]

    @property
    def folded_len(self) -> int:
        return self.m + self.lam_c

    # -- int kernels ---------------------------------------------------------

    def _packets(self, w: int) -> list[tuple[int, int]]:
        width = self.lam_c + 1
        emask = (1 << self.lam_c) - 1
        out = []
        for i in range(self.m):
            p = (w >> (i * width)) & ((1 << width) - 1)
            out.append((p & 1, (p >> 1) & emask))
        return out

    def _assemble(self, parts: list[tuple[int, int]]) -> int:
        width = self.lam_c + 1
        w = 0
        for i, (b, e) in enumerate(parts):
            w |= (b | (e << 1)) << (i * width)
        return w

    def _split_y(self, y: int) -> list[int]:
        mask = (1 << self.lam_c) - 1
        return [(y >> (i * self.lam_c)) & mask for i in range(self.m)]

    def forward_int(self, w: int) -> tuple[int, int]:
        y = 0
        sel = 0
        acc = 0
        for i, (b, e) in enumerate(self._packets(w)):
            y |= self.instances[i].eval_int(b, e) << (i * self.lam_c)
            sel |= b << i
            acc ^= e
        return y, sel | (acc << self.m)

    def inverse_int(self, y: int, folded: int) -> Optional[int]:
        ys = self._split_y(y)
        parts = []
        acc = 0
        for i, inst in enumerate(self.instances):
            b = (folded >> i) & 1
            e = inst.invert_int(b, ys[i])
            parts.append((b, e))
            acc ^= e
        if acc != folded >> self.m:
            return None
        return self._assemble(parts)

    def inverse_missing_int(self, i_star: int, y: int, folded: int) -> Optional[int]:
        ys = self._split_y(y)
        parts: list[tuple[int, int]] = []
        acc = folded >> self.m
        for i, inst in enumerate(self.instances):
            b = (folded >> i) & 1
            if i == i_star:
                parts.append((b, 0))
                continue
            e = inst.invert_int(b, ys[i])
            parts.append((b, e))
            acc ^= e
        b_star = parts[i_star][0]
        if self.instances[i_star].eval_int(b_star, acc) != ys[i_star]:
            return None
        parts[i_star] = (b_star, acc)
        return self._assemble(parts)

    # -- BitVec interface ----------------------------------------------------

    def _check(self, v: BitVec, n: int) -> None:
        if v.n != n:
            raise DimensionError(f"expected {n} bits, got {v.n}")

    def q_forward(self, w: BitVec) -> tuple[BitVec, BitVec]:
        self._check(w, self.n)
        y, f = self.forward_int(w.v)
        return BitVec(self.r, y), BitVec(self.folded_len, f)

    def q_inverse(self, y: BitVec, folded: BitVec) -> Optional[BitVec]:
        self._check(y, self.r)
        self._check(folded, self.folded_len)
        w = self.inverse_int(y.v, folded.v)
        return None if w is None else BitVec(self.n, w)

    def q_inverse_missing(self, i_star: int, y: BitVec, folded: BitVec) -> Optional[BitVec]:
        if not 0 <= i_star < self.m:
            raise IndexError(i_star)
        self._check(y, self.r)
        self._check(folded, self.folded_len)
        w = self.inverse_missing_int(i_star, y.v, folded.v)
        return None if w is None else BitVec(self.n, w)

    # -- coset descriptions (analysis only; trapdoor counters untouched) -----

    def preimage_coset(self, y: int) -> tuple[BitMatrix, int, BitMatrix, int]:
        """(A_bar, b_bar, A_tilde, b_tilde) for output y.

        Preimages are A_bar r + b_bar over r in Z_2^(n-r); their folds are
        A_tilde r + b_tilde with the same r.
        """
        width = self.lam_c + 1
        cols_bar, cols_tilde = [], []
        b_bar = 0
        e_sum0 = 0
        for i, yi in enumerate(self._split_y(y)):
            e0, e1 = self.instances[i].claw_int(yi)
            p0 = e0 << 1
            p1 = 1 | (e1 << 1)
            cols_bar.append((p0 ^ p1) << (i * width))
            b_bar |= p0 << (i * width)
            e_sum0 ^= e0
            cols_tilde.append((1 << i) | ((e0 ^ e1) << self.m))
        A_bar = BitMatrix.from_columns(self.n, cols_bar)
        A_tilde = BitMatrix.from_columns(self.folded_len, cols_tilde)
        return A_bar, b_bar, A_tilde, e_sum0 << self.m


def claw_instances(cpf: FoldingCPF, w0: int, w1: int) -> list[int]:
    """Instances whose packets differ between two colliding inputs; each such packet pair is a claw."""
    p0, p1 = cpf._packets(w0), cpf._packets(w1)
    return [i for i in range(cpf.m) if p0[i] != p1[i]]


# ---------------------------------------------------------------------------
# dual-free suite simulated from a claw-free instance


@dataclass
class _Embed:
    C: BitMatrix
    d: int
    elim: Eliminator
    columns: list[int]


def _embed_sampler(k: int, width: int, d_bits: int):
    def sample(rng: DeterministicRng) -> _Embed:
        C = random_full_rank(rng, k, width)
        d = rng.randbits(d_bits)
        cols = C.columns()
        return _Embed(C, d, Eliminator(cols), cols)

    return sample


class DualFreeSuite:
    """(P, P^-1) built around a folding CPF; instance ``i_star`` is only ever evaluated forward."""

    ell = 0
    bloat_s = None

    def __init__(self, cpf: FoldingCPF, k: int, i_star: int, seed: bytes):
        if k < cpf.m + cpf.lam_c:
            raise ReductionParamError(f"need k >= (n - r) + lambda_c = {cpf.m + cpf.lam_c}")
        self.cpf = cpf
        self.n, self.r, self.k = cpf.n, cpf.r, k
        self.i_star = i_star
        self.gamma = LazyPermutation(cpf.n, DeterministicRng(derive_seed(seed, "GAMMA"), "GAMMA"))
        self.embed: LazyFunction[_Embed] = LazyFunction(seed, "CY", _embed_sampler(k, cpf.folded_len, k))

    def p_forward_int(self, x: int) -> tuple[int, int]:
        w = self.gamma.forward_int(x)
        y, folded = self.cpf.forward_int(w)
        e = self.embed(BitVec(self.r, y))
        return y, vec_mat_int(folded, e.columns) ^ e.d

    def p_forward(self, x: BitVec):
        if x.n != self.n:
            raise DimensionError(f"expected {self.n} bits")
        y, u = self.p_forward_int(x.v)
        return PointOutput(BitVec(self.r, y), BitVec(self.k, u))

    def p_inverse_int(self, y: int, u: int) -> Optional[int]:
        e = self.embed(BitVec(self.r, y))
        folded = e.elim.express(u ^ e.d)
        if folded is None:
            return None
        w = self.cpf.inverse_missing_int(self.i_star, y, folded)
        if w is None:
            return None
        x = self.gamma.inverse_int(w)
        if self.cpf.forward_int(self.gamma.forward_int(x))[0] != y:
            return None
        return x

    def p_inverse(self, y: BitVec, u: BitVec) -> Optional[BitVec]:
        if y.n != self.r or u.n != self.k:
            raise DimensionError("bad lengths")
        x = self.p_inverse_int(y.v, u.v)
        return None if x is None else BitVec(self.n, x)

    def h_int(self, x: int) -> int:
        return self.cpf.forward_int(self.gamma.forward_int(x))[0]

    def coset(self, y: BitVec) -> tuple[BitMatrix, BitVec]:
        """A_y = C_y A_tilde_y and b_y = C_y b_tilde_y + d_y (analysis view)."""
        e = self.embed(y)
        _, _, A_t, b_t = self.cpf.preimage_coset(y.v)
        A = BitMatrix.from_columns(self.k, [vec_mat_int(c, e.columns) for c in A_t.columns()])
        b = vec_mat_int(b_t, e.columns) ^ e.d
        return A, BitVec(self.k, b)

    def transport(self, x0: int, x1: int) -> tuple[int, int]:
        """Map a simulated H-collision to a collision of the folded function."""
        return self.gamma.forward_int(x0), self.gamma.forward_int(x1)


def simulate_dualfree_suite(cpf: FoldingCPF, k: int, rng: DeterministicRng) -> DualFreeSuite:
    i_star = rng.randbelow(cpf.m)
    seed = rng.randbits(256).to_bytes(32, "little")
    return DualFreeSuite(cpf, k, i_star, seed)


# ---------------------------------------------------------------------------
# bloated-dual suite simulated from a dual-free one


@dataclass
class _Outer:
    C: BitMatrix
    columns: list[int]
    elim: Eliminator  # for solving C v = u
    d: int
    tail: Eliminator  # bottom ell rows of the last t columns


class BloatedSuite:
    """Outer (P, P^-1, D') at (n, r, k, s) from an inner dual-free pair at (r + s, r, k - t), t = n - r - s."""

    def __init__(self, inner, n: int, r: int, k: int, s: int, ell: int, seed: bytes):
        t = n - r - s
        if t < 0 or s < 0:
            raise ReductionParamError("need 0 <= s <= n - r")
        if (inner.n, inner.r, inner.k) != (r + s, r, k - t):
            raise ReductionParamError(
                f"inner suite must have shape {(r + s, r, k - t)}, got {(inner.n, inner.r, inner.k)}"
            )
        if ell > t:
            raise ReductionParamError("need ell <= n - r - s")
        self.inner = inner
        self.n, self.r, self.k, self.ell = n, r, k, ell
        self.bloat_s = s
        self.t = t
        self.k_in = k - t
        self.gamma = LazyPermutation(n, DeterministicRng(derive_seed(seed, "GAMMA"), "GAMMA"))
        self.outer: LazyFunction[_Outer] = LazyFunction(seed, "FC", self._sample)

    def _sample(self, rng: DeterministicRng) -> _Outer:
        C = random_full_rank(rng, self.k, self.k, self.ell, block_cols=(self.k_in, self.k))
        cols = C.columns()
        mask = (1 << self.t) - 1
        tail = Eliminator(((row >> self.k_in) & mask) for row in C.rows[self.k - self.ell:])
        return _Outer(C, cols, Eliminator(cols), rng.randbits(self.t), tail)

    def _split_x(self, g: int) -> tuple[int, int]:
        rs = self.r + self.bloat_s
        return g & ((1 << rs) - 1), g >> rs

    def p_forward(self, x: BitVec):
        if x.n != self.n:
            raise DimensionError(f"expected {self.n} bits")
        x_bar, x_tilde = self._split_x(self.gamma.forward_int(x.v))
        inner_out = self.inner.p_forward(BitVec(self.r + self.bloat_s, x_bar))
        o = self.outer(inner_out.y)
        vec = inner_out.u.v | ((x_tilde ^ o.d) << self.k_in)
        return PointOutput(inner_out.y, BitVec(self.k, vec_mat_int(vec, o.columns)))

    def p_inverse(self, y: BitVec, u: BitVec) -> Optional[BitVec]:
        if y.n != self.r or u.n != self.k:
            raise DimensionError("bad lengths")
        o = self.outer(y)
        vec = o.elim.express(u.v)  # C is invertible, so this always succeeds
        u_bar = vec & ((1 << self.k_in) - 1)
        x_tilde = (vec >> self.k_in) ^ o.d
        x_bar = self.inner.p_inverse(y, BitVec(self.k_in, u_bar))
        if x_bar is None:
            return None
        g = x_bar.v | (x_tilde << (self.r + self.bloat_s))
        return BitVec(self.n, self.gamma.inverse_int(g))

    def d_bloated(self, y: BitVec, v: BitVec, s: Optional[int] = None) -> Optional[BitVec]:
        if s not in (None, self.bloat_s):
            raise ReductionParamError("the simulated D' only supports its own s")
        o = self.outer(y)
        w = vec_mat_int(v.v, o.C.rows) >> self.k_in
        c = o.tail.express(w)
        return None if c is None else BitVec(self.ell, c)

    def coset(self, y: BitVec) -> tuple[BitMatrix, BitVec]:
        """A(y) = C(y) diag(A_inner(y), I) and b(y) = C(y) (b_inner(y) || d(y))."""
        o = self.outer(y)
        A_in, b_in = self.inner.coset(y)
        cols = [vec_mat_int(c, o.columns) for c in A_in.columns()]
        cols += o.columns[self.k_in:]
        b = vec_mat_int(b_in.v | (o.d << self.k_in), o.columns)
        return BitMatrix.from_columns(self.k, cols), BitVec(self.k, b)

    def a1(self, y: BitVec) -> BitMatrix:
        o = self.outer(y)
        return o.C.col_block(self.k_in, self.k)

    def is_strong_collision(self, y: BitVec, u0: BitVec, u1: BitVec) -> bool:
        return not Subspace.column_span(self.a1(y)).contains(u0 ^ u1)

    def transport(self, x0: BitVec, x1: BitVec) -> tuple[BitVec, BitVec]:
        rs = self.r + self.bloat_s
        g0 = self.gamma.forward_int(x0.v) & ((1 << rs) - 1)
        g1 = self.gamma.forward_int(x1.v) & ((1 << rs) - 1)
        return BitVec(rs, g0), BitVec(rs, g1)


def simulate_bloated_from_dualfree(inner, n: int, r: int, k: int, s: int, ell: int, rng: DeterministicRng) -> BloatedSuite:
    seed = rng.randbits(256).to_bytes(32, "little")
    return BloatedSuite(inner, n, r, k, s, ell, seed)


# ---------------------------------------------------------------------------


@dataclass
class BirthdayResult:
    collision: Optional[tuple[int, int]]
    queries: int
    seen: dict = field(default_factory=dict, repr=False)


def collision_search_birthday(
    oracle: Callable[[int], Hashable], in_bits: int, rng, max_q: Optional[int] = None
) -> BirthdayResult:
    """Query distinct uniformly random inputs until two share an output.

    Returns after the first collision, after ``max_q`` queries, or once the
    whole domain has been queried.
    """
    domain = 1 << in_bits
    limit = domain if max_q is None else min(max_q, domain)
    seen_out: dict[Hashable, int] = {}
    asked: set[int] = set()
    while len(asked) < limit:
        x = rng.randbits(in_bits)
        if x in asked:
            continue
        asked.add(x)
        out = oracle(x)
        prev = seen_out.get(out)
        if prev is not None:
            return BirthdayResult((prev, x), len(asked))
        seen_out[out] = x
    return BirthdayResult(None, len(asked))


def fiber_of(cpf: FoldingCPF, y: int) -> Coset:
    A_bar, b_bar, _, _ = cpf.preimage_coset(y)
    return Coset(Subspace.column_span(A_bar), b_bar)


# ---------------------------------------------------------------------------
# exhaustive battery for the folded function


def cpf_battery(cpf: FoldingCPF):
    """Every structural property of Q checked over the full input space (n <= 16)."""
    if cpf.n > 16:
        raise ValueError("exhaustive CPF battery limited to n <= 16")
    rep = BatteryReport()
    fibers: dict[int, list[int]] = {}
    folds: dict[int, int] = {}
    for w in range(1 << cpf.n):
        y, f = cpf.forward_int(w)
        fibers.setdefault(y, []).append(w)
        folds[w] = f
        rep.record("round_trip", cpf.inverse_int(y, f) == w)
        # a corrupted sum must be rejected
        rep.record("corrupt_sum_rejected", cpf.inverse_int(y, f ^ (1 << cpf.m)) is None)
        # a flipped selector either rejects or lands on a different valid preimage
        w2 = cpf.inverse_int(y, f ^ 1)
        rep.record("corrupt_selector_safe", w2 is None or (w2 != w and cpf.forward_int(w2) == (y, f ^ 1)))
    rep.record("all_outputs_reached", len(fibers) == 1 << cpf.r)

    for y, ws in fibers.items():
        rep.record("fiber_size", len(ws) == 1 << cpf.m)
        hull = affine_hull(ws, cpf.n)
        rep.record("fiber_is_coset", hull is not None and len(ws) == 1 << hull.dim)
        A_bar, b_bar, A_t, b_t = cpf.preimage_coset(y)
        rep.record("claimed_coset_matches", Coset(Subspace.column_span(A_bar), b_bar) == hull)
        elim = Eliminator(A_bar.columns())
        t_cols = A_t.columns()
        for w in ws:
            coords = elim.express(w ^ b_bar)
            rep.record("coordinates_are_selectors", coords == folds[w] & ((1 << cpf.m) - 1))
            rep.record("fold_is_affine_in_coordinates", vec_mat_int(coords, t_cols) ^ b_t == folds[w])

    for i_star in range(cpf.m):
        before = cpf.instances[i_star].trapdoor_calls
        for y in range(1 << cpf.r):
            for f in range(1 << cpf.folded_len):
                a = cpf.inverse_missing_int(i_star, y, f)
                b = cpf.inverse_int(y, f)
                rep.record("missing_matches_full", a == b)
        # the full inverse above does touch i_star; count only the missing-variant calls
        calls = cpf.instances[i_star].trapdoor_calls - before - (1 << (cpf.r + cpf.folded_len))
        rep.record("withheld_trapdoor_untouched", calls == 0)
    return rep


def claw_index_counts(cpf: FoldingCPF, rng, collisions: int) -> list[int]:
    """Random collisions of Q (two distinct preimages of a random output); tally claw instances."""
    counts = [0] * cpf.m
    for _ in range(collisions):
        y = rng.randbits(cpf.r)
        A_bar, b_bar, _, _ = cpf.preimage_coset(y)
        cols = A_bar.columns()
        c0 = rng.randbits(cpf.m)
        c1 = c0
        while c1 == c0:
            c1 = rng.randbits(cpf.m)
        w0 = vec_mat_int(c0, cols) ^ b_bar
        w1 = vec_mat_int(c1, cols) ^ b_bar
        for i in claw_instances(cpf, w0, w1):
            counts[i] += 1
    return counts
