"""Bit-packed linear algebra over Z_2.

Vectors are stored as Python ints with coordinate ``i`` at bit ``i`` (so index 0
is the least significant bit internally). Hex serialization is big-endian in
the other sense: the most significant bit of byte 0 holds coordinate 0.

Subspaces keep their basis in fully reduced row-echelon form with the pivot of
each row at its lowest set coordinate, which makes equal subspaces compare
bit-identical.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Optional, Sequence


class DimensionError(ValueError):
    """Operand shapes do not line up."""


class SamplingError(RuntimeError):
    """Rejection sampling ran out of retries."""


def _mask(n: int) -> int:
    return (1 << n) - 1


def parity(x: int) -> int:
    return x.bit_count() & 1


def _reverse_bits(x: int, width: int) -> int:
    if width == 0:
        return 0
    return int(format(x, f"0{width}b")[::-1], 2)


class BitVec:
    """Immutable fixed-length bit vector."""

    __slots__ = ("n", "v")

    def __init__(self, n: int, v: int = 0):
        if n < 0:
            raise ValueError("negative length")
        if v < 0 or v >> n:
            raise ValueError(f"value does not fit in {n} bits")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "v", v)

    def __setattr__(self, name, value):
        raise AttributeError("BitVec is immutable")

    @classmethod
    def zeros(cls, n: int) -> "BitVec":
        return cls(n, 0)

    @classmethod
    def unit(cls, n: int, i: int) -> "BitVec":
        if not 0 <= i < n:
            raise IndexError(i)
        return cls(n, 1 << i)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitVec":
        v = 0
        n = 0
        for i, b in enumerate(bits):
            if b not in (0, 1, True, False):
                raise ValueError(f"not a bit: {b!r}")
            v |= int(b) << i
            n = i + 1
        return cls(n, v)

    @classmethod
    def from_str(cls, s: str) -> "BitVec":
        """Parse a '0'/'1' string written in index order."""
        return cls.from_bits(int(c) for c in s)

    @classmethod
    def from_hex(cls, text: str, n: int) -> "BitVec":
        nbytes = (n + 7) // 8
        raw = bytes.fromhex(text)
        if len(raw) != nbytes:
            raise ValueError(f"expected {nbytes} hex bytes for {n} bits, got {len(raw)}")
        width = 8 * nbytes
        v = _reverse_bits(int.from_bytes(raw, "big"), width)
        if v >> n:
            raise ValueError("nonzero padding bits")
        return cls(n, v)

    def to_hex(self) -> str:
        width = 8 * ((self.n + 7) // 8)
        return _reverse_bits(self.v, width).to_bytes(width // 8, "big").hex()

    def to_json(self) -> dict:
        return {"len": self.n, "hex": self.to_hex()}

    @classmethod
    def from_json(cls, obj: dict) -> "BitVec":
        return cls.from_hex(obj["hex"], obj["len"])

    def bits(self) -> list[int]:
        return [(self.v >> i) & 1 for i in range(self.n)]

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits())

    def __repr__(self) -> str:
        return f"BitVec({self.n}, '{self}')"

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> int:
        if i < 0:
            i += self.n
        if not 0 <= i < self.n:
            raise IndexError(i)
        return (self.v >> i) & 1

    def __iter__(self) -> Iterator[int]:
        return iter(self.bits())

    def __eq__(self, other) -> bool:
        return isinstance(other, BitVec) and self.n == other.n and self.v == other.v

    def __hash__(self) -> int:
        return hash((self.n, self.v))

    def _check(self, other: "BitVec") -> None:
        if self.n != other.n:
            raise DimensionError(f"length mismatch {self.n} vs {other.n}")

    def __xor__(self, other: "BitVec") -> "BitVec":
        self._check(other)
        return BitVec(self.n, self.v ^ other.v)

    __add__ = __xor__

    def dot(self, other: "BitVec") -> int:
        self._check(other)
        return parity(self.v & other.v)

    def weight(self) -> int:
        return self.v.bit_count()

    def distance(self, other: "BitVec") -> int:
        self._check(other)
        return (self.v ^ other.v).bit_count()

    def slice(self, start: int, stop: int) -> "BitVec":
        if not 0 <= start <= stop <= self.n:
            raise IndexError((start, stop))
        return BitVec(stop - start, (self.v >> start) & _mask(stop - start))

    def concat(self, other: "BitVec") -> "BitVec":
        return BitVec(self.n + other.n, self.v | (other.v << self.n))

    def flip(self, i: int) -> "BitVec":
        return self ^ BitVec.unit(self.n, i)

    def is_zero(self) -> bool:
        return self.v == 0


class BitMatrix:
    """Immutable dense matrix over Z_2; row ``i`` is an int of ``cols`` bits."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, rows: Sequence[int]):
        rows = tuple(rows)
        if len(rows) != nrows:
            raise DimensionError(f"expected {nrows} rows, got {len(rows)}")
        for row in rows:
            if row < 0 or row >> ncols:
                raise ValueError("row does not fit in the column count")
        object.__setattr__(self, "nrows", nrows)
        object.__setattr__(self, "ncols", ncols)
        object.__setattr__(self, "rows", rows)

    def __setattr__(self, name, value):
        raise AttributeError("BitMatrix is immutable")

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, [1 << i for i in range(n)])

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "BitMatrix":
        return cls(nrows, ncols, [0] * nrows)

    @classmethod
    def from_rows(cls, rows: Sequence[BitVec]) -> "BitMatrix":
        if not rows:
            raise ValueError("use BitMatrix(0, ncols, []) for empty matrices")
        ncols = rows[0].n
        for r in rows:
            if r.n != ncols:
                raise DimensionError("ragged rows")
        return cls(len(rows), ncols, [r.v for r in rows])

    @classmethod
    def from_columns(cls, nrows: int, columns: Sequence[int]) -> "BitMatrix":
        """Build from column ints (each ``nrows`` bits)."""
        return BitMatrix(len(columns), nrows, columns).transpose()

    @classmethod
    def from_lists(cls, data: Sequence[Sequence[int]]) -> "BitMatrix":
        return cls.from_rows([BitVec.from_bits(row) for row in data])

    def row(self, i: int) -> BitVec:
        return BitVec(self.ncols, self.rows[i])

    def __getitem__(self, ij) -> int:
        i, j = ij
        return (self.rows[i] >> j) & 1

    def columns(self) -> list[int]:
        return list(self.transpose().rows)

    def to_lists(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.ncols)] for r in self.rows]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitMatrix)
            and self.nrows == other.nrows
            and self.ncols == other.ncols
            and self.rows == other.rows
        )

    def __hash__(self) -> int:
        return hash((self.nrows, self.ncols, self.rows))

    def __repr__(self) -> str:
        body = "; ".join(str(self.row(i)) for i in range(self.nrows))
        return f"BitMatrix({self.nrows}x{self.ncols}: {body})"

    def transpose(self) -> "BitMatrix":
        cols = [0] * self.ncols
        for i, row in enumerate(self.rows):
            j = 0
            while row:
                if row & 1:
                    cols[j] |= 1 << i
                row >>= 1
                j += 1
        return BitMatrix(self.ncols, self.nrows, cols)

    def row_block(self, start: int, stop: int) -> "BitMatrix":
        return BitMatrix(stop - start, self.ncols, self.rows[start:stop])

    def col_block(self, start: int, stop: int) -> "BitMatrix":
        m = _mask(stop - start)
        return BitMatrix(self.nrows, stop - start, [(r >> start) & m for r in self.rows])

    def hstack(self, other: "BitMatrix") -> "BitMatrix":
        if self.nrows != other.nrows:
            raise DimensionError("row count mismatch")
        return BitMatrix(
            self.nrows,
            self.ncols + other.ncols,
            [a | (b << self.ncols) for a, b in zip(self.rows, other.rows)],
        )

    def to_json(self) -> dict:
        return {
            "rows": self.nrows,
            "cols": self.ncols,
            "data": [BitVec(self.ncols, r).to_hex() for r in self.rows],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "BitMatrix":
        return cls(
            obj["rows"],
            obj["cols"],
            [BitVec.from_hex(h, obj["cols"]).v for h in obj["data"]],
        )


# ---------------------------------------------------------------------------
# raw int kernels


def mat_vec_int(rows: Sequence[int], z: int) -> int:
    out = 0
    for i, row in enumerate(rows):
        if parity(row & z):
            out |= 1 << i
    return out


def vec_mat_int(v: int, rows: Sequence[int]) -> int:
    """Row vector times matrix: XOR of the rows selected by ``v``."""
    out = 0
    i = 0
    while v:
        if v & 1:
            out ^= rows[i]
        v >>= 1
        i += 1
    return out


def rank_int(vectors: Iterable[int]) -> int:
    basis: dict[int, int] = {}
    for v in vectors:
        while v:
            hb = v.bit_length() - 1
            if hb in basis:
                v ^= basis[hb]
            else:
                basis[hb] = v
                break
    return len(basis)


class Eliminator:
    """Incremental basis that also tracks which input vectors combine to each element.

    ``add`` returns False when the vector is already in the span. ``express``
    finds a combination mask of the inserted vectors summing to a target.
    """

    __slots__ = ("_basis", "count")

    def __init__(self, vectors: Iterable[int] = ()):
        self._basis: dict[int, tuple[int, int]] = {}
        self.count = 0
        for v in vectors:
            self.add(v)

    def add(self, v: int) -> bool:
        combo = 1 << self.count
        self.count += 1
        while v:
            hb = v.bit_length() - 1
            entry = self._basis.get(hb)
            if entry is None:
                self._basis[hb] = (v, combo)
                return True
            v ^= entry[0]
            combo ^= entry[1]
        return False

    @property
    def rank(self) -> int:
        return len(self._basis)

    def express(self, target: int) -> Optional[int]:
        combo = 0
        v = target
        while v:
            hb = v.bit_length() - 1
            entry = self._basis.get(hb)
            if entry is None:
                return None
            v ^= entry[0]
            combo ^= entry[1]
        return combo

    def contains(self, target: int) -> bool:
        return self.express(target) is not None


def rref_int(vectors: Iterable[int]) -> tuple[int, ...]:
    """Fully reduced echelon basis, pivots at the lowest set bit, sorted by pivot."""
    rows: list[int] = []
    for v in vectors:
        for row in rows:
            if v & (row & -row):
                v ^= row
        if v:
            piv = v & -v
            rows = [r ^ v if r & piv else r for r in rows]
            rows.append(v)
    rows.sort(key=lambda r: (r & -r))
    return tuple(rows)


def reduce_int(v: int, rref_rows: Sequence[int]) -> int:
    for row in rref_rows:
        if v & (row & -row):
            v ^= row
    return v


# ---------------------------------------------------------------------------
# public operations


def rank(m: BitMatrix) -> int:
    return rank_int(m.rows)


def mat_vec(m: BitMatrix, z: BitVec) -> BitVec:
    if z.n != m.ncols:
        raise DimensionError(f"matrix has {m.ncols} columns, vector has {z.n} bits")
    return BitVec(m.nrows, mat_vec_int(m.rows, z.v))


def vec_mat(v: BitVec, m: BitMatrix) -> BitVec:
    if v.n != m.nrows:
        raise DimensionError(f"vector has {v.n} bits, matrix has {m.nrows} rows")
    return BitVec(m.ncols, vec_mat_int(v.v, m.rows))


def mat_mul(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    if a.ncols != b.nrows:
        raise DimensionError(f"cannot multiply {a.nrows}x{a.ncols} by {b.nrows}x{b.ncols}")
    return BitMatrix(a.nrows, b.ncols, [vec_mat_int(row, b.rows) for row in a.rows])


def transpose(m: BitMatrix) -> BitMatrix:
    return m.transpose()


def solve(m: BitMatrix, target: BitVec) -> Optional[BitVec]:
    """Some ``z`` with ``m @ z == target``, or None when target is outside the column span."""
    if target.n != m.nrows:
        raise DimensionError("target length must equal the row count")
    elim = Eliminator(m.columns())
    combo = elim.express(target.v)
    if combo is None:
        return None
    return BitVec(m.ncols, combo)


def coordinates(basis_rows: BitMatrix, v: BitVec) -> Optional[BitVec]:
    """Coefficients ``c`` with ``sum_j c_j * row_j == v``; rows must be independent."""
    if v.n != basis_rows.ncols:
        raise DimensionError("vector length must equal the column count")
    elim = Eliminator(basis_rows.rows)
    combo = elim.express(v.v)
    if combo is None:
        return None
    return BitVec(basis_rows.nrows, combo)


def random_matrix(rng, nrows: int, ncols: int) -> BitMatrix:
    return BitMatrix(nrows, ncols, [rng.randbits(ncols) for _ in range(nrows)])


def random_full_rank(
    rng,
    rows: int,
    cols: int,
    bottom_block: Optional[int] = None,
    *,
    block_cols: Optional[tuple[int, int]] = None,
    max_tries: int = 256,
) -> BitMatrix:
    """Uniform ``rows x cols`` matrix of column rank ``cols``.

    With ``bottom_block=lam`` the last ``lam`` rows must also have row rank
    ``lam``; ``block_cols=(start, stop)`` restricts that check to a column
    range. Rejection sampling keeps the output uniform on the constrained set.
    """
    if cols > rows:
        raise DimensionError(f"cannot have column rank {cols} with {rows} rows")
    start, stop = block_cols if block_cols is not None else (0, cols)
    if bottom_block is not None and not 0 <= bottom_block <= stop - start:
        raise DimensionError(f"bottom block {bottom_block} exceeds {stop - start} columns")
    bmask = _mask(stop - start)
    for _ in range(max_tries):
        m = random_matrix(rng, rows, cols)
        if rank_int(m.columns()) != cols:
            continue
        if bottom_block:
            block = [(r >> start) & bmask for r in m.rows[rows - bottom_block:]]
            if rank_int(block) != bottom_block:
                continue
        return m
    raise SamplingError(f"no valid {rows}x{cols} matrix after {max_tries} tries")


def invert(m: BitMatrix) -> BitMatrix:
    if m.nrows != m.ncols:
        raise DimensionError("only square matrices are invertible")
    n = m.nrows
    elim = Eliminator(m.columns())
    if elim.rank != n:
        raise ValueError("singular matrix")
    # column j of the inverse solves m @ x = e_j
    return BitMatrix.from_columns(n, [elim.express(1 << j) for j in range(n)])


class Subspace:
    """A linear subspace of Z_2^ambient held as an RREF basis."""

    __slots__ = ("ambient", "basis", "_dual")

    def __init__(self, ambient: int, generators: Iterable[int] = ()):
        gens = list(generators)
        for g in gens:
            if g < 0 or g >> ambient:
                raise DimensionError("generator outside the ambient space")
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "basis", rref_int(gens))
        object.__setattr__(self, "_dual", None)

    def __setattr__(self, name, value):
        raise AttributeError("Subspace is immutable")

    @classmethod
    def span(cls, ambient: int, vectors: Iterable[BitVec]) -> "Subspace":
        return cls(ambient, [v.v for v in vectors])

    @classmethod
    def zero(cls, ambient: int) -> "Subspace":
        return cls(ambient)

    @classmethod
    def full(cls, ambient: int) -> "Subspace":
        return cls(ambient, [1 << i for i in range(ambient)])

    @classmethod
    def column_span(cls, m: BitMatrix) -> "Subspace":
        return cls(m.nrows, m.columns())

    @classmethod
    def row_span(cls, m: BitMatrix) -> "Subspace":
        return cls(m.ncols, m.rows)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple((r & -r).bit_length() - 1 for r in self.basis)

    def basis_matrix(self) -> BitMatrix:
        return BitMatrix(self.dim, self.ambient, self.basis)

    def basis_vectors(self) -> list[BitVec]:
        return [BitVec(self.ambient, r) for r in self.basis]

    def reduce(self, v: int) -> int:
        return reduce_int(v, self.basis)

    def contains(self, v: BitVec | int) -> bool:
        x = v.v if isinstance(v, BitVec) else v
        return reduce_int(x, self.basis) == 0

    __contains__ = contains

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(b) for b in other.basis)

    def elements(self) -> Iterator[int]:
        """All 2^dim elements in Gray-code order."""
        x = 0
        yield x
        for i in range(1, 1 << self.dim):
            x ^= self.basis[(i & -i).bit_length() - 1]
            yield x

    def dual(self) -> "Subspace":
        if self._dual is None:
            pivots = set(self.pivots)
            gens = []
            for f in range(self.ambient):
                if f in pivots:
                    continue
                v = 1 << f
                for row in self.basis:
                    if (row >> f) & 1:
                        v |= row & -row
                gens.append(v)
            object.__setattr__(self, "_dual", Subspace(self.ambient, gens))
        return self._dual

    def random_element(self, rng) -> int:
        return vec_mat_int(rng.randbits(self.dim), self.basis) if self.dim else 0

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subspace)
            and self.ambient == other.ambient
            and self.basis == other.basis
        )

    def __hash__(self) -> int:
        return hash((self.ambient, self.basis))

    def __repr__(self) -> str:
        body = ", ".join(str(b) for b in self.basis_vectors())
        return f"Subspace(k={self.ambient}, dim={self.dim}: [{body}])"

    def to_json(self) -> dict:
        return {"ambient": self.ambient, "basis_rows": [BitVec(self.ambient, b).to_hex() for b in self.basis]}


def dual(s: Subspace) -> Subspace:
    return s.dual()


def _check_same_ambient(a: Subspace, b: Subspace) -> None:
    if a.ambient != b.ambient:
        raise DimensionError(f"ambient mismatch {a.ambient} vs {b.ambient}")


def joint_span(a: Subspace, b: Subspace) -> Subspace:
    _check_same_ambient(a, b)
    return Subspace(a.ambient, a.basis + b.basis)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    _check_same_ambient(a, b)
    return joint_span(a.dual(), b.dual()).dual()


class Coset:
    """Affine set ``offset + subspace`` with the offset reduced to its canonical representative."""

    __slots__ = ("subspace", "offset")

    def __init__(self, subspace: Subspace, offset: BitVec | int = 0):
        off = offset.v if isinstance(offset, BitVec) else offset
        if isinstance(offset, BitVec) and offset.n != subspace.ambient:
            raise DimensionError("offset length differs from the ambient dimension")
        if off < 0 or off >> subspace.ambient:
            raise DimensionError("offset outside the ambient space")
        object.__setattr__(self, "subspace", subspace)
        object.__setattr__(self, "offset", subspace.reduce(off))

    def __setattr__(self, name, value):
        raise AttributeError("Coset is immutable")

    @classmethod
    def from_affine(cls, a: BitMatrix, b: BitVec) -> "Coset":
        """The set ``ColSpan(a) + b``."""
        return cls(Subspace.column_span(a), b)

    @property
    def ambient(self) -> int:
        return self.subspace.ambient

    @property
    def dim(self) -> int:
        return self.subspace.dim

    def contains(self, v: BitVec | int) -> bool:
        x = v.v if isinstance(v, BitVec) else v
        return self.subspace.reduce(x) == self.offset

    __contains__ = contains

    def elements(self) -> Iterator[int]:
        for s in self.subspace.elements():
            yield s ^ self.offset

    def __eq__(self, other) -> bool:
        return isinstance(other, Coset) and self.subspace == other.subspace and self.offset == other.offset

    def __hash__(self) -> int:
        return hash((self.subspace, self.offset))

    def __repr__(self) -> str:
        return f"Coset(offset={BitVec(self.ambient, self.offset)}, {self.subspace!r})"


def affine_hull(points: Iterable[int], ambient: int) -> Optional[Coset]:
    """Smallest coset containing ``points`` (None for an empty input)."""
    it = iter(points)
    try:
        base = next(it)
    except StopIteration:
        return None
    return Coset(Subspace(ambient, [p ^ base for p in it]), base)


def is_coset(points: Iterable[int], ambient: int) -> bool:
    """Brute-force coset test: the set equals its own affine hull."""
    pts = set(points)
    if not pts:
        return False
    hull = affine_hull(pts, ambient)
    return len(pts) == 1 << hull.dim
