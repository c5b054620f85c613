"""Exhaustive structural checks shared by genuine and simulated oracle suites.

A suite needs ``n, r, k``, ``p_forward`` and ``p_inverse``. Optional extras are
checked when present: ``coset(y)`` (the claimed embedding), ``d_oracle`` and
``d_bloated`` (with ``ell`` and ``bloat_s``).
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Optional

from .gf2 import BitVec, Coset, Subspace, affine_hull, vec_mat_int

MAX_EXHAUSTIVE_N = 16


@dataclass
class BatteryReport:
    checks: dict[str, bool] = field(default_factory=dict)
    notes: dict[str, object] = field(default_factory=dict)

    def record(self, name: str, ok: bool) -> None:
        self.checks[name] = self.checks.get(name, True) and bool(ok)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {"passed": self.passed, "checks": dict(sorted(self.checks.items())), "notes": self.notes}


def _bottom_span_table(rows: list[int]) -> dict[int, int]:
    """Every combination of the given rows, mapped to its coefficient mask (by enumeration)."""
    table = {}
    for c in range(1 << len(rows)):
        acc = 0
        for j, row in enumerate(rows):
            if (c >> j) & 1:
                acc ^= row
        table.setdefault(acc, c)
    return table


def _check_dual(report: BatteryReport, name: str, query, y: BitVec, A_rows: list[int], ell: int, k: int, s: int) -> set[int]:
    """Compare a dual oracle against enumeration on all 2^k inputs; returns the accept set."""
    sub_rows = [row >> s for row in A_rows]
    table = _bottom_span_table(sub_rows[k - ell:])
    independent = len(table) == 1 << ell
    report.record(f"{name}_bottom_rows_independent", independent)
    accepted = set()
    for v in range(1 << k):
        w = 0
        for i in range(k):
            if (v >> i) & 1:
                w ^= sub_rows[i]
        want = table.get(w)
        got = query(y, BitVec(k, v))
        ok = (want is None and got is None) or (want is not None and got is not None and got.v == want)
        report.record(f"{name}_matches_enumeration", ok)
        if got is not None:
            accepted.add(v)
    return accepted


def suite_battery(suite, *, max_ys: Optional[int] = 8, check_rejects: bool = True) -> BatteryReport:
    """Enumerate all 2^n inputs and check injectivity, inversion, fiber geometry and dual oracles.

    ``max_ys`` limits the per-y checks that scan all 2^k candidate outputs.
    """
    n, r, k = suite.n, suite.r, suite.k
    if n > MAX_EXHAUSTIVE_N:
        raise ValueError(f"exhaustive battery limited to n <= {MAX_EXHAUSTIVE_N}")
    report = BatteryReport()
    m = n - r
    fibers: dict[int, set[int]] = defaultdict(set)
    images = set()
    for x in range(1 << n):
        out = suite.p_forward(BitVec(n, x))
        images.add((out.y.v, out.u.v))
        fibers[out.y.v].add(out.u.v)
        back = suite.p_inverse(out.y, out.u)
        report.record("inverse_law", back is not None and back.v == x)
    report.record("injective", len(images) == 1 << n)
    report.notes["image_ys"] = len(fibers)

    has_coset = hasattr(suite, "coset")
    ys = sorted(fibers)
    for y in ys:
        us = fibers[y]
        report.record("fiber_size", len(us) == 1 << m)
        hull = affine_hull(us, k)
        report.record("fiber_is_coset", hull is not None and len(us) == 1 << hull.dim)
        if has_coset:
            A, b = suite.coset(BitVec(r, y))
            claimed = Coset(Subspace.column_span(A), b)
            report.record("coset_matches_fiber", claimed == hull)
            report.record("embedding_full_column_rank", Subspace.column_span(A).dim == m)

    scan = ys if max_ys is None else ys[:max_ys]
    for y in scan:
        yv = BitVec(r, y)
        us = fibers[y]
        if check_rejects:
            for u in range(1 << k):
                got = suite.p_inverse(yv, BitVec(k, u))
                report.record("rejects_outside_fiber", (got is not None) == (u in us))
        if not has_coset:
            continue
        A, _ = suite.coset(yv)
        ell = getattr(suite, "ell", 0)
        plain = None
        if hasattr(suite, "d_oracle") and ell:
            plain = _check_dual(report, "D", suite.d_oracle, yv, list(A.rows), ell, k, 0)
            dual_cols = Subspace.column_span(A).dual()
            report.record("D_accepts_fiber_dual", all(v in plain for v in dual_cols.elements()))
            report.record("D_zero_on_fiber_dual", all(suite.d_oracle(yv, BitVec(k, v)).v == 0 for v in dual_cols.elements()))
        s = getattr(suite, "bloat_s", None)
        if s is not None and hasattr(suite, "d_bloated") and ell:
            bloated = _check_dual(report, "Dprime", suite.d_bloated, yv, list(A.rows), ell, k, s)
            if plain is not None:
                report.record("D_accept_within_Dprime", plain <= bloated)
    return report


def dual_accept_set(suite, y: BitVec) -> set[int]:
    """Brute-force accept set of D at y: v with v^T A in the span of the bottom rows."""
    A, _ = suite.coset(y)
    rows = list(A.rows)
    table = _bottom_span_table(rows[suite.k - suite.ell:])
    return {v for v in range(1 << suite.k) if vec_mat_int(v, rows) in table}
