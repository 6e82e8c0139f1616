"""Exact sparse linear algebra over Q.

Matrices are stored row-major as ``{row: {col: Fraction}}`` with no stored
zeros. Elimination is fraction-free: every row is scaled to a primitive
integer vector, rows are combined as ``p*row - a*pivot_row`` and the content
is divided out again, so intermediate entries stay integral and small.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import DimensionMismatch

Vector = List[Fraction]


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


class RationalMatrix:
    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries=None):
        if rows < 0 or cols < 0:
            raise ValueError("matrix shape must be non-negative")
        self.rows = rows
        self.cols = cols
        self.entries: Dict[int, Dict[int, Fraction]] = {}
        if entries:
            for (i, j), v in entries.items():
                self[i, j] = v

    @classmethod
    def from_dense(cls, data: Sequence[Sequence]) -> "RationalMatrix":
        rows = len(data)
        cols = len(data[0]) if rows else 0
        m = cls(rows, cols)
        for i, row in enumerate(data):
            if len(row) != cols:
                raise DimensionMismatch("ragged dense matrix")
            for j, v in enumerate(row):
                if v:
                    m[i, j] = v
        return m

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: Optional[int] = None) -> "RationalMatrix":
        if rows is None:
            if not columns:
                raise DimensionMismatch("cannot infer row count from zero columns")
            rows = len(columns[0])
        m = cls(rows, len(columns))
        for j, col in enumerate(columns):
            if len(col) != rows:
                raise DimensionMismatch(f"column {j} has length {len(col)}, expected {rows}")
            for i, v in enumerate(col):
                if v:
                    m[i, j] = v
        return m

    def __setitem__(self, key, value):
        i, j = key
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"index {key} out of range for {self.rows}x{self.cols}")
        value = Fraction(value)
        row = self.entries.get(i)
        if value == 0:
            if row is not None:
                row.pop(j, None)
                if not row:
                    del self.entries[i]
            return
        if row is None:
            row = self.entries[i] = {}
        row[j] = value

    def __getitem__(self, key) -> Fraction:
        i, j = key
        return self.entries.get(i, {}).get(j, Fraction(0))

    def nnz(self) -> int:
        return sum(len(r) for r in self.entries.values())

    def to_dense(self) -> List[Vector]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for i, row in self.entries.items():
            for j, v in row.items():
                out[i][j] = v
        return out

    def matvec(self, v: Sequence) -> Vector:
        if len(v) != self.cols:
            raise DimensionMismatch(f"vector length {len(v)} != cols {self.cols}")
        out = [Fraction(0)] * self.rows
        for i, row in self.entries.items():
            out[i] = sum((c * v[j] for j, c in row.items()), Fraction(0))
        return out

    def transpose(self) -> "RationalMatrix":
        t = RationalMatrix(self.cols, self.rows)
        for i, row in self.entries.items():
            for j, v in row.items():
                t.entries.setdefault(j, {})[i] = v
        return t

    def __eq__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.entries) == (other.rows, other.cols, other.entries)

    def __repr__(self):
        return f"RationalMatrix({self.rows}x{self.cols}, nnz={self.nnz()})"


def _primitive(row: Dict[int, Fraction]) -> Dict[int, int]:
    den = 1
    for v in row.values():
        den = _lcm(den, v.denominator)
    ints = {j: int(v * den) for j, v in row.items()}
    g = 0
    for v in ints.values():
        g = gcd(g, v)
    if g > 1:
        ints = {j: v // g for j, v in ints.items()}
    return ints


def _echelon(rows: List[Dict[int, int]], ncols: int) -> List[Tuple[int, Dict[int, int]]]:
    """Fraction-free row echelon form.

    Returns ``[(pivot_col, row), ...]`` in increasing pivot order. Among the
    candidate rows for a column the one with the smallest pivot magnitude is
    used, which keeps the integer growth down on the very sparse bar matrices.
    """
    active = [r for r in rows if r]
    pivots: List[Tuple[int, Dict[int, int]]] = []
    for col in range(ncols):
        best = None
        for idx, r in enumerate(active):
            a = r.get(col)
            if a is not None and (best is None or abs(a) < abs(active[best][col])):
                best = idx
        if best is None:
            continue
        prow = active.pop(best)
        p = prow[col]
        survivors = []
        for r in active:
            a = r.get(col)
            if a is None:
                survivors.append(r)
                continue
            new = {j: p * v for j, v in r.items()}
            for j, v in prow.items():
                s = new.get(j, 0) - a * v
                if s:
                    new[j] = s
                else:
                    new.pop(j, None)
            if new:
                g = 0
                for v in new.values():
                    g = gcd(g, v)
                if g > 1:
                    new = {j: v // g for j, v in new.items()}
                survivors.append(new)
        active = survivors
        pivots.append((col, prow))
    return pivots


def _rref(pivots: List[Tuple[int, Dict[int, int]]]) -> List[Tuple[int, Dict[int, Fraction]]]:
    """Back-substitute an integer echelon form into reduced form over Q."""
    reduced: List[Tuple[int, Dict[int, Fraction]]] = []
    for col, row in reversed(pivots):
        p = row[col]
        r = {j: Fraction(v, p) for j, v in row.items()}
        for pcol, prow in reduced:
            a = r.get(pcol)
            if a is None:
                continue
            for j, v in prow.items():
                s = r.get(j, 0) - a * v
                if s:
                    r[j] = s
                else:
                    r.pop(j, None)
        reduced.append((col, r))
    reduced.reverse()
    return reduced


def _matrix_rows(M: RationalMatrix) -> List[Dict[int, int]]:
    return [_primitive(M.entries[i]) for i in sorted(M.entries)]


def rank(M: RationalMatrix) -> int:
    return len(_echelon(_matrix_rows(M), M.cols))


def kernel_basis(M: RationalMatrix) -> List[Vector]:
    """Exact null-space basis, one vector per free column (in column order)."""
    reduced = _rref(_echelon(_matrix_rows(M), M.cols))
    pivot_cols = {c for c, _ in reduced}
    basis = []
    for free in range(M.cols):
        if free in pivot_cols:
            continue
        v = [Fraction(0)] * M.cols
        v[free] = Fraction(1)
        for pcol, row in reduced:
            a = row.get(free)
            if a:
                v[pcol] = -a
        basis.append(v)
    return basis


def image_basis(M: RationalMatrix) -> List[Vector]:
    """Columns of ``M`` at the pivot positions; a basis of the column space."""
    pivots = _echelon(_matrix_rows(M), M.cols)
    dense_cols = M.transpose()
    out = []
    for col, _ in pivots:
        v = [Fraction(0)] * M.rows
        for i, val in dense_cols.entries.get(col, {}).items():
            v[i] = val
        out.append(v)
    return out


def rank_of_vectors(vectors: Iterable[Sequence], dim: int) -> int:
    rows = []
    for v in vectors:
        if len(v) != dim:
            raise DimensionMismatch(f"vector length {len(v)} != {dim}")
        row = {j: Fraction(x) for j, x in enumerate(v) if x}
        if row:
            rows.append(_primitive(row))
    return len(_echelon(rows, dim))


def in_span(v: Sequence, basis: Sequence[Sequence]) -> Tuple[bool, Optional[Vector]]:
    """Decide whether ``v`` lies in the span of ``basis``.

    Returns ``(True, coeffs)`` with ``sum(c_i * basis_i) == v`` exactly, or
    ``(False, None)``.
    """
    dim = len(v)
    for i, b in enumerate(basis):
        if len(b) != dim:
            raise DimensionMismatch(f"basis vector {i} has length {len(b)}, expected {dim}")
    k = len(basis)
    # columns: basis vectors then v; rows: coordinates
    rows = []
    for i in range(dim):
        row = {j: Fraction(b[i]) for j, b in enumerate(basis) if b[i]}
        if v[i]:
            row[k] = Fraction(v[i])
        if row:
            rows.append(_primitive(row))
    reduced = _rref(_echelon(rows, k + 1))
    if any(col == k for col, _ in reduced):
        return False, None
    coeffs = [Fraction(0)] * k
    for col, row in reduced:
        coeffs[col] = row.get(k, Fraction(0))
    return True, coeffs
