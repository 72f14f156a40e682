"""Sparse exact linear algebra over the rationals.

Vectors are dicts ``column -> Fraction`` without zero entries.  Column
order is the integer order, so callers encode priorities (e.g. canonical
cochain order) by how they number columns.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

SparseVec = dict[int, Fraction]


class InconsistentSystem(ValueError):
    """Raised by :func:`solve_particular`; ``row`` is a witness row index."""

    def __init__(self, row: int):
        super().__init__(f"inconsistent linear system (witness row {row})")
        self.row = row


def sparse(values: Iterable) -> SparseVec:
    return {i: Fraction(x) for i, x in enumerate(values) if x != 0}


def axpy(y: SparseVec, a: Fraction, x: Mapping[int, Fraction]) -> None:
    """y += a*x in place."""
    if a == 0:
        return
    for k, v in x.items():
        s = y.get(k, 0) + a * v
        if s:
            y[k] = s
        else:
            y.pop(k, None)


@dataclass
class RatMatrix:
    nrows: int
    ncols: int
    entries: dict[tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.entries = {k: Fraction(v) for k, v in self.entries.items() if v != 0}

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], ncols: int | None = None) -> RatMatrix:
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        entries = {}
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise ValueError("ragged matrix")
            for j, x in enumerate(row):
                if x != 0:
                    entries[i, j] = Fraction(x)
        return cls(len(rows), ncols, entries)

    @classmethod
    def from_sparse_rows(cls, rows: Sequence[Mapping[int, Fraction]], ncols: int) -> RatMatrix:
        entries = {(i, j): v for i, row in enumerate(rows) for j, v in row.items()}
        return cls(len(rows), ncols, entries)

    def row(self, i: int) -> SparseVec:
        return {j: v for (r, j), v in self.entries.items() if r == i}

    def sparse_rows(self) -> list[SparseVec]:
        rows: list[SparseVec] = [{} for _ in range(self.nrows)]
        for (i, j), v in self.entries.items():
            rows[i][j] = v
        return rows

    def to_dense(self) -> list[list[Fraction]]:
        out = [[Fraction(0)] * self.ncols for _ in range(self.nrows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def transpose(self) -> RatMatrix:
        return RatMatrix(self.ncols, self.nrows, {(j, i): v for (i, j), v in self.entries.items()})

    def apply(self, x: Sequence | Mapping[int, Fraction]) -> list[Fraction]:
        if not isinstance(x, Mapping):
            if len(x) != self.ncols:
                raise ValueError("dimension mismatch")
            x = sparse(x)
        out = [Fraction(0)] * self.nrows
        for (i, j), v in self.entries.items():
            if j in x:
                out[i] += v * x[j]
        return out


class Echelon:
    """Incrementally maintained reduced row echelon basis of a row space.

    Pivots are the smallest column of each row.  ``reduce`` returns the
    canonical residue of a vector modulo the span, which is zero exactly
    for members of the span.
    """

    def __init__(self) -> None:
        self.rows: dict[int, SparseVec] = {}  # pivot column -> row with leading 1

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def pivots(self) -> list[int]:
        return sorted(self.rows)

    def reduce(self, v: Mapping[int, Fraction]) -> SparseVec:
        v = {k: Fraction(x) for k, x in v.items() if x}
        if not self.rows:
            return v
        # stored rows vanish on every other pivot, so one pass suffices
        for p in [k for k in v if k in self.rows]:
            c = v.get(p)
            if c:
                axpy(v, -c, self.rows[p])
        return v

    def add(self, v: Mapping[int, Fraction]) -> bool:
        """Insert v; returns False if it was already in the span."""
        r = self.reduce(v)
        if not r:
            return False
        p = min(r)
        lead = r[p]
        r = {k: x / lead for k, x in r.items()}
        for row in self.rows.values():
            c = row.get(p)
            if c:
                axpy(row, -c, r)
        self.rows[p] = r
        return True

    def basis(self) -> list[SparseVec]:
        return [self.rows[p] for p in sorted(self.rows)]


def rref(m: RatMatrix) -> tuple[RatMatrix, list[int]]:
    ech = Echelon()
    for row in m.sparse_rows():
        ech.add(row)
    rows = ech.basis()
    return RatMatrix.from_sparse_rows(rows, m.ncols), ech.pivots


def rank(m: RatMatrix) -> int:
    return len(rref(m)[1])


def _kernel_sparse(rows: Sequence[Mapping[int, Fraction]], ncols: int) -> list[SparseVec]:
    ech = Echelon()
    for row in rows:
        ech.add(row)
    pivots = set(ech.rows)
    out = []
    for free in range(ncols):
        if free in pivots:
            continue
        v: SparseVec = {free: Fraction(1)}
        for p, row in ech.rows.items():
            c = row.get(free)
            if c:
                v[p] = -c
        out.append(v)
    return out


def kernel_basis(m: RatMatrix) -> list[list[Fraction]]:
    """Null space basis; one vector per free column, in column order."""
    out = []
    for v in _kernel_sparse(m.sparse_rows(), m.ncols):
        dense = [Fraction(0)] * m.ncols
        for j, x in v.items():
            dense[j] = x
        out.append(dense)
    return out


def solve_particular(m: RatMatrix, b: Sequence) -> list[Fraction]:
    """Solution of m x = b with every free variable set to zero."""
    if len(b) != m.nrows:
        raise ValueError(f"right-hand side has length {len(b)}, expected {m.nrows}")
    # column ncols carries b; a row reducing to it alone is a contradiction
    n = m.ncols
    ech = Echelon()
    for i, row in enumerate(m.sparse_rows()):
        aug = dict(row)
        if b[i] != 0:
            aug[n] = Fraction(b[i])
        r = ech.reduce(aug)
        if r and min(r) == n:
            raise InconsistentSystem(i)
        if r:
            ech.add(r)
    x = [Fraction(0)] * n
    for p, row in ech.rows.items():
        x[p] = row.get(n, Fraction(0))
    return x


class SubspaceSolver:
    """Coordinates of vectors in the span of fixed generators.

    Built once; ``coordinates(v)`` returns the unique combination of the
    (linearly independent) generators equal to v, or None.
    """

    def __init__(self, generators: Sequence[Mapping[int, Fraction]]):
        self.k = len(generators)
        self.ech = Echelon()
        # tag columns past every real column record the combination
        for i, g in enumerate(generators):
            row = dict(g)
            row[_TAG_BASE + i] = Fraction(-1)
            self.ech.add(row)

    def coordinates(self, v: Mapping[int, Fraction]) -> list[Fraction] | None:
        r = self.ech.reduce(dict(v))
        if any(k < _TAG_BASE for k in r):
            return None
        coords = [Fraction(0)] * self.k
        for k, x in r.items():
            coords[k - _TAG_BASE] = x
        return coords


_TAG_BASE = 1 << 40
