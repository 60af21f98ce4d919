"""Exact sparse linear algebra over the rationals.

Vectors are ``dict[int, Fraction]`` with no explicit zeros; matrices are lists
of such row vectors.  Everything here is deterministic: pivots are always the
smallest available column, so bases come out in reduced row-echelon form.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

Vec = dict


def _axpy(target: dict, coeff: Fraction, source: dict) -> None:
    # target += coeff * source, dropping zeros
    for c, v in source.items():
        nv = target.get(c, 0) + coeff * v
        if nv:
            target[c] = nv
        else:
            target.pop(c, None)


class Echelon:
    """Incrementally maintained reduced row-echelon basis of a row space."""

    def __init__(self) -> None:
        self.rows: dict[int, dict] = {}  # pivot column -> row with 1 at pivot

    def reduce(self, vec: dict) -> dict:
        # stored rows vanish at every other pivot, so one pass is enough
        v = dict(vec)
        for p in [c for c in v if c in self.rows]:
            _axpy(v, -v[p], self.rows[p])
        return v

    def add(self, vec: dict) -> bool:
        """Add a vector; return True if it enlarged the span."""
        v = self.reduce(vec)
        if not v:
            return False
        p = min(v)
        inv = 1 / Fraction(v[p])
        v = {c: x * inv for c, x in v.items()}
        for q, row in self.rows.items():
            if p in row:
                _axpy(row, -row[p], v)
        self.rows[p] = v
        return True

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def basis(self) -> list[dict]:
        return [self.rows[p] for p in sorted(self.rows)]

    def pivots(self) -> list[int]:
        return sorted(self.rows)


def rank(rows: Iterable[dict]) -> int:
    ech = Echelon()
    for r in rows:
        ech.add(r)
    return ech.rank


def rref(rows: Iterable[dict]) -> list[dict]:
    ech = Echelon()
    for r in rows:
        ech.add(r)
    return ech.basis()


def transpose(rows: list[dict]) -> dict[int, dict]:
    cols: dict[int, dict] = {}
    for i, r in enumerate(rows):
        for c, v in r.items():
            cols.setdefault(c, {})[i] = v
    return cols


def nullspace(rows: list[dict], ncols: int) -> list[dict]:
    """Basis of {x : rows . x = 0} in the canonical free-variable form."""
    basis = rref(rows)
    pivots = {min(r): r for r in basis}
    free = [c for c in range(ncols) if c not in pivots]
    out = []
    for f in free:
        x = {f: Fraction(1)}
        for p, r in pivots.items():
            v = r.get(f)
            if v:
                x[p] = -v
        out.append(x)
    return out


def solve(rows: list[dict], rhs: list, ncols: int) -> dict | None:
    """One solution of rows . x = rhs (free variables zero), or None."""
    ech = Echelon()
    aug = ncols  # column index used for the right-hand side
    for r, b in zip(rows, rhs):
        v = dict(r)
        if b:
            v[aug] = Fraction(b)
        ech.add(v)
    if aug in ech.rows:
        return None
    x = {}
    for p, r in ech.rows.items():
        b = r.get(aug)
        if b:
            x[p] = b
    return x


def matvec(rows: list[dict], x: dict) -> list:
    out = []
    for r in rows:
        s = Fraction(0)
        if len(r) < len(x):
            for c, v in r.items():
                xv = x.get(c)
                if xv:
                    s += v * xv
        else:
            for c, xv in x.items():
                v = r.get(c)
                if v:
                    s += v * xv
        out.append(s)
    return out


def dot(a: dict, b: dict) -> Fraction:
    if len(a) > len(b):
        a, b = b, a
    s = Fraction(0)
    for c, v in a.items():
        w = b.get(c)
        if w:
            s += v * w
    return s


def inverse(mat: list[list]) -> list[list[Fraction]]:
    """Dense inverse of a small square matrix."""
    n = len(mat)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]
