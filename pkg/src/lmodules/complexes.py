"""Finite complexes in a semisimple category, stored cell by cell.

A cell is one copy of an irreducible in some degree.  The differential only
connects cells of the same irreducible type (Schur), so every computation
splits into independent blocks of ordinary rational vector spaces, one per
type.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from fractions import Fraction

from . import linalg
from .linalg import Echelon


class ComplexError(ValueError):
    pass


def kernel(cols: list[dict]) -> list[dict]:
    """Basis of ``{x : sum_j x_j cols[j] = 0}`` as dicts over ``j``."""
    rows = list(linalg.transpose(cols).values())
    return linalg.nullspace(rows, len(cols))


class Complex:
    """Cells ``(type, degree)`` with a sparse degree +1 differential."""

    def __init__(self, cells, d=None, keys=None):
        self.cells = list(cells)
        self.keys = list(keys) if keys is not None else list(range(len(self.cells)))
        self.cols: dict[int, dict] = defaultdict(dict)  # source -> {target: scalar}
        for (t, s), v in (d or {}).items():
            if v:
                self.cols[s][t] = Fraction(v)
        self._blocks = None

    def entries(self):
        for s, col in self.cols.items():
            for t, v in col.items():
                yield (t, s), v

    @property
    def blocks(self) -> dict:
        """type -> degree -> list of cell indices."""
        if self._blocks is None:
            blocks: dict = defaultdict(lambda: defaultdict(list))
            for i, (typ, deg) in enumerate(self.cells):
                blocks[typ][deg].append(i)
            self._blocks = blocks
        return self._blocks

    def check(self) -> None:
        for (t, s), _ in self.entries():
            (ta, da), (sa, sd) = self.cells[t], self.cells[s]
            if ta != sa or da != sd + 1:
                raise ComplexError(f"differential entry {s}->{t} breaks type/degree")
        for s in list(self.cols):
            if self.apply(self.apply({s: Fraction(1)})):
                raise ComplexError("differential does not square to zero")

    def apply(self, vec: dict) -> dict:
        out: dict = {}
        for s, x in vec.items():
            col = self.cols.get(s)
            if col:
                linalg._axpy(out, x, col)
        return out

    def _rank_out(self, typ, deg) -> int:
        return linalg.rank(self.cols.get(c, {}) for c in self.blocks[typ].get(deg, []))

    def cohomology(self) -> Counter:
        """Multiplicity of each (type, degree) in cohomology."""
        out = Counter()
        for typ, by_deg in self.blocks.items():
            ranks = {deg: self._rank_out(typ, deg) for deg in by_deg}
            for deg, cells in by_deg.items():
                h = len(cells) - ranks[deg] - ranks.get(deg - 1, 0)
                if h:
                    out[(typ, deg)] = h
        return out

    def is_acyclic(self) -> bool:
        return not self.cohomology()

    # explicit bases, used by the exact-sequence checks and the mixer

    def cocycles(self, typ, deg) -> list[dict]:
        cells = self.blocks[typ].get(deg, []) if typ in self.blocks else []
        ker = kernel([self.cols.get(c, {}) for c in cells])
        return [{cells[j]: v for j, v in x.items()} for x in ker]

    def boundaries(self, typ, deg) -> Echelon:
        ech = Echelon()
        if typ in self.blocks:
            for c in self.blocks[typ].get(deg - 1, []):
                col = self.cols.get(c)
                if col:
                    ech.add(col)
        return ech

    def cohomology_basis(self, typ, deg) -> tuple[list[dict], Echelon]:
        """Cocycles spanning a complement of the boundaries, plus the boundaries."""
        bnd = self.boundaries(typ, deg)
        ech = Echelon()
        ech.rows = {p: dict(r) for p, r in bnd.rows.items()}
        reps = []
        for z in self.cocycles(typ, deg):
            if ech.add(z):
                reps.append(z)
        return reps, bnd


def image_rank(vectors, bnd: Echelon) -> int:
    """Dimension of the span of ``vectors`` modulo the span stored in ``bnd``."""
    ech = Echelon()
    ech.rows = {p: dict(r) for p, r in bnd.rows.items()}
    return sum(1 for v in vectors if ech.add(v))


def check_short_exact_sequence(total: Complex, sub: set) -> list[str]:
    """Check the long exact cohomology sequence of ``0 -> A -> C -> C/A -> 0``.

    ``sub`` is a set of cells of ``total`` closed under the differential.
    Returns a list of failure messages (empty when exact everywhere).
    """
    problems = []
    for s in sub:
        for t in total.cols.get(s, {}):
            if t not in sub:
                return [f"cell {s} maps outside the subcomplex"]
    for typ, by_deg in total.blocks.items():
        degs = sorted(by_deg)
        lo, hi = degs[0] - 1, degs[-1] + 1
        dims = {}
        ranks = {}
        for k in range(lo, hi + 1):
            hA, bA = _restricted_basis(total, typ, k, sub, inside=True)
            hC, bC = total.cohomology_basis(typ, k)
            hQ, bQ = _restricted_basis(total, typ, k, sub, inside=False)
            dims[k] = (len(hA), len(hC), len(hQ))
            # i: H(A) -> H(C) is the identity on vectors
            ranks[("i", k)] = image_rank(hA, bC)
            # p: H(C) -> H(C/A) drops the sub cells
            proj = [{c: v for c, v in z.items() if c not in sub} for z in hC]
            ranks[("p", k)] = image_rank(proj, bQ)
            # connecting map: lift, differentiate, land in A
            bA1 = _restricted_basis(total, typ, k + 1, sub, inside=True)[1]
            conn = [total.apply(z) for z in hQ]
            if any(c not in sub for v in conn for c in v):
                problems.append(f"connecting map leaves subcomplex at {typ} degree {k}")
            ranks[("delta", k)] = image_rank(conn, bA1)
            # compositions vanish
            if image_rank([{c: v for c, v in z.items() if c not in sub} for z in hA], bQ):
                problems.append(f"p o i != 0 at {typ} degree {k}")
            if image_rank([total.apply(z) for z in proj], bA1):
                problems.append(f"delta o p != 0 at {typ} degree {k}")
        for k in range(lo, hi + 1):
            a, c, q = dims[k]
            if a != ranks.get(("delta", k - 1), 0) + ranks[("i", k)]:
                problems.append(f"not exact at H^{k}(A) for {typ}")
            if c != ranks[("i", k)] + ranks[("p", k)]:
                problems.append(f"not exact at H^{k}(C) for {typ}")
            if q != ranks[("p", k)] + ranks[("delta", k)]:
                problems.append(f"not exact at H^{k}(C/A) for {typ}")
    return problems


def _restricted_basis(total: Complex, typ, deg, sub: set, inside: bool):
    """Cohomology basis of the subcomplex (inside) or quotient complex (outside)."""
    keep = [i for i in total.blocks[typ].get(deg, []) if (i in sub) == inside]
    prev = [i for i in total.blocks[typ].get(deg - 1, []) if (i in sub) == inside]

    def d(c):
        return {t: v for t, v in total.cols.get(c, {}).items() if (t in sub) == inside}

    bnd = Echelon()
    for c in prev:
        bnd.add(d(c))
    ker = kernel([d(c) for c in keep])
    ech = Echelon()
    ech.rows = {p: dict(r) for p, r in bnd.rows.items()}
    reps = []
    for x in ker:
        z = {keep[j]: v for j, v in x.items()}
        if ech.add(z):
            reps.append(z)
    return reps, bnd
