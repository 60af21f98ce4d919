"""Split root data, Weyl groups and parabolic combinatorics.

Weights are tuples in the basis of fundamental weights, so the pairing
``<lam, alpha_i^vee>`` is just ``lam[i]``.  Standard parabolics are bitmasks
over the simple roots: bit ``i`` set means ``alpha_i`` is a root of the Levi.
The minimal parabolic is ``0`` and ``G`` is ``full``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .linalg import inverse

Weight = tuple


class RootDataError(ValueError):
    pass


@dataclass(frozen=True)
class WeylElement:
    index: int
    word: tuple[int, ...]  # reduced word, leftmost letter applied last
    matrix: tuple[tuple[int, ...], ...]  # action on fundamental-weight coordinates
    key: tuple[int, ...]  # image of rho; identifies the element

    @property
    def length(self) -> int:
        return len(self.word)

    def __call__(self, lam: Sequence) -> Weight:
        return tuple(sum(m * x for m, x in zip(row, lam)) for row in self.matrix)

    def word_string(self) -> str:
        return "".join(f"s{i + 1}" for i in self.word) or "e"


def cartan_matrix(family: str, n: int) -> list[list[int]]:
    """Cartan matrix with ``a[i][j] = <alpha_j, alpha_i^vee>`` (Bourbaki numbering)."""
    a = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    if family in "ABC":
        for i in range(n - 1):
            a[i][i + 1] = a[i + 1][i] = -1
        if family == "B" and n >= 2:
            a[n - 1][n - 2] = -2
        if family == "C" and n >= 2:
            a[n - 2][n - 1] = -2
    elif family == "D":
        for i in range(n - 2):
            a[i][i + 1] = a[i + 1][i] = -1
        a[n - 1][n - 3] = a[n - 3][n - 1] = -1
    elif family == "G":
        a[0][1], a[1][0] = -3, -1
    return a


_MIN_RANK = {"A": 1, "B": 2, "C": 2, "D": 4, "G": 2}
_LABEL = re.compile(r"^([ABCDG])(\d+)$")


def parse_label(label: str) -> tuple[str, int]:
    m = _LABEL.match(label.strip().upper())
    if not m:
        raise RootDataError(f"unknown root system type {label!r}")
    family, n = m.group(1), int(m.group(2))
    if n < _MIN_RANK[family] or (family == "G" and n != 2):
        raise RootDataError(f"unknown root system type {label!r}")
    return family, n


class RootDatum:
    """A split root system with its Weyl group enumerated."""

    def __init__(self, label: str):
        family, n = parse_label(label)
        self.label = f"{family}{n}"
        self.family = family
        self.rank = n
        self.cartan = tuple(tuple(r) for r in cartan_matrix(family, n))
        self.full = (1 << n) - 1
        self.simple_roots = tuple(tuple(self.cartan[i][j] for i in range(n)) for j in range(n))
        self.rho = tuple(1 for _ in range(n))
        self._cartan_inv = inverse(self.cartan)
        self._enumerate_weyl()
        self.positive_roots = self._positive_roots()
        self._sub_inverse: dict[int, list] = {}

    def __repr__(self) -> str:
        return f"RootDatum({self.label!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, RootDatum) and other.label == self.label

    def __hash__(self) -> int:
        return hash(("RootDatum", self.label))

    # -- Weyl group -------------------------------------------------------

    def reflect(self, i: int, lam: Sequence) -> Weight:
        c = lam[i]
        if not c:
            return tuple(lam)
        return tuple(x - c * a for x, a in zip(lam, self.simple_roots[i]))

    def _enumerate_weyl(self) -> None:
        n = self.rank
        ident = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
        refl = []
        for i in range(n):
            # s_i as a matrix on column vectors of fundamental coordinates
            refl.append(tuple(tuple(int(r == c) - (self.simple_roots[i][r] if c == i else 0)
                                    for c in range(n)) for r in range(n)))
        elems = [WeylElement(0, (), ident, self.rho)]
        by_key = {self.rho: 0}
        frontier = [0]
        while frontier:
            nxt = []
            for idx in frontier:
                w = elems[idx]
                for i in range(n):
                    key = self.reflect(i, w.key)
                    if key in by_key:
                        continue
                    mat = tuple(tuple(sum(refl[i][r][k] * w.matrix[k][c] for k in range(n))
                                      for c in range(n)) for r in range(n))
                    e = WeylElement(len(elems), (i,) + w.word, mat, key)
                    by_key[key] = e.index
                    elems.append(e)
                    nxt.append(e.index)
            frontier = nxt
        self.weyl = tuple(elems)
        self._by_key = by_key
        self._refl = tuple(refl)

    def element(self, word: Sequence[int]) -> WeylElement:
        key = self.rho
        for i in reversed(tuple(word)):
            key = self.reflect(i, key)
        return self.weyl[self._by_key[key]]

    def left_mult(self, i: int, w: WeylElement) -> WeylElement:
        return self.weyl[self._by_key[self.reflect(i, w.key)]]

    def multiply(self, u: WeylElement, v: WeylElement) -> WeylElement:
        return self.weyl[self._by_key[u(v.key)]]

    def inverse_of(self, w: WeylElement) -> WeylElement:
        return self.element(tuple(reversed(w.word)))

    def inversion_count(self, w: WeylElement) -> int:
        return sum(1 for a in self.positive_roots if not self.is_positive(w(a)))

    def weyl_subgroup(self, mask: int) -> tuple[WeylElement, ...]:
        return _subgroup(self, mask)

    def min_coset_reps(self, P: int, Q: int) -> tuple[WeylElement, ...]:
        """Minimal length representatives of ``W^P \\ W^Q``."""
        if not leq(P, Q):
            raise RootDataError(f"parabolic {P:b} is not contained in {Q:b}")
        return _min_coset_reps(self, P, Q)

    def longest(self, mask: int) -> WeylElement:
        return max(self.weyl_subgroup(mask), key=lambda w: w.length)

    # -- roots and coordinates ---------------------------------------------

    def simple_coords(self, lam: Sequence) -> tuple[Fraction, ...]:
        """Coefficients of ``lam`` in the basis of simple roots."""
        return tuple(sum(r[j] * lam[j] for j in range(self.rank)) for r in self._cartan_inv)

    def from_simple_coords(self, x: Sequence) -> Weight:
        return tuple(sum(self.cartan[i][j] * x[j] for j in range(self.rank)) for i in range(self.rank))

    def is_positive(self, root: Sequence) -> bool:
        c = self.simple_coords(root)
        return all(v >= 0 for v in c) and any(v > 0 for v in c)

    def _positive_roots(self) -> tuple[Weight, ...]:
        roots = set()
        for w in self.weyl:
            for a in self.simple_roots:
                r = w(a)
                if self.is_positive(r):
                    roots.add(r)
        return tuple(sorted(roots, key=lambda r: (sum(self.simple_coords(r)), self.simple_coords(r))))

    def support(self, root: Sequence) -> int:
        mask = 0
        for i, c in enumerate(self.simple_coords(root)):
            if c:
                mask |= 1 << i
        return mask

    def levi_data(self, P: int):
        """Positive roots of ``L_P``, the a_P-component of rho, and ``W^P``."""
        roots = tuple(a for a in self.positive_roots if leq(self.support(a), P))
        return roots, self.project(self.rho, P), self.weyl_subgroup(P)

    def dim_n(self, P: int) -> int:
        return len(self.positive_roots) - len(self.levi_data(P)[0])

    # -- the decomposition a^* = a^{P*} + a_P^{R*} + a_R^* -------------------

    def project(self, lam: Sequence, P: int) -> Weight:
        """Component of ``lam`` in ``a_P^*`` (kills the span of the roots in ``Delta^P``)."""
        idx = members(P)
        if not idx:
            return tuple(Fraction(x) for x in lam)
        inv = _sub_cartan_inverse(self, P)
        rhs = [lam[j] for j in idx]
        c = [sum(inv[a][b] * rhs[b] for b in range(len(idx))) for a in range(len(idx))]
        out = [Fraction(x) for x in lam]
        for coef, i in zip(c, idx):
            if coef:
                for k in range(self.rank):
                    out[k] -= coef * self.simple_roots[i][k]
        return tuple(out)

    def restrict(self, lam: Sequence, P: int, R: int) -> Weight:
        """The ``a_P^{R*}`` component of ``lam``."""
        if not leq(P, R):
            raise RootDataError(f"parabolic {P:b} is not contained in {R:b}")
        a = self.project(lam, P)
        b = self.project(lam, R)
        return tuple(x - y for x, y in zip(a, b))

    def in_subspace(self, lam: Sequence, P: int, R: int) -> bool:
        return self.restrict(lam, P, R) == tuple(Fraction(x) for x in lam)

    def restricted_simple_roots(self, P: int, R: int) -> list["RestrictedRoot"]:
        """The basis ``Delta_P^R`` of ``a_P^{R*}`` with its dual bases.

        The Arthur coroot of ``alpha`` pairs with ``x`` in ``a_P^{R*}`` as
        ``x[alpha]``; the dual basis of ``Delta_P^R`` reads off simple-root
        coefficients.
        """
        if not leq(P, R):
            raise RootDataError(f"parabolic {P:b} is not contained in {R:b}")
        out = []
        for i in members(R & ~P):
            root = self.project(self.simple_roots[i], P)
            omega = tuple(int(k == i) for k in range(self.rank))
            out.append(RestrictedRoot(i, root, self.restrict(omega, P, R)))
        return out

    def cone_coords(self, lam: Sequence, P: int, R: int):
        """(root-cone coefficients, dominant-cone pairings) of ``lam`` in ``a_P^{R*}``."""
        idx = members(R & ~P)
        sc = self.simple_coords(lam)
        return [sc[i] for i in idx], [Fraction(lam[i]) for i in idx]

    def cone_membership(self, lam: Sequence, P: int, R: int, cone: str = "root",
                        strict: bool = False) -> bool:
        if not self.in_subspace(lam, P, R):
            raise RootDataError("weight does not lie in a_P^{R*}; restrict it first")
        root, dom = self.cone_coords(lam, P, R)
        vals = root if cone == "root" else dom
        if cone not in ("root", "dominant"):
            raise RootDataError(f"unknown cone {cone!r}")
        return all(v > 0 for v in vals) if strict else all(v >= 0 for v in vals)

    def ge(self, xi: Sequence, xi2: Sequence, P: int, R: int) -> bool:
        diff = tuple(a - b for a, b in zip(xi, xi2))
        return self.cone_membership(diff, P, R)

    def gt(self, xi: Sequence, xi2: Sequence, P: int, R: int) -> bool:
        diff = tuple(a - b for a, b in zip(xi, xi2))
        return self.cone_membership(diff, P, R, strict=True)

    def to_json(self) -> dict:
        return {
            "type": self.label,
            "cartan": [list(r) for r in self.cartan],
            "simple_roots": [list(r) for r in self.simple_roots],
            "positive_roots": [list(r) for r in self.positive_roots],
        }


@dataclass(frozen=True)
class RestrictedRoot:
    index: int
    root: Weight  # the restriction of alpha, an element of a_P^{R*}
    dual_weight: Weight  # beta_alpha^R, dual to the Arthur coroots


def leq(P: int, R: int) -> bool:
    return P & ~R == 0


def members(mask: int) -> list[int]:
    out, i = [], 0
    while mask >> i:
        if mask >> i & 1:
            out.append(i)
        i += 1
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def interval(P: int, R: int) -> list[int]:
    """All Q with P <= Q <= R, ordered by size then mask."""
    free = members(R & ~P)
    out = []
    for bits in range(1 << len(free)):
        q = P
        for k, i in enumerate(free):
            if bits >> k & 1:
                q |= 1 << i
        out.append(q)
    return sorted(out, key=lambda q: (popcount(q), q))


def parabolic_name(mask: int, rank: int) -> str:
    if mask == (1 << rank) - 1:
        return "G"
    if mask == 0:
        return "P0"
    return "{" + ",".join(str(i + 1) for i in members(mask)) + "}"


def parse_parabolic(text: str, rank: int) -> int:
    t = text.strip()
    if t.upper() == "G":
        return (1 << rank) - 1
    if t.upper() in ("P0", "B", "0", "{}", "-"):
        return 0
    t = t.strip("{}")
    mask = 0
    for part in t.split(","):
        i = int(part) - 1
        if not 0 <= i < rank:
            raise RootDataError(f"simple root index {part} out of range")
        mask |= 1 << i
    return mask


@lru_cache(maxsize=None)
def _subgroup(datum: RootDatum, mask: int) -> tuple[WeylElement, ...]:
    return tuple(w for w in datum.weyl if set(w.word) <= set(members(mask)))


@lru_cache(maxsize=None)
def _min_coset_reps(datum: RootDatum, P: int, Q: int) -> tuple[WeylElement, ...]:
    out = []
    for w in _subgroup(datum, Q):
        if all(datum.left_mult(i, w).length > w.length for i in members(P)):
            out.append(w)
    return tuple(out)


@lru_cache(maxsize=None)
def _sub_cartan_inverse(datum: RootDatum, P: int):
    idx = members(P)
    # system sum_i a[j][i] c_i = lam_j for j in Delta^P
    return inverse([[datum.cartan[j][i] for i in idx] for j in idx])


@lru_cache(maxsize=None)
def build(label: str) -> RootDatum:
    """Return the (cached) root datum of the given type, e.g. ``"A2"``."""
    family, n = parse_label(label)
    return RootDatum(f"{family}{n}")
