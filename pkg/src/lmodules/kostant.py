"""Kostant's theorem and the partial orders on irreducible Levi modules."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from .roots import RootDatum, RootDataError, WeylElement, leq, members, parabolic_name


@dataclass(frozen=True, order=True)
class Irreducible:
    """The irreducible ``L_P``-module ``V_{P, weight}``."""

    parabolic: int
    weight: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "weight", tuple(int(x) for x in self.weight))

    def describe(self, rank: int) -> str:
        return f"V[{parabolic_name(self.parabolic, rank)};{','.join(map(str, self.weight))}]"

    def sort_key(self):
        return (self.parabolic, self.weight)


@dataclass(frozen=True)
class KostantComponent:
    w: WeylElement
    target: Irreducible
    degree: int


def is_dominant(datum: RootDatum, P: int, weight) -> bool:
    return all(weight[i] >= 0 for i in members(P))


def check_irreducible(datum: RootDatum, V: Irreducible) -> None:
    if len(V.weight) != datum.rank:
        raise RootDataError(f"weight {V.weight} has wrong length for {datum.label}")
    if not 0 <= V.parabolic <= datum.full:
        raise RootDataError(f"invalid parabolic {V.parabolic}")
    if not is_dominant(datum, V.parabolic, V.weight):
        raise RootDataError(f"weight {V.weight} is not dominant for the Levi of "
                            f"{parabolic_name(V.parabolic, datum.rank)}")


def shifted(datum: RootDatum, weight) -> tuple:
    return tuple(x + r for x, r in zip(weight, datum.rho))


def kostant(datum: RootDatum, P: int, V: Irreducible) -> list[KostantComponent]:
    """Components of ``H(n_P^Q; V)`` where ``Q`` is the parabolic of ``V``."""
    check_irreducible(datum, V)
    return list(_kostant(datum, P, V))


@lru_cache(maxsize=None)
def _kostant(datum: RootDatum, P: int, V: Irreducible) -> tuple[KostantComponent, ...]:
    lam_rho = shifted(datum, V.weight)
    out = []
    for w in datum.min_coset_reps(P, V.parabolic):
        target = tuple(x - r for x, r in zip(w(lam_rho), datum.rho))
        out.append(KostantComponent(w, Irreducible(P, target), w.length))
    return tuple(out)


@lru_cache(maxsize=None)
def kostant_element(datum: RootDatum, parent: Irreducible, child: Irreducible) -> WeylElement | None:
    """The ``w`` with ``child = H(n_P^R; parent)_w``, or None if unrelated."""
    if not leq(child.parabolic, parent.parabolic):
        return None
    goal = shifted(datum, child.weight)
    lam_rho = shifted(datum, parent.weight)
    for w in datum.min_coset_reps(child.parabolic, parent.parabolic):
        if w(lam_rho) == goal:
            return w
    return None


def bracket(datum: RootDatum, parent: Irreducible, child: Irreducible) -> int | None:
    """``[V_R : V_P]``; None stands for "unrelated"."""
    w = kostant_element(datum, parent, child)
    return None if w is None else w.length


def interleave(datum: RootDatum, child: Irreducible, parent: Irreducible, Q: int) -> Irreducible:
    """The unique ``V_Q`` with ``child < V_Q < parent``."""
    P, R = child.parabolic, parent.parabolic
    if not (leq(P, Q) and leq(Q, R)) or Q in (P, R):
        raise RootDataError("Q must lie strictly between the two parabolics")
    if kostant_element(datum, parent, child) is None:
        raise RootDataError("the two representations are not Kostant related")
    found = [c.target for c in _kostant(datum, Q, parent)
             if kostant_element(datum, c.target, child) is not None]
    if len(found) != 1:
        raise AssertionError("interleaving representation is not unique")
    return found[0]


def xi(datum: RootDatum, V: Irreducible):
    """The character by which the split centre of ``L_P`` acts (a_P^* component)."""
    return datum.project(V.weight, V.parabolic)


def signed_restriction(datum: RootDatum, child: Irreducible, R: int):
    """``(xi_V + rho)`` restricted to ``a_P^R``."""
    return datum.restrict(shifted(datum, child.weight), child.parabolic, R)


ORDER_KINDS = ("prec", "plus", "minus", "plus_str", "minus_str", "zero")


def cone_test(datum: RootDatum, lam, P: int, R: int, kind: str) -> bool:
    """Signed root-cone test for a weight already in ``a_P^{R*}``."""
    root, _ = datum.cone_coords(lam, P, R)
    if kind == "prec":
        return True
    if kind == "plus":
        return all(c >= 0 for c in root)
    if kind == "minus":
        return all(c <= 0 for c in root)
    if kind == "plus_str":
        return all(c > 0 for c in root)
    if kind == "minus_str":
        return all(c < 0 for c in root)
    if kind == "zero":
        return all(c == 0 for c in root)
    raise ValueError(f"unknown order kind {kind!r}")


def order_rel(datum: RootDatum, child: Irreducible, parent: Irreducible, kind: str = "prec") -> bool:
    """``child`` precedes ``parent`` in the given signed variant of the Kostant order."""
    if kostant_element(datum, parent, child) is None:
        return False
    lam = signed_restriction(datum, child, parent.parabolic)
    return cone_test(datum, lam, child.parabolic, parent.parabolic, kind)


def character_ge(datum: RootDatum, a: Irreducible, b: Irreducible, strict: bool = False) -> bool:
    """Compare ``xi + rho_P`` of two irreducibles in the order of the full root cone."""
    xa = datum.project(shifted(datum, a.weight), a.parabolic)
    xb = datum.project(shifted(datum, b.weight), b.parabolic)
    diff = datum.simple_coords(tuple(p - q for p, q in zip(xa, xb)))
    if not all(c >= 0 for c in diff):
        return False
    return any(diff) if strict else True


class EtaOrder:
    """The partial orders ``<=_mu`` and ``<=_nu`` as explicit transitive closures.

    The universe is every irreducible of a Levi in ``poset`` whose ``lambda + rho``
    lies in one of the Weyl orbits of the given seeds.  Kostant relations never
    leave such an orbit, so the closure computed here is the true order
    restricted to the universe.
    """

    def __init__(self, datum: RootDatum, poset: Iterable[int], seeds: Iterable[Irreducible], eta: str):
        if eta not in ("mu", "nu"):
            raise ValueError(f"eta must be 'mu' or 'nu', not {eta!r}")
        self.datum = datum
        self.eta = eta
        self.poset = tuple(sorted(set(poset)))
        orbit_points = set()
        for V in seeds:
            lam_rho = shifted(datum, V.weight)
            orbit_points.update(w(lam_rho) for w in datum.weyl)
        universe = set()
        for P in self.poset:
            for x in orbit_points:
                if all(x[i] >= 1 for i in members(P)):
                    universe.add(Irreducible(P, tuple(a - r for a, r in zip(x, datum.rho))))
        self.universe = sorted(universe)
        self.edges = self._generators()
        self._reach = {v: self._dfs(v) for v in self.universe}

    def _generators(self) -> dict[Irreducible, set]:
        datum = self.datum
        down, up = ("minus", "plus_str") if self.eta == "mu" else ("minus_str", "plus")
        edges: dict[Irreducible, set] = {v: set() for v in self.universe}
        for parent in self.universe:
            for P in self.poset:
                if P == parent.parabolic or not leq(P, parent.parabolic):
                    continue
                for comp in _kostant(datum, P, parent):
                    child = comp.target
                    lam = signed_restriction(datum, child, parent.parabolic)
                    if cone_test(datum, lam, P, parent.parabolic, down):
                        edges[child].add(parent)
                    if cone_test(datum, lam, P, parent.parabolic, up):
                        edges[parent].add(child)
        return edges

    def generating_pairs(self) -> list[tuple[Irreducible, Irreducible]]:
        return [(a, b) for a in self.universe for b in sorted(self.edges[a])]

    def _dfs(self, start: Irreducible) -> frozenset:
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for u in self.edges[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return frozenset(seen)

    def leq(self, a: Irreducible, b: Irreducible) -> bool:
        if a == b:
            return True
        if a not in self._reach:
            return False
        return b in self._reach[a]

    def lt(self, a: Irreducible, b: Irreducible) -> bool:
        return a != b and self.leq(a, b)

    def antisymmetry_violations(self) -> list[tuple[Irreducible, Irreducible]]:
        bad = []
        for a in self.universe:
            for b in self._reach[a]:
                if a < b and a in self._reach[b]:
                    bad.append((a, b))
        return bad

    def maximal(self, elems: Iterable[Irreducible]) -> list[Irreducible]:
        elems = list(elems)
        return [a for a in elems if not any(self.lt(a, b) for b in elems)]

    def minimal(self, elems: Iterable[Irreducible]) -> list[Irreducible]:
        elems = list(elems)
        return [a for a in elems if not any(self.lt(b, a) for b in elems)]


def leq_eta(datum: RootDatum, a: Irreducible, b: Irreducible, eta: str, poset=None) -> bool:
    poset = range(datum.full + 1) if poset is None else poset
    return EtaOrder(datum, poset, [a, b], eta).leq(a, b)
