"""Q-types, weak and strong micro-support."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .kostant import Irreducible, shifted
from .lmod import LMod, local_complex, restrict_closed
from .roots import RootDatum, leq, members, popcount


def q_bounds(datum: RootDatum, V: Irreducible, S: int) -> tuple[int, int]:
    """``(Q_V, Q'_V)`` relative to the maximal stratum ``S``."""
    P = V.parabolic
    if not leq(P, S):
        raise ValueError("the parabolic of V must lie below S")
    lam = datum.restrict(shifted(datum, V.weight), P, S)
    Q, Qp = P, P
    for i in members(S & ~P):
        if lam[i] < 0:
            Q |= 1 << i
        if lam[i] <= 0:
            Qp |= 1 << i
    return Q, Qp


class TypeTable:
    """Cached ``H(i_P^* \\hat i_Q^! M)`` for one module."""

    def __init__(self, M: LMod):
        self.M = M
        self.datum = M.datum
        self.S = M.top if M.poset else 0
        self._cache: dict[tuple[int, int], Counter] = {}

    def cohomology(self, P: int, Q: int) -> Counter:
        key = (P, Q)
        if key not in self._cache:
            self._cache[key] = local_complex(restrict_closed(self.M, Q), P).cohomology()
        return self._cache[key]

    def q_type(self, V: Irreducible, Q: int) -> Counter:
        """Graded multiplicity ``degree -> mult`` of ``type_{Q,V}``."""
        lo, hi = q_bounds(self.datum, V, self.S)
        if not (leq(lo, Q) and leq(Q, hi)):
            raise ValueError("Q outside [Q_V, Q'_V]")
        out = Counter()
        for (irr, deg), m in self.cohomology(V.parabolic, Q).items():
            if irr == V:
                out[deg] += m
        return out

    def eta_type(self, V: Irreducible, eta: str) -> Counter:
        lo, hi = q_bounds(self.datum, V, self.S)
        return self.q_type(V, hi if eta == "mu" else lo)

    def candidates(self) -> list[Irreducible]:
        found = set()
        for P in self.M.poset:
            for irr, _ in local_complex(self.M, P).cells:
                found.add(irr)
        return sorted(found, key=lambda v: v.sort_key())

    def windows(self, V: Irreducible, variant: str) -> list[int]:
        lo, hi = q_bounds(self.datum, V, self.S)
        if variant == "mu":
            return [hi]
        if variant == "nu":
            return [lo]
        free = members(hi & ~lo)
        qs = [lo | sum(1 << i for k, i in enumerate(free) if b >> k & 1) for b in range(1 << len(free))]
        return sorted(qs, key=lambda q: (popcount(q), q))


@dataclass(frozen=True)
class Witness:
    Q: int
    degree: int
    multiplicity: int


def weak_ms(M: LMod, variant: str = "full", table: TypeTable | None = None) -> dict[Irreducible, Witness]:
    """Weak micro-support with one witness per member (lowest degree, then smallest Q)."""
    if variant not in ("full", "mu", "nu"):
        raise ValueError(f"unknown variant {variant!r}")
    if not M.slots:
        return {}
    table = table or TypeTable(M)
    out = {}
    for V in table.candidates():
        best = None
        for Q in table.windows(V, variant):
            for deg, m in table.q_type(V, Q).items():
                key = (deg, popcount(Q), Q)
                if best is None or key < best[0]:
                    best = (key, Witness(Q, deg, m))
        if best is not None:
            out[V] = best[1]
    return out


def type_eta(M: LMod, eta: str, table: TypeTable | None = None) -> dict[Irreducible, Counter]:
    """All nonzero ``type_{eta, V}(M)`` as degree -> multiplicity."""
    table = table or TypeTable(M)
    out = {}
    if not M.slots:
        return out
    for V in table.candidates():
        t = +table.eta_type(V, eta)
        if t:
            out[V] = t
    return out


def self_contragredient(datum: RootDatum, V: Irreducible) -> bool:
    """Whether ``V`` restricted to ``M_P`` is (conjugate) self-contragredient.

    Conjugation is trivial for split groups.  The contragredient has highest
    weight ``-w_0^P(lambda)``, so the derived part must be fixed by ``-w_0^P``.
    ``M_P`` also contains the 2-torsion of the split centre, on which the two
    highest weights differ by ``2 lambda_P``; that is trivial exactly when
    ``lambda_P`` is an integral character of ``L_P``.
    """
    P = V.parabolic
    w0 = datum.longest(P)
    dual = tuple(-x for x in w0(V.weight))
    if any(dual[i] != V.weight[i] for i in members(P)):
        return False
    return all(Fraction(x).denominator == 1 for x in datum.project(V.weight, P))


def strong_ms(M: LMod, variant: str = "full", table: TypeTable | None = None) -> dict[Irreducible, Witness]:
    weak = weak_ms(M, variant, table)
    return {V: w for V, w in weak.items() if self_contragredient(M.datum, V)}
