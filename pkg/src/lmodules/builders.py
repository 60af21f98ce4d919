"""Weighted cohomology and intersection cohomology L-modules."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .kostant import Irreducible, _kostant, check_irreducible, shifted
from .lmod import (LMod, Slot, degree_truncate, link_cohomology, local_cohomology,
                   local_cohomology_supports, validate, weight_predicate, weight_truncate)
from .roots import RootDatum, interval, leq, members, popcount


@dataclass(frozen=True)
class WeightProfile:
    kind: str  # "mu", "nu" or "general"
    eta: tuple | None = None

    @classmethod
    def parse(cls, text) -> "WeightProfile":
        if isinstance(text, WeightProfile):
            return text
        if text in ("mu", "nu"):
            return cls(text)
        return cls("general", tuple(int(x) for x in text))

    @property
    def key(self):
        return self.kind if self.kind != "general" else self.eta


@dataclass(frozen=True)
class Perversity:
    kind: str  # "m", "n" or "general"
    values: tuple = ()  # (codim, value) pairs for a general perversity

    @classmethod
    def parse(cls, text) -> "Perversity":
        if isinstance(text, Perversity):
            return text
        if text in ("m", "n"):
            return cls(text)
        if isinstance(text, dict):
            return cls("general", tuple(sorted(text.items())))
        raise ValueError(f"unknown perversity {text!r}")

    def __call__(self, k: int) -> int:
        if self.kind == "m":
            return (k - 2) // 2
        if self.kind == "n":
            return (k - 1) // 2
        return dict(self.values)[k]


def admissible_order(poset: Sequence[int], R: int) -> list[int]:
    """Strata below ``R`` other than ``R``, smaller ones first (``Q_1, ..., Q_N``)."""
    return sorted((Q for Q in poset if leq(Q, R) and Q != R), key=lambda q: (popcount(q), q))


def stratum_dims(datum: RootDatum, P: int) -> tuple[int, int, int]:
    """(dim X_P, codim of X_P in the compactification, dim n_P) in the split model."""
    levi_roots = datum.levi_data(P)[0]
    dim_p = len(levi_roots) + len(members(P))
    dim_g = len(datum.positive_roots) + datum.rank
    return dim_p, dim_g - dim_p, len(datum.positive_roots) - len(levi_roots)


def open_stratum_module(datum: RootDatum, poset, cells: Sequence[tuple[Irreducible, int]]) -> LMod:
    """``i_{R*} E`` for a graded ``L_R``-module given as (irreducible, degree) cells."""
    for irr, _ in cells:
        check_irreducible(datum, irr)
    return LMod.from_cells(datum, poset, list(cells))


def weighted_module(datum: RootDatum, R: int, E, eta="mu", poset=None,
                    order: Sequence[int] | None = None) -> LMod:
    """``W^eta C(E_R)`` on the strata below ``R`` (optionally within ``poset``).

    ``E`` is an ``Irreducible`` or a list of (irreducible, degree) cells, all for
    ``L_R``.  ``order`` overrides the enumeration ``Q_1, ..., Q_N``; it must list
    smaller strata first.
    """
    profile = WeightProfile.parse(eta)
    cells = [(E, 0)] if isinstance(E, Irreducible) else list(E)
    for irr, _ in cells:
        if irr.parabolic != R:
            raise ValueError("coefficients must be modules for the Levi of R")
    base = interval(0, R) if poset is None else [Q for Q in poset if leq(Q, R)]
    M = open_stratum_module(datum, base, cells)
    qs = admissible_order(base, R) if order is None else list(order)
    _check_order(qs, base, R)
    test = weight_predicate(datum, profile.key, R)
    for Q in reversed(qs):
        M = weight_truncate(M, Q, test)
    return M


def _check_order(qs, poset, R) -> None:
    if sorted(qs) != sorted(Q for Q in poset if Q != R):
        raise ValueError("enumeration must list every stratum below R exactly once")
    for i, a in enumerate(qs):
        for b in qs[:i]:
            if leq(a, b) and a != b:
                raise ValueError("enumeration must list smaller strata first")


def intersection_module(datum: RootDatum, E, perversity="m",
                        order: Sequence[int] | None = None) -> LMod:
    """``I_p C(E)`` on the full compactification."""
    p = Perversity.parse(perversity)
    G = datum.full
    cells = [(E, 0)] if isinstance(E, Irreducible) else list(E)
    poset = interval(0, G)
    M = open_stratum_module(datum, poset, cells)
    qs = admissible_order(poset, G) if order is None else list(order)
    _check_order(qs, poset, G)
    for Q in reversed(qs):
        M = degree_truncate(M, Q, p(stratum_dims(datum, Q)[1]))
    return M


# -- local formulas -----------------------------------------------------------


def kostant_table(datum: RootDatum, P: int, cells) -> list[tuple[Irreducible, int]]:
    """``H(n_P^R; E_R)`` as (irreducible, degree) pairs."""
    out = []
    for irr, deg in cells:
        for comp in _kostant(datum, P, irr):
            out.append((comp.target, deg + comp.degree))
    return out


def expected_local(datum: RootDatum, P: int, R: int, cells, eta) -> tuple[Counter, Counter]:
    """Predicted ``H(i_P^*)`` and ``H(i_P^!)`` of ``W^eta C(E_R)`` from the Kostant table."""
    profile = WeightProfile.parse(eta)
    table = kostant_table(datum, P, cells)
    star, shriek = Counter(), Counter()
    codim = len(members(R & ~P))
    for irr, deg in table:
        lam = datum.restrict(shifted(datum, irr.weight), P, R)
        root, _ = datum.cone_coords(lam, P, R)
        if profile.kind == "mu":
            ge = all(c > 0 for c in root)
            lt = all(c <= 0 for c in root)
        elif profile.kind == "nu":
            ge = all(c >= 0 for c in root)
            lt = all(c < 0 for c in root)
        else:
            diff = datum.restrict(tuple(a - b for a, b in zip(irr.weight, profile.eta)), P, R)
            droot, _ = datum.cone_coords(diff, P, R)
            ge = all(c >= 0 for c in droot)
            lt = all(c < 0 for c in droot)
        if ge:
            star[(irr, deg)] += 1
        if lt:
            shriek[(irr, deg + codim)] += 1
    return star, shriek


@dataclass
class LocalFormulaReport:
    ok: bool
    mismatches: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def check_local_formulas(datum: RootDatum, R: int, E, eta="mu", M: LMod | None = None) -> LocalFormulaReport:
    """Compare the built module's local cohomology with the truncated Kostant table."""
    cells = [(E, 0)] if isinstance(E, Irreducible) else list(E)
    if M is None:
        M = weighted_module(datum, R, cells, eta)
    bad = []
    err = validate(M)
    if err:
        bad.append(("validate", str(err)))
    for P in M.poset:
        star, shriek = expected_local(datum, P, R, cells, eta)
        got_star = local_cohomology(M, P)
        got_shriek = local_cohomology_supports(M, P)
        for name, want, got in (("i^*", star, got_star), ("i^!", shriek, got_shriek)):
            for key in sorted(set(want) | set(got), key=lambda k: (k[0].sort_key(), k[1])):
                if want[key] != got[key]:
                    bad.append((name, P, key[0], key[1], want[key], got[key]))
        if P != R:
            # split link sequence: dim H^k(link) = dim H^k(i^*) + dim H^{k+1}(i^!)
            link = link_cohomology(M, P)
            expect = Counter(got_star)
            for (irr, deg), m in got_shriek.items():
                expect[(irr, deg - 1)] += m
            if +expect != +link:
                bad.append(("link", P, dict(link), dict(expect)))
    return LocalFormulaReport(not bad, bad)
