"""L-modules as slot complexes.

An L-module on a locally closed set of strata is stored as a list of *slots*
``(label, V_P, degree)``, one per irreducible summand of some ``E_P``, together
with a single sparse matrix ``D``.  The entry ``D[t, s]`` is the scalar by which
the morphism ``f_{P_t P_s}`` maps the Kostant child of slot ``s`` at ``P_t``
(the unique one of the same type as slot ``t``) to slot ``t``.  Nonzero entries
therefore need::

    P_t <= P_s,  type(t) = H(n_{P_t}^{P_s}; type(s))_w,  deg(t) = deg(s) + l(w) + 1.

Identifying ``H(n_P^Q; H(n_Q^R; .))`` with ``H(n_P^R; .)`` slot by slot (no extra
scalars), the differential condition on the ``f_PQ`` becomes ``D @ D == 0``.
Morphisms and homotopies are sparse matrices between slot lists with the same
support rule, of degree 0 and -1 respectively.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from . import linalg
from .complexes import Complex
from .kostant import Irreducible, _kostant, check_irreducible, kostant_element, shifted
from .roots import RootDatum, leq, members, popcount


class LModError(ValueError):
    pass


@dataclass(frozen=True)
class Slot:
    label: str
    irr: Irreducible
    degree: int

    @property
    def parabolic(self) -> int:
        return self.irr.parabolic


def _sparse(entries) -> dict:
    return {k: Fraction(v) for k, v in dict(entries).items() if v}


def _matmul(a: dict, b: dict) -> dict:
    """Product of sparse matrices keyed by (row, col)."""
    by_row = defaultdict(list)
    for (u, s), v in b.items():
        by_row[u].append((s, v))
    out: dict = defaultdict(Fraction)
    for (t, u), x in a.items():
        for s, y in by_row.get(u, ()):
            out[(t, s)] += x * y
    return {k: v for k, v in out.items() if v}


def _sub(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        nv = out.get(k, 0) - v
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return out


def check_poset(poset: Sequence[int]) -> None:
    """Posets must be locally closed: convex in the lattice of parabolics."""
    ps = set(poset)
    for P in ps:
        for R in ps:
            if leq(P, R) and P != R:
                free = members(R & ~P)
                for bits in range(1, (1 << len(free)) - 1):
                    Q = P | sum(1 << i for k, i in enumerate(free) if bits >> k & 1)
                    if Q not in ps:
                        raise LModError("poset is not locally closed")


class LMod:
    """An L-module: slots on a locally closed poset plus the matrix ``D``."""

    def __init__(self, datum: RootDatum, poset: Iterable[int], slots: Sequence[Slot], D=None):
        self.datum = datum
        self.poset = tuple(sorted(set(poset), key=lambda q: (popcount(q), q)))
        self.slots = tuple(slots)
        self.D = _sparse(D or {})

    @classmethod
    def from_cells(cls, datum, poset, cells: Sequence[tuple[Irreducible, int]], D=None) -> "LMod":
        slots = [Slot(f"x{i}", irr, deg) for i, (irr, deg) in enumerate(cells)]
        return cls(datum, poset, slots, D)

    def __repr__(self) -> str:
        return f"LMod({self.datum.label}, {len(self.slots)} slots, poset={list(self.poset)})"

    def __eq__(self, other) -> bool:
        return (isinstance(other, LMod) and self.datum == other.datum and self.poset == other.poset
                and self.slots == other.slots and self.D == other.D)

    @property
    def top(self) -> int:
        tops = [P for P in self.poset if not any(P != Q and leq(P, Q) for Q in self.poset)]
        if len(tops) != 1:
            raise LModError("poset has no unique maximal stratum")
        return tops[0]

    def relabel(self) -> "LMod":
        return LMod.from_cells(self.datum, self.poset, [(s.irr, s.degree) for s in self.slots], self.D)

    def at(self, P: int) -> list[int]:
        return [i for i, s in enumerate(self.slots) if s.parabolic == P]

    def graded(self, P: int) -> Counter:
        """``E_P`` as multiplicities of (irreducible, degree)."""
        return Counter((s.irr, s.degree) for s in self.slots if s.parabolic == P)

    def block(self, P: int, Q: int) -> list[tuple[int, tuple[int, ...], int, Fraction]]:
        """Entries of ``f_PQ`` as (source slot, source w word, target slot, scalar)."""
        out = []
        for (t, s), v in sorted(self.D.items()):
            if self.slots[t].parabolic == P and self.slots[s].parabolic == Q:
                w = kostant_element(self.datum, self.slots[s].irr, self.slots[t].irr)
                out.append((s, w.word, t, v))
        return out

    def degrees(self) -> list[int]:
        return sorted({s.degree for s in self.slots})


def support_ok(datum: RootDatum, src: Slot, dst: Slot, shift: int) -> bool:
    """Can a map of degree ``shift`` have an entry from ``src`` to ``dst``?"""
    w = kostant_element(datum, src.irr, dst.irr)
    return w is not None and dst.degree == src.degree + w.length + shift


@dataclass
class Violation:
    kind: str
    P: int
    R: int
    target: int
    source: int
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.kind} at (P={self.P}, R={self.R}) slots {self.source}->{self.target}: {self.detail}"


def validate(M: LMod) -> Violation | None:
    """Return None if ``M`` is a valid L-module, else the first violation found."""
    try:
        check_poset(M.poset)
    except LModError as exc:
        return Violation("poset", -1, -1, -1, -1, str(exc))
    labels = [s.label for s in M.slots]
    if len(set(labels)) != len(labels):
        return Violation("labels", -1, -1, -1, -1, "slot labels are not unique")
    for i, s in enumerate(M.slots):
        if s.parabolic not in M.poset:
            return Violation("slot", s.parabolic, s.parabolic, i, i, "slot outside poset")
        try:
            check_irreducible(M.datum, s.irr)
        except ValueError as exc:
            return Violation("slot", s.parabolic, s.parabolic, i, i, str(exc))
    n = len(M.slots)
    for (t, s), v in sorted(M.D.items()):
        if not (0 <= t < n and 0 <= s < n):
            return Violation("index", -1, -1, t, s, "slot index out of range")
        if not support_ok(M.datum, M.slots[s], M.slots[t], 1):
            return Violation("support", M.slots[t].parabolic, M.slots[s].parabolic, t, s,
                             "entry between slots that are not Kostant related in degree +1")
    sq = _matmul(M.D, M.D)
    if sq:
        (t, s), v = min(sq.items())
        return Violation("differential", M.slots[t].parabolic, M.slots[s].parabolic, t, s,
                         f"sum of f_PQ o H(n_P^Q; f_QR) has entry {v}")
    return None


def is_valid(M: LMod) -> bool:
    return validate(M) is None


# -- morphisms -------------------------------------------------------------


class LMorphism:
    """A map ``source -> target`` given by entries ``[(t, s)]`` on slots."""

    def __init__(self, source: LMod, target: LMod, entries=None, degree: int = 0):
        self.source = source
        self.target = target
        self.degree = degree
        self.entries = _sparse(entries or {})

    def check(self) -> str | None:
        """None if this is a chain map (degree 0) respecting the support rule."""
        if self.source.datum != self.target.datum:
            return "root data differ"
        for (t, s), v in self.entries.items():
            if not support_ok(self.source.datum, self.source.slots[s], self.target.slots[t], self.degree):
                return f"entry {s}->{t} violates the support rule"
        if self.degree == 0:
            diff = _sub(_matmul(self.target.D, self.entries), _matmul(self.entries, self.source.D))
            if diff:
                return f"not compatible with the differentials at {min(diff)}"
        return None

    def compose(self, other: "LMorphism") -> "LMorphism":
        """``self o other``."""
        return LMorphism(other.source, self.target, _matmul(self.entries, other.entries),
                         self.degree + other.degree)

    def __sub__(self, other: "LMorphism") -> "LMorphism":
        return LMorphism(self.source, self.target, _sub(self.entries, other.entries), self.degree)


def identity(M: LMod) -> LMorphism:
    return LMorphism(M, M, {(i, i): 1 for i in range(len(M.slots))})


def zero_map(M: LMod, N: LMod) -> LMorphism:
    return LMorphism(M, N, {})


# -- shifts, sums, cones ---------------------------------------------------


def shift(M: LMod, k: int) -> LMod:
    """``M[k]``: degrees drop by ``k`` and the differential picks up ``(-1)^k``."""
    sign = -1 if k % 2 else 1
    slots = [Slot(s.label, s.irr, s.degree - k) for s in M.slots]
    return LMod(M.datum, M.poset, slots, {key: sign * v for key, v in M.D.items()})


def shift_morphism(phi: LMorphism, k: int) -> LMorphism:
    return LMorphism(shift(phi.source, k), shift(phi.target, k), phi.entries, phi.degree)


def direct_sum(*mods: LMod) -> LMod:
    if not mods:
        raise LModError("empty direct sum")
    datum, poset = mods[0].datum, mods[0].poset
    cells, D, off = [], {}, 0
    for M in mods:
        if M.poset != poset or M.datum != datum:
            raise LModError("direct sum needs the same root datum and poset")
        cells += [(s.irr, s.degree) for s in M.slots]
        D.update({(t + off, s + off): v for (t, s), v in M.D.items()})
        off += len(M.slots)
    return LMod.from_cells(datum, poset, cells, D)


@dataclass
class Cone:
    module: LMod
    alpha: LMorphism  # target -> cone
    beta: LMorphism  # cone -> source[1]
    n_source: int  # the first n_source slots come from the source


def cone(phi: LMorphism) -> Cone:
    """Mapping cone ``(E[1] + F, [[-f, 0], [phi, g]])``."""
    err = phi.check()
    if err:
        raise LModError(f"invalid morphism: {err}")
    M, N = phi.source, phi.target
    m = len(M.slots)
    cells = [(s.irr, s.degree - 1) for s in M.slots] + [(s.irr, s.degree) for s in N.slots]
    D = {(t, s): -v for (t, s), v in M.D.items()}
    D.update({(t + m, s + m): v for (t, s), v in N.D.items()})
    D.update({(t + m, s): v for (t, s), v in phi.entries.items()})
    C = LMod.from_cells(M.datum, M.poset, cells, D)
    alpha = LMorphism(N, C, {(i + m, i): 1 for i in range(len(N.slots))})
    beta = LMorphism(C, shift(M, 1), {(i, i): 1 for i in range(m)})
    return Cone(C, alpha, beta, m)


def cocone(phi: LMorphism) -> Cone:
    """``cone(phi)[-1]``; source slots keep their degrees."""
    c = cone(phi)
    C = shift(c.module, -1)
    alpha = LMorphism(shift(phi.target, -1), C, c.alpha.entries)
    beta = LMorphism(C, phi.source, c.beta.entries)
    return Cone(C, alpha, beta, c.n_source)


# -- restriction and extension --------------------------------------------


def restrict_to(M: LMod, poset: Iterable[int]) -> LMod:
    """``k^!``: restrict the data to a locally closed subset of strata."""
    keep_poset = set(poset)
    if not keep_poset <= set(M.poset):
        raise LModError("restriction to strata outside the poset")
    keep = [i for i, s in enumerate(M.slots) if s.parabolic in keep_poset]
    index = {old: new for new, old in enumerate(keep)}
    D = {(index[t], index[s]): v for (t, s), v in M.D.items() if t in index and s in index}
    return LMod(M.datum, keep_poset, [M.slots[i] for i in keep], D)


def restrict_closed(M: LMod, Q: int) -> LMod:
    """``i_Q^!`` onto the closure of ``X_Q``."""
    if Q not in M.poset:
        raise LModError(f"stratum {Q} not in poset")
    return restrict_to(M, [P for P in M.poset if leq(P, Q)])


def extend_by_zero(M: LMod, poset: Iterable[int]) -> LMod:
    new = set(poset)
    if not set(M.poset) <= new:
        raise LModError("extension must be to a larger poset")
    check_poset(tuple(new))
    return LMod(M.datum, new, M.slots, M.D)


def drop_stratum(M: LMod, P: int) -> LMod:
    """``j_{P*} j_P^* M``: forget the data on ``X_P``, keep the poset."""
    keep = [i for i, s in enumerate(M.slots) if s.parabolic != P]
    index = {old: new for new, old in enumerate(keep)}
    D = {(index[t], index[s]): v for (t, s), v in M.D.items() if t in index and s in index}
    return LMod(M.datum, M.poset, [M.slots[i] for i in keep], D)


def stratum_module(M: LMod, P: int) -> LMod:
    """``i_P^! M`` as an L-module on the single stratum ``X_P``."""
    return restrict_to(M, [P])


# -- local complexes -------------------------------------------------------


class LocalComplex(Complex):
    """``i_P^* M``: Kostant children at ``P`` of all slots above ``P``.

    ``keys[c] = (slot index, w)`` records where each cell came from.
    """

    def __init__(self, M: LMod, P: int):
        datum = M.datum
        cells, keys = [], []
        by_slot: dict[int, dict] = {}
        for i, s in enumerate(M.slots):
            if not leq(P, s.parabolic):
                continue
            kids = {}
            for comp in _kostant(datum, P, s.irr):
                kids[comp.target] = len(cells)
                cells.append((comp.target, s.degree + comp.degree))
                keys.append((i, comp.w))
            by_slot[i] = kids
        d = {}
        for (t, s), v in M.D.items():
            if s in by_slot and t in by_slot:
                src, dst = by_slot[s], by_slot[t]
                for typ, c in dst.items():
                    if typ in src:
                        d[(c, src[typ])] = v
        super().__init__(cells, d, keys)
        self.module = M
        self.P = P
        self.by_slot = by_slot


def local_complex(M: LMod, P: int) -> LocalComplex:
    if P not in M.poset:
        raise LModError(f"stratum {P} not in poset")
    return LocalComplex(M, P)


def local_cohomology(M: LMod, P: int) -> Counter:
    """``H(i_P^* M)`` as multiplicities of (irreducible, degree)."""
    return local_complex(M, P).cohomology()


def local_cohomology_supports(M: LMod, P: int) -> Counter:
    """``H(i_P^! M)``."""
    return local_complex(stratum_module(M, P), P).cohomology()


def link_cohomology(M: LMod, P: int) -> Counter:
    """``H(i_P^* j_{P*} j_P^* M)``."""
    return local_complex(drop_stratum(M, P), P).cohomology()


def local_map(phi: LMorphism, P: int, src: LocalComplex | None = None,
              dst: LocalComplex | None = None) -> dict:
    """``i_P^* phi`` as a sparse matrix between the two local complexes."""
    src = src or local_complex(phi.source, P)
    dst = dst or local_complex(phi.target, P)
    out = {}
    for (t, s), v in phi.entries.items():
        if s in src.by_slot and t in dst.by_slot:
            a, b = src.by_slot[s], dst.by_slot[t]
            for typ, c in b.items():
                if typ in a:
                    out[(c, a[typ])] = v
    return out


def is_zero_object(M: LMod) -> bool:
    """All local cohomology vanishes, so ``M`` is zero in the homotopy category."""
    return all(not local_cohomology(M, P) for P in M.poset)


def is_quasi_iso(phi: LMorphism) -> bool:
    """Iso on ``H(i_P^*)`` for every ``P``; equivalently the cone is acyclic everywhere."""
    return is_zero_object(cone(phi).module)


def homotopic(phi1: LMorphism, phi2: LMorphism) -> dict | None:
    """Find ``h`` of degree -1 with ``phi1 - phi2 = D_N h + h D_M``, or None."""
    M, N = phi1.source, phi1.target
    diff = _sub(phi1.entries, phi2.entries)
    unknowns = []
    for s, ss in enumerate(M.slots):
        for t, ts in enumerate(N.slots):
            if support_ok(M.datum, ss, ts, -1):
                unknowns.append((t, s))
    if not unknowns:
        return None if diff else {}
    col = {u: j for j, u in enumerate(unknowns)}
    eqs: dict = defaultdict(dict)
    dn_by_col = defaultdict(list)
    for (a, b), v in N.D.items():
        dn_by_col[b].append((a, v))
    dm_by_row = defaultdict(list)
    for (a, b), v in M.D.items():
        dm_by_row[a].append((b, v))
    for (t, u), j in col.items():
        for a, v in dn_by_col.get(t, ()):
            eqs[(a, u)][j] = eqs[(a, u)].get(j, 0) + v
        for b, v in dm_by_row.get(u, ()):
            eqs[(t, b)][j] = eqs[(t, b)].get(j, 0) + v
    keys = sorted(set(eqs) | set(diff))
    rows = [{j: v for j, v in eqs.get(k, {}).items() if v} for k in keys]
    rhs = [diff.get(k, 0) for k in keys]
    sol = linalg.solve(rows, rhs, len(unknowns))
    if sol is None:
        return None
    return {unknowns[j]: v for j, v in sol.items()}


# -- truncations -----------------------------------------------------------


def i_star_push(M: LMod, Q: int, cells: Sequence[int], loc: LocalComplex | None = None):
    """``M -> i_{Q*} C`` for a set of local cells closed under the local differential's cokernel.

    ``cells`` must be a union of whole irreducible types of ``i_Q^* M`` (a
    direct summand as a complex).  Returns the morphism.
    """
    loc = loc or local_complex(M, Q)
    pick = list(cells)
    index = {c: k for k, c in enumerate(pick)}
    T = LMod.from_cells(M.datum, M.poset, [loc.cells[c] for c in pick],
                        {(index[t], index[s]): v for (t, s), v in loc.entries()
                         if t in index and s in index})
    entries = {(index[c], loc.keys[c][0]): 1 for c in pick}
    return LMorphism(M, T, entries)


def weight_predicate(datum: RootDatum, eta, R: int) -> Callable[[Irreducible], bool]:
    """Test ``xi >= eta`` for an ``L_Q``-irreducible in the weighted truncation below ``R``.

    ``eta`` is ``"mu"``, ``"nu"`` or a weight vector (a general profile).
    """
    def test(V: Irreducible) -> bool:
        Q = V.parabolic
        if eta == "mu":
            lam = datum.restrict(shifted(datum, V.weight), Q, R)
            root, _ = datum.cone_coords(lam, Q, R)
            return all(c > 0 for c in root)
        if eta == "nu":
            lam = datum.restrict(shifted(datum, V.weight), Q, R)
            root, _ = datum.cone_coords(lam, Q, R)
            return all(c >= 0 for c in root)
        lam = datum.restrict(tuple(a - b for a, b in zip(V.weight, eta)), Q, R)
        root, _ = datum.cone_coords(lam, Q, R)
        return all(c >= 0 for c in root)
    return test


def weight_truncate_graded(cells: Sequence[tuple[Irreducible, int]], test) -> tuple[list[int], list[int]]:
    """Split cell indices into (passing, failing) by the weight test on their type."""
    keep, cut = [], []
    for i, (irr, _) in enumerate(cells):
        (keep if test(irr) else cut).append(i)
    return keep, cut


def weight_truncate(M: LMod, Q: int, test) -> LMod:
    """``tau_Q^{>= eta} M = cone(M -> i_{Q*} tau^{not >= eta} i_Q^* M)[-1]``."""
    loc = local_complex(M, Q)
    _, cut = weight_truncate_graded(loc.cells, test)
    if not cut:
        return M
    phi = i_star_push(M, Q, cut, loc)
    return cocone(phi).module.relabel()


def degree_truncation_map(M: LMod, Q: int, n: int) -> LMorphism:
    """The unit ``M -> i_{Q*} tau^{>n} i_Q^* M`` with RREF choices of complements."""
    loc = local_complex(M, Q)
    cells: list[tuple[Irreducible, int]] = []
    D: dict = {}
    entries: dict = {}
    for typ in sorted(loc.blocks, key=lambda v: v.sort_key()):
        by_deg = loc.blocks[typ]
        # degree n: the image of d^n, one slot per RREF basis vector
        img = linalg.Echelon()
        for c in by_deg.get(n, []):
            img.add(loc.cols.get(c, {}))
        copy = {}
        for c in sorted(i for k, cs in by_deg.items() if k > n for i in cs):
            copy[c] = len(cells)
            cells.append(loc.cells[c])
            entries[(copy[c], loc.keys[c][0])] = 1
        for pivot in img.pivots():
            b = len(cells)
            cells.append((typ, n))
            for c, v in img.rows[pivot].items():
                D[(copy[c], b)] = v
            for c in by_deg.get(n, []):
                x = loc.cols.get(c, {}).get(pivot)
                if x:
                    entries[(b, loc.keys[c][0])] = x
        for (t, s), v in loc.entries():
            if s in copy and t in copy:
                D[(copy[t], copy[s])] = v
    T = LMod.from_cells(M.datum, M.poset, cells, D)
    return LMorphism(M, T, entries)


def degree_truncate(M: LMod, Q: int, n: int) -> LMod:
    """``tau_Q^{<= n} M = cone(M -> i_{Q*} tau^{>n} i_Q^* M)[-1]``."""
    phi = degree_truncation_map(M, Q, n)
    if not phi.target.slots:
        return M
    return cocone(phi).module.relabel()
