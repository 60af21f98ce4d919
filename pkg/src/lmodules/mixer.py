"""Mixed decompositions: peel off weighted cohomology building blocks one at a time."""

from __future__ import annotations

import warnings
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .builders import intersection_module, weighted_module
from .kostant import EtaOrder, Irreducible, bracket, kostant_element, order_rel
from .lmod import (LMod, LMorphism, _matmul, _sub, cocone, cone, extend_by_zero, is_quasi_iso,
                   local_cohomology, local_cohomology_supports, local_complex, restrict_closed,
                   shift, stratum_module, support_ok, validate)
from .microsupport import TypeTable, q_bounds, self_contragredient, type_eta
from .roots import RootDatum, leq, members, parabolic_name, popcount


class MixError(RuntimeError):
    pass


@dataclass
class Obstruction:
    """Why a morphism could not be extended past a stratum."""

    P: int
    culprits: list  # (V_P, degree) with nonvanishing local cohomology
    message: str

    def __str__(self) -> str:
        return self.message


class ExtensionFailed(MixError):
    def __init__(self, obstruction: Obstruction):
        super().__init__(str(obstruction))
        self.obstruction = obstruction


def building_block(M: LMod, R: int, V: Irreducible, d: int, eta: str) -> LMod:
    """``W^eta C(V_R)[-d]`` on the strata of ``M`` below ``R``, extended by zero to ``M``."""
    W = weighted_module(M.datum, R, V, eta, poset=M.poset)
    return shift(extend_by_zero(W, M.poset), -d)


# -- seeds -----------------------------------------------------------------


def find_seed(M: LMod, V: Irreducible, d: int, eta: str) -> dict:
    """Seed on the stratum of ``V``.

    For ``mu`` this is a cocycle of ``i_R^! M`` (as {slot: scalar}) of type ``V``
    in degree ``d`` whose class survives in ``type_{mu,V}``.  For ``nu`` it is a
    functional on the ``V``-cells of ``i_R^* M`` in degree ``d`` (as {slot: scalar})
    killing boundaries and nonzero on ``type_{nu,V}``.
    """
    R = V.parabolic
    lo, hi = q_bounds(M.datum, V, M.top)
    if eta == "mu":
        stalk = local_complex(stratum_module(M, R), R)
        window = local_complex(restrict_closed(M, hi), R)
        bnd = window.boundaries(V, d)
        at_r = M.at(R)
        slot_of = {c: at_r[stalk.keys[c][0]] for c in range(len(stalk.cells))}
        cell_in_window = {_restricted_slot(M, hi, window.keys[c][0]): c for c in range(len(window.cells))
                          if window.cells[c][0] == V and window.keys[c][1].length == 0}
        for z in stalk.cocycles(V, d):
            image = {cell_in_window[slot_of[c]]: v for c, v in z.items()}
            if not bnd.contains(image):
                return {slot_of[c]: v for c, v in z.items()}
        raise MixError(f"no cocycle of {V.describe(M.datum.rank)} in degree {d} survives in the "
                       "mu-type; the representation is not maximal")
    full = local_complex(M, R)
    window = local_complex(restrict_closed(M, lo), R)
    bnd = full.boundaries(V, d)
    # window cells are a subset of the full local complex cells
    index = {full.keys[c][0]: c for c in range(len(full.cells)) if full.cells[c][0] == V}
    window_slots = {c: _restricted_slot(M, lo, window.keys[c][0]) for c in range(len(window.cells))}
    for z in window.cocycles(V, d):
        lifted = {index[window_slots[c]]: v for c, v in z.items()}
        if not bnd.contains(lifted):
            cells = [c for c in full.blocks[V].get(d, [])]
            rows = [{cells.index(c): v for c, v in b.items()} for b in bnd.basis()]
            rows.append({cells.index(c): v for c, v in lifted.items()})
            rhs = [0] * (len(rows) - 1) + [1]
            f = linalg.solve(rows, rhs, len(cells))
            return {full.keys[cells[j]][0]: v for j, v in f.items()}
    raise MixError(f"no class of {V.describe(M.datum.rank)} in degree {d} of the nu-type maps "
                   "nontrivially to the stalk; the representation is not minimal")


def _restricted_slot(M: LMod, Q: int, k: int) -> int:
    """Slot index in ``M`` of the ``k``-th slot of ``restrict_closed(M, Q)``."""
    kept = [i for i, s in enumerate(M.slots) if leq(s.parabolic, Q)]
    return kept[k]


# -- extension ---------------------------------------------------------------


def _solve_rows(src: LMod, dst: LMod, fixed: dict, free: list, rows_of: set) -> dict | None:
    """Solve ``D_dst phi = phi D_src`` on the target rows ``rows_of``."""
    col = {u: j for j, u in enumerate(free)}
    dd_by_col = defaultdict(list)
    for (a, b), v in dst.D.items():
        dd_by_col[b].append((a, v))
    ds_by_row = defaultdict(list)
    for (b, s), v in src.D.items():
        ds_by_row[b].append((s, v))
    eqs: dict = defaultdict(dict)
    rhs: dict = defaultdict(Fraction)

    def add(key, var, coef):
        if var in col:
            eqs[key][col[var]] = eqs[key].get(col[var], 0) + coef
        elif var in fixed:
            rhs[key] -= coef * fixed[var]

    # (D_dst phi - phi D_src)[t, s] = 0 for rows t in rows_of
    for var in list(free) + list(fixed):
        u, b = var
        for t, v in dd_by_col.get(u, ()):
            if t in rows_of:
                add((t, b), var, v)
        if u in rows_of:
            for s, v in ds_by_row.get(b, ()):
                add((u, s), var, -v)
    keys = sorted(set(eqs) | set(rhs))
    rows = [{j: v for j, v in eqs.get(k, {}).items() if v} for k in keys]
    sol = linalg.solve(rows, [rhs.get(k, 0) for k in keys], len(free))
    if sol is None:
        return None
    return {free[j]: v for j, v in sol.items()}


def _unknowns(src: LMod, dst: LMod, rows: set) -> list:
    """Entries ``(t, s)`` a degree-0 map may have, for target rows ``rows``."""
    by_irr = defaultdict(lambda: defaultdict(list))
    for s, ss in enumerate(src.slots):
        by_irr[ss.irr][ss.degree].append(s)
    out = []
    for t in sorted(rows):
        tt = dst.slots[t]
        found = []
        for irr, by_deg in by_irr.items():
            if not leq(tt.parabolic, irr.parabolic):
                continue
            w = kostant_element(src.datum, irr, tt.irr)
            if w is not None:
                found.extend(by_deg.get(tt.degree - w.length, ()))
        out.extend((t, s) for s in sorted(found))
    return out


def extend_chain_map(src: LMod, dst: LMod, fixed: dict, strata: list[int], stepwise: bool = True):
    """Extend ``fixed`` entries to a chain map ``src -> dst``.

    Rows (target slots) are solved one stratum at a time in the given order
    with the earlier strata held fixed; if that greedy pass gets stuck the
    whole system is solved at once.  Returns the entries or the stratum at
    which the system is inconsistent.
    """
    entries = dict(fixed)
    if stepwise:
        ok = True
        for P in strata:
            rows = {t for t, s in enumerate(dst.slots) if s.parabolic == P}
            free = _unknowns(src, dst, rows)
            sol = _solve_rows(src, dst, entries, free, rows)
            if sol is None:
                ok = False
                break
            entries.update(sol)
        if ok:
            return entries, None
    rows = {t for t, s in enumerate(dst.slots) if s.parabolic in strata}
    free = _unknowns(src, dst, rows)
    sol = _solve_rows(src, dst, dict(fixed), free, rows)
    if sol is None:
        # locate the first stratum whose rows cannot be satisfied
        entries = dict(fixed)
        for P in strata:
            rows = {t for t, s in enumerate(dst.slots) if s.parabolic == P}
            sol = _solve_rows(src, dst, entries, _unknowns(src, dst, rows), rows)
            if sol is None:
                return None, P
            entries.update(sol)
        return None, strata[-1] if strata else -1
    out = dict(fixed)
    out.update(sol)
    return out, None


def _strata_below(M: LMod, R: int) -> list[int]:
    return sorted((P for P in M.poset if leq(P, R) and P != R), key=lambda q: (-popcount(q), -q))


def _obstruction(M: LMod, V: Irreducible, d: int, eta: str, side: str, P: int) -> Obstruction:
    datum, R = M.datum, V.parabolic
    culprits = []
    strata = [P] + [Q for Q in _strata_below(M, R) if Q != P]
    for Q in strata:
        k = len(members(R & ~Q))
        coh = local_cohomology_supports(M, Q) if side == "from_wc" else local_cohomology(M, Q)
        for (irr, deg), m in sorted(coh.items(), key=lambda x: (x[0][0].sort_key(), x[0][1])):
            b = bracket(datum, V, irr)
            if b is None or irr.parabolic == R:
                continue
            if side == "from_wc":
                hit = order_rel(datum, irr, V, "plus_str" if eta == "mu" else "plus") and deg == b + d + 1
            else:
                hit = order_rel(datum, irr, V, "minus" if eta == "mu" else "minus_str") and deg == b + k + d - 1
            if hit:
                culprits.append((irr, deg))
        if culprits:
            P = Q
            break
    names = ", ".join(f"{v.describe(datum.rank)} in degree {deg}" for v, deg in culprits) or "none found"
    where = "i_P^!" if side == "from_wc" else "i_P^*"
    return Obstruction(P, culprits, f"cannot extend past stratum {parabolic_name(P, datum.rank)}: "
                                    f"nonvanishing {where} cohomology at {names}")


def extend_morphism(M: LMod, V: Irreducible, d: int, side: str, eta: str, seed: dict) -> LMorphism:
    """Extend a seed on the stratum of ``V`` to a morphism with ``W^eta C(V)[-d]``.

    ``side == "from_wc"``: a morphism ``B -> M`` whose top component is the
    cocycle ``seed`` ({slot of M: scalar}).  ``side == "to_wc"``: a morphism
    ``M -> B`` whose top row is the functional ``seed``.
    """
    R = V.parabolic
    B = building_block(M, R, V, d, eta)
    top = B.at(R)
    if len(top) != 1:
        raise MixError("building block should have one slot on its own stratum")
    b_top = top[0]
    strata = _strata_below(M, R)
    if side == "from_wc":
        fixed = {(t, b_top): Fraction(v) for t, v in seed.items()}
        entries, bad = extend_chain_map(B, M, fixed, strata)
        if entries is None:
            raise ExtensionFailed(_obstruction(M, V, d, eta, side, bad))
        phi = LMorphism(B, M, entries)
    elif side == "to_wc":
        fixed = {(b_top, s): Fraction(v) for s, v in seed.items()}
        entries, bad = extend_chain_map(M, B, fixed, strata)
        if entries is None:
            raise ExtensionFailed(_obstruction(M, V, d, eta, side, bad))
        phi = LMorphism(M, B, entries)
    else:
        raise ValueError(f"unknown side {side!r}")
    err = phi.check()
    if err:
        raise MixError(f"extended morphism is invalid: {err}")
    return phi


# -- one elimination step ------------------------------------------------------


@dataclass
class Block:
    parabolic: int
    irr: Irreducible
    degree: int
    morphism: LMorphism
    before: LMod  # M_i
    after: LMod  # M_{i-1}
    building_block: LMod


def _type_counter(types: dict) -> Counter:
    out = Counter()
    for V, t in types.items():
        for deg, m in t.items():
            out[(V, deg)] += m
    return out


def remove_extremal(M: LMod, V: Irreducible, d: int, eta: str) -> tuple[LMorphism, LMod]:
    """Cone off one copy of ``V[-d]`` from ``type_eta(M)``."""
    seed = find_seed(M, V, d, eta)
    if eta == "mu":
        phi = extend_morphism(M, V, d, "from_wc", eta, seed)
        out = cone(phi).module.relabel()
    else:
        phi = extend_morphism(M, V, d, "to_wc", eta, seed)
        out = cocone(phi).module.relabel()
    return phi, out


def choose_extremal(M: LMod, types: dict, eta: str) -> tuple[Irreducible, int]:
    order = EtaOrder(M.datum, M.poset, list(types), eta)
    pool = order.maximal(types) if eta == "mu" else order.minimal(types)
    V = min(pool, key=lambda v: v.sort_key())
    degs = [k for k, m in types[V].items() if m]
    return V, (min(degs) if eta == "mu" else max(degs))


@dataclass
class MixedData:
    eta: str
    blocks: list  # Block, in the order discovered (M_N first)
    terminal: LMod
    initial_dim: int
    checks: dict = field(default_factory=dict)

    @property
    def ordered(self) -> list:
        """Blocks indexed 1..N as in the definition (first discovered is block N)."""
        return list(reversed(self.blocks))

    def table(self, rank: int) -> list[dict]:
        rows = []
        n = len(self.blocks)
        for k, b in enumerate(self.blocks):
            rows.append({"index": n - k, "parabolic": parabolic_name(b.parabolic, rank),
                         "representation": b.irr.describe(rank), "highest_weight": list(b.irr.weight),
                         "degree": b.degree})
        return rows


def mix(M: LMod, eta: str = "mu", check: bool = True) -> MixedData:
    """Decompose ``M`` into weighted cohomology building blocks."""
    if eta not in ("mu", "nu"):
        raise ValueError("eta must be 'mu' or 'nu'")
    err = validate(M)
    if err:
        raise MixError(f"input is not a valid L-module: {err}")
    if not M.slots:
        return MixedData(eta, [], M, 0, {"terminal_zero": True, "steps": 0})
    current = M
    types = type_eta(current, eta)
    initial = sum(_type_counter(types).values())
    blocks = []
    problems = []
    while types:
        if len(blocks) >= initial:
            raise MixError("mixing did not terminate within dim type_eta steps")
        V, d = choose_extremal(current, types, eta)
        phi, nxt = remove_extremal(current, V, d, eta)
        new_types = type_eta(nxt, eta)
        if check:
            want = _type_counter(types)
            want[(V, d)] -= 1
            if +want != +_type_counter(new_types):
                problems.append(f"step {len(blocks) + 1}: types did not drop by exactly {V} in degree {d}")
        B = phi.source if eta == "mu" else phi.target
        blocks.append(Block(V.parabolic, V, d, phi, current, nxt, B))
        current, types = nxt, new_types
    data = MixedData(eta, blocks, current, initial)
    data.checks = {"steps": len(blocks), "type_drops": problems}
    if check:
        data.checks.update(certify(M, data))
    return data


# -- certificates --------------------------------------------------------------


def multiplicities_match(M: LMod, data: MixedData) -> bool:
    want = Counter()
    for V, t in type_eta(M, data.eta).items():
        want[V] += sum(t.values())
    got = Counter(b.irr for b in data.blocks)
    return +want == +got


def monotone(datum: RootDatum, data: MixedData, poset) -> bool:
    """Blocks 1..N nondecreasing for ``<=_mu`` / nonincreasing for ``<=_nu``."""
    seq = [b.irr for b in data.ordered]
    if not seq:
        return True
    order = EtaOrder(datum, poset, seq, data.eta)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if data.eta == "mu" and order.lt(seq[j], seq[i]):
                return False
            if data.eta == "nu" and order.lt(seq[i], seq[j]):
                return False
    return True


def reconstructs(block: Block, eta: str) -> bool:
    """Rebuild ``M_i`` from ``M_{i-1}`` and the building block; check quasi-isomorphism.

    mu: ``M_i`` is compared with ``cone(beta)[-1]`` where ``beta: cone(phi) -> B[1]``.
    nu: ``M_i`` is compared with ``cone(gamma)`` where ``gamma: B[-1] -> cone(psi)[-1]``.
    The comparison map is the identity on the copy of ``M_i`` plus the
    building-block morphism on the other copy of ``B``.
    """
    phi = block.morphism
    if eta == "mu":
        nb = len(phi.source.slots)
        rebuilt = cocone(cone(phi).beta).module  # slots: B[1], M, B
        src, dst = rebuilt, block.before
        m_off, b_off = nb, nb + len(dst.slots)
        fixed = {(i, m_off + i): Fraction(1) for i in range(len(dst.slots))}
        guesses = [{(t, b_off + s): sign * v for (t, s), v in phi.entries.items()} for sign in (-1, 1)]
    else:
        n_m = len(phi.source.slots)
        B1 = shift(phi.target, -1)
        cc = cocone(phi).module  # slots: M, B[-1]
        gamma = None
        for sign in (1, -1):
            g = LMorphism(B1, cc, {(n_m + i, i): sign for i in range(len(B1.slots))})
            if g.check() is None:
                gamma = g
                break
        if gamma is None:
            return False
        rebuilt = cone(gamma).module  # slots: B, M, B[-1]
        src, dst = block.before, rebuilt
        nb = len(B1.slots)
        fixed = {(nb + i, i): Fraction(1) for i in range(len(src.slots))}
        guesses = [{(b, s): sign * v for (b, s), v in phi.entries.items()} for sign in (1, -1)]
    for extra in guesses:
        entries = dict(fixed)
        entries.update(extra)
        candidate = LMorphism(src, dst, entries)
        if candidate.check() is None:
            return is_quasi_iso(candidate)
    entries = _complete(src, dst, fixed)
    if entries is None:
        return False
    return is_quasi_iso(LMorphism(src, dst, entries))


def _complete(src: LMod, dst: LMod, fixed: dict) -> dict | None:
    """Find a chain map agreeing with ``fixed``; other entries are unknowns."""
    free = [(t, s) for t in range(len(dst.slots)) for s in range(len(src.slots))
            if (t, s) not in fixed and support_ok(src.datum, src.slots[s], dst.slots[t], 0)]
    sol = _solve_rows(src, dst, fixed, free, set(range(len(dst.slots))))
    if sol is None:
        return None
    out = dict(fixed)
    out.update(sol)
    return out


def certify(M: LMod, data: MixedData) -> dict:
    out = {
        "terminal_zero": all(not local_cohomology(data.terminal, P) for P in data.terminal.poset),
        "steps_equal_type_dim": len(data.blocks) == data.initial_dim,
        "multiplicities": multiplicities_match(M, data),
        "monotone": monotone(M.datum, data, M.poset),
        "valid_modules": all(validate(b.after) is None for b in data.blocks),
        "reconstruction": all(reconstructs(b, data.eta) for b in data.blocks),
    }
    return out


def mix_ok(data: MixedData) -> bool:
    c = data.checks
    return (not c.get("type_drops") and c.get("terminal_zero", False) and c.get("steps_equal_type_dim", True)
            and c.get("multiplicities", True) and c.get("monotone", True) and c.get("valid_modules", True)
            and c.get("reconstruction", True))


@dataclass
class ICWCReport:
    label: str
    E: Irreducible
    parity: str
    status: str  # PASS, FAIL or UNVERIFIED
    blocks: list
    strong_blocks: list
    warnings: list
    checks: dict

    @property
    def passed(self) -> bool:
        return self.status == "PASS"


PARITY = {"m": ("m", "mu"), "mu": ("m", "mu"), "n": ("n", "nu"), "nu": ("n", "nu")}


def verify_ic_wc(label_or_datum, E, parity: str = "m", compute: bool = True) -> ICWCReport:
    """Certificate that the mixed data of ``I_p C(E)`` has a unique strong block ``E``.

    With ``compute=False`` only the input checks and warnings run; the result
    is UNVERIFIED.  Useful for large groups where the mixing is slow.
    """
    from .roots import build
    datum = build(label_or_datum) if isinstance(label_or_datum, str) else label_or_datum
    if parity not in PARITY:
        raise ValueError(f"unknown parity {parity!r}")
    p, eta = PARITY[parity]
    if not isinstance(E, Irreducible):
        E = Irreducible(datum.full, tuple(E))
    if E.parabolic != datum.full:
        raise ValueError("coefficients must be a representation of G")
    if not self_contragredient(datum, E):
        raise ValueError(f"{E.describe(datum.rank)} is not self-contragredient")
    notes = []
    if datum.family in "DEF":
        msg = (f"{datum.label} involves type {datum.family}: outside the hypotheses of the "
               "intersection = weighted cohomology theorem; result is unverified")
        warnings.warn(msg)
        notes.append(msg)
    if not compute:
        notes.append("mixing skipped on request")
        return ICWCReport(datum.label, E, p, "UNVERIFIED", [], [], notes, {"computed": False})
    M = intersection_module(datum, E, p)
    data = mix(M, eta)
    strong = [b for b in data.blocks if self_contragredient(datum, b.irr)]
    ok = (mix_ok(data) and len(strong) == 1 and strong[0].irr == E and strong[0].degree == 0)
    status = "UNVERIFIED" if notes else ("PASS" if ok else "FAIL")
    return ICWCReport(datum.label, E, p, status, data.table(datum.rank),
                      [b.irr for b in strong], notes, dict(data.checks))
