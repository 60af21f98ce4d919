"""Acceptance suite: criteria 1-9, exact arithmetic throughout.

Run with pytest (one PASS/FAIL line per criterion is printed in the terminal
summary) or directly: ``python tests/test_acceptance.py``.
"""

import os
import random
import subprocess
import sys
import time
import warnings
from collections import Counter
from fractions import Fraction

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from lmodules.builders import (check_local_formulas, intersection_module, stratum_dims,
                               weighted_module)
from lmodules.complexes import check_short_exact_sequence
from lmodules.kostant import EtaOrder, Irreducible, bracket, character_ge, kostant, order_rel
from lmodules.lmod import (cone, degree_truncation_map, direct_sum, extend_by_zero, i_star_push,
                           local_complex, restrict_closed, restrict_to, shift, validate,
                           weight_predicate, weight_truncate_graded, LMorphism)
from lmodules.microsupport import (TypeTable, q_bounds, self_contragredient, strong_ms, weak_ms)
from lmodules.mixer import mix, mix_ok, verify_ic_wc
from lmodules.roots import build, interval, leq, members
from lmodules.serialize import canonical, lmod_from_json, lmod_to_json, mixed_to_dict

TYPES = ["A1", "A2", "B2", "G2"]
SELF_DUAL = {"A1": (1,), "A2": (1, 1), "B2": (1, 0), "G2": (1, 0)}
RESULTS: dict = {}


def sample_weights(d):
    """0 and each fundamental weight."""
    return [(0,) * d.rank] + [tuple(int(i == j) for j in range(d.rank)) for i in range(d.rank)]


def pairs(d):
    return [(P, Q) for Q in range(d.full + 1) for P in range(d.full + 1) if leq(P, Q)]


def wc_matrix():
    """(datum, R, V_R, eta, module) for the weighted cohomology test matrix."""
    out = []
    for label in TYPES:
        d = build(label)
        for lam in sample_weights(d):
            for R in range(d.full + 1):
                for eta in ("mu", "nu"):
                    V = Irreducible(R, lam)
                    out.append((d, R, V, eta, weighted_module(d, R, V, eta)))
    return out


def ic_matrix():
    out = []
    for label in TYPES:
        d = build(label)
        for lam in [(0,) * d.rank, SELF_DUAL[label]]:
            E = Irreducible(d.full, lam)
            for p in ("m", "n"):
                out.append((d, E, p, intersection_module(d, E, p)))
    return out


# -- criterion 1 ---------------------------------------------------------------


def criterion_1():
    checked = 0
    for label in TYPES:
        d = build(label)
        for lam in sample_weights(d):
            for P, Q in pairs(d):
                V = Irreducible(Q, lam)
                comps = kostant(d, P, V)
                if len(comps) * len(d.weyl_subgroup(P)) != len(d.weyl_subgroup(Q)):
                    return False, f"{label} P={P} Q={Q}: wrong number of components"
                for c in comps:
                    if any(c.target.weight[i] < 0 for i in members(P)):
                        return False, f"{label}: component {c.target} not dominant"
                    if c.degree != d.inversion_count(c.w):
                        return False, f"{label}: degree is not the inversion count"
                if len({c.target for c in comps}) != len(comps):
                    return False, f"{label}: repeated components"
                checked += 1
            # composition through every intermediate parabolic
            for R in range(d.full + 1):
                V = Irreducible(R, lam)
                for Q in range(d.full + 1):
                    for P in range(d.full + 1):
                        if not (leq(P, Q) and leq(Q, R)):
                            continue
                        direct = {c.target: c.degree for c in kostant(d, P, V)}
                        composite = Counter()
                        lengths = {}
                        for c2 in kostant(d, Q, V):
                            for c1 in kostant(d, P, c2.target):
                                composite[c1.target] += 1
                                lengths[c1.target] = c1.degree + c2.degree
                        if set(composite) != set(direct) or any(m != 1 for m in composite.values()):
                            return False, f"{label}: composition is not a bijection at {P},{Q},{R}"
                        if lengths != direct:
                            return False, f"{label}: lengths are not additive at {P},{Q},{R}"
    return True, f"{checked} (P, Q, lambda) cases"


# -- criterion 2 ---------------------------------------------------------------


def criterion_2():
    n = 0
    for d, R, V, eta, M in wc_matrix():
        rep = check_local_formulas(d, R, V, eta, M)
        if not rep.ok:
            return False, f"{d.label} R={R} {V} {eta}: {rep.mismatches[:2]}"
        n += 1
    return True, f"{n} modules, every stratum, stalk + costalk + link"


# -- criterion 3 ---------------------------------------------------------------


def criterion_3():
    n = 0
    for d, R, VR, eta, M in wc_matrix():
        table = TypeTable(M)
        weak = weak_ms(M, "full", table)
        expect = {c.target for P in interval(0, R) for c in kostant(d, P, VR)
                  if order_rel(d, c.target, VR, "zero")}
        if set(weak) != expect:
            return False, f"{d.label} R={R} {VR} {eta}: membership differs"
        for V in expect:
            b = bracket(d, VR, V)
            k = len(members(R & ~V.parabolic))
            for Q in table.windows(V, "full"):
                got = dict(+table.q_type(V, Q))
                if eta == "mu":
                    want = {b + k: 1} if Q == V.parabolic else {}
                else:
                    want = {b: 1} if Q == R else {}
                if got != want:
                    return False, f"{d.label} {eta} {V} Q={Q}: type {got} != {want}"
        em = weak_ms(M, eta, table)
        if set(em) != {VR} or dict(+table.eta_type(VR, eta)) != {0: 1}:
            return False, f"{d.label} R={R} {VR} {eta}: eta micro-support {em}"
        n += 1
    return True, f"{n} modules"


# -- criterion 4 ---------------------------------------------------------------


def criterion_4():
    n = 0
    for d, E, p, M in ic_matrix():
        table = TypeTable(M)
        strong = strong_ms(M, "full", table)
        expect = {c.target for P in interval(0, d.full) for c in kostant(d, P, E)
                  if order_rel(d, c.target, E, "zero") and self_contragredient(d, c.target)}
        if set(strong) != expect:
            return False, f"{d.label} {E} {p}: strong micro-support differs"
        for V in expect:
            P = V.parabolic
            half = Fraction(stratum_dims(d, P)[2], 2)
            k = d.rank - len(members(P))
            lo, hi = q_bounds(d, V, d.full)
            for Q in table.windows(V, "full"):
                got = dict(+table.q_type(V, Q))
                if p == "m":
                    want = {half + k: 1} if Q == lo == P else {}
                else:
                    want = {half: 1} if Q == hi == d.full else {}
                if got != want:
                    return False, f"{d.label} {E} {p} {V} Q={Q}: {got} != {want}"
        eta = "mu" if p == "m" else "nu"
        if set(strong_ms(M, eta, table)) != {E}:
            return False, f"{d.label} {E} {p}: eta strong micro-support is not {{E}}"
        n += 1
    return True, f"{n} modules"


# -- criterion 5 ---------------------------------------------------------------


def _random_block(rng, d):
    R = rng.randrange(d.full + 1)
    lam = tuple(rng.randrange(2) for _ in range(d.rank))
    M = weighted_module(d, R, Irreducible(R, lam), rng.choice(["mu", "nu"]))
    return shift(extend_by_zero(M, interval(0, d.full)), rng.randrange(-1, 2))


def _random_map(rng, M):
    d = M.datum
    kind = rng.choice(["degree", "weight", "scalar"])
    Q = min(M.poset)  # the closed stratum
    if kind == "degree":
        return degree_truncation_map(M, Q, rng.randrange(-1, 3))
    if kind == "weight":
        R = rng.choice([P for P in M.poset if leq(Q, P)])
        test = weight_predicate(d, rng.choice(["mu", "nu"]), R)
        loc = local_complex(M, Q)
        _, cut = weight_truncate_graded(loc.cells, test)
        return i_star_push(M, Q, cut, loc)
    c = Fraction(rng.choice([-2, -1, 1, 3]))
    return LMorphism(M, M, {(i, i): c for i in range(len(M.slots))})


def _les_type_problems(C, n_source, P, Q):
    keep = [i for i, s in enumerate(C.slots) if leq(s.parabolic, Q)]
    loc = local_complex(restrict_to(C, [S for S in C.poset if leq(S, Q)]), P)
    sub = {c for c, (slot, _) in enumerate(loc.keys) if keep[slot] >= n_source}
    return check_short_exact_sequence(loc, sub)


def _compare_problems(M, P, Q, Qp):
    Mq = restrict_closed(M, Qp)
    loc = local_complex(Mq, P)
    sub = {c for c, (slot, _) in enumerate(loc.keys) if leq(Mq.slots[slot].parabolic, Q)}
    return check_short_exact_sequence(loc, sub)


def random_instances(count=100, seed=20261015):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        d = build(rng.choice(["A2", "B2"]))
        M = _random_block(rng, d)
        if rng.random() < 0.5:
            M = direct_sum(M, _random_block(rng, d))
        cones = []
        for _ in range(rng.randrange(3)):
            c = cone(_random_map(rng, M))
            cones.append(c)
            M = c.module
        Qp = rng.randrange(d.full + 1)
        Q = rng.choice([S for S in interval(0, Qp)])
        P = rng.choice([S for S in interval(0, Q)])
        out.append((M, cones, P, Q, Qp))
    return out


def criterion_5():
    connecting = 0
    n_cones = 0
    for M, cones, P, Q, Qp in random_instances():
        if validate(M) is not None:
            return False, "a random module failed validation"
        problems = _compare_problems(M, P, Q, Qp)
        if problems:
            return False, f"compare sequence at {P},{Q},{Qp}: {problems[0]}"
        for c in cones:
            for S in c.module.poset:
                for T in interval(0, S):
                    problems = _les_type_problems(c.module, c.n_source, T, S)
                    if problems:
                        return False, f"type sequence of a cone at {T},{S}: {problems[0]}"
            n_cones += 1
        sub_h = _sub_cohomology(M, P, Q, Qp)
        connecting += sub_h
    return True, f"100 instances, {n_cones} cones, {connecting} with nonzero relative terms"


def _sub_cohomology(M, P, Q, Qp):
    """1 when both outer terms of the compare sequence are nonzero (a non-degenerate instance)."""
    Mq = restrict_closed(M, Qp)
    a = local_complex(restrict_closed(Mq, Q), P).cohomology()
    b = local_complex(Mq, P).cohomology()
    return int(bool(a) and bool(b))


# -- criterion 6 ---------------------------------------------------------------


def mix_matrix():
    mods = []
    for d, R, V, eta, M in wc_matrix():
        mods.append((f"W^{eta}C {d.label} R={R} {V.weight}", extend_by_zero(M, interval(0, d.full))))
    for d, E, p, M in ic_matrix():
        mods.append((f"I^{p}C {d.label} {E.weight}", M))
    for label in ("A2", "B2"):
        d = build(label)
        for lam in sample_weights(d):
            for R in (d.full, 1):
                for e1 in ("mu", "nu"):
                    W = extend_by_zero(weighted_module(d, R, Irreducible(R, lam), e1), interval(0, d.full))
                    I = shift(intersection_module(d, Irreducible(d.full, lam), "m"), 1)
                    mods.append((f"sum {label} R={R} {lam} {e1}", direct_sum(W, I)))
    return mods


def criterion_6():
    runs = steps = 0
    for name, M in mix_matrix():
        for eta in ("mu", "nu"):
            data = mix(M, eta)
            c = data.checks
            if not mix_ok(data):
                failed = [k for k, v in c.items() if v is False or (k == "type_drops" and v)]
                return False, f"{name} eta={eta}: failed {failed}"
            runs += 1
            steps += len(data.blocks)
    return True, f"{runs} mixing runs, {steps} building blocks, all certificates hold"


# -- criterion 7 ---------------------------------------------------------------


def criterion_7():
    for label in TYPES:
        d = build(label)
        for parity in ("m", "n"):
            rep = verify_ic_wc(d, (0,) * d.rank, parity)
            if rep.status != "PASS":
                return False, f"{label} {parity}: {rep.status} {rep.checks}"
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rep = verify_ic_wc("D4", (0, 0, 0, 0), "m", compute=False)
    if rep.status != "UNVERIFIED" or not rep.warnings or not caught:
        return False, "D4 did not take the warning path"
    if "type D" not in rep.warnings[0]:
        return False, f"unexpected warning {rep.warnings[0]!r}"
    return True, "8 PASS certificates; D4 flagged UNVERIFIED with a warning"


# -- criterion 8 ---------------------------------------------------------------


def criterion_8():
    n_pairs = n_elems = 0
    for label in TYPES:
        d = build(label)
        seeds = [Irreducible(R, lam) for lam in sample_weights(d) for R in range(d.full + 1)]
        seeds += [Irreducible(d.full, SELF_DUAL[label])]
        for eta in ("mu", "nu"):
            order = EtaOrder(d, range(d.full + 1), seeds, eta)
            bad = order.antisymmetry_violations()
            if bad:
                return False, f"{label} {eta}: antisymmetry fails for {bad[0]}"
            for a, b in order.generating_pairs():
                child_up = a.parabolic != b.parabolic and leq(a.parabolic, b.parabolic)
                if child_up:
                    strict = eta == "nu" or order_rel(d, a, b, "minus_str")
                else:
                    strict = eta == "mu"
                if not character_ge(d, b, a, strict=strict):
                    return False, f"{label} {eta}: character not monotone on {a} -> {b}"
                n_pairs += 1
            n_elems += len(order.universe)
    return True, f"{n_elems} universe elements, {n_pairs} generating pairs"


# -- criterion 9 ---------------------------------------------------------------


def criterion_9():
    mods = [M for _, M in mix_matrix()]
    mods += [M for M, _, _, _, _ in random_instances(30, seed=7)]
    for M in mods:
        text = lmod_to_json(M)
        back = lmod_from_json(text)
        if back != canonical(M) or lmod_to_json(back) != text:
            return False, f"round trip failed for {M}"
    # deterministic bytes across two separate processes
    outs = []
    for _ in range(2):
        code = ("import sys; from lmodules.cli import main; "
                "main(['build', 'ic', 'B2', '0,1', 'n']); "
                "main(['verify', 'ic-wc', 'G2', '0', 'm', '--json'])")
        res = subprocess.run([sys.executable, "-c", code], capture_output=True, check=True)
        outs.append(res.stdout)
    if outs[0] != outs[1]:
        return False, "output bytes differ between runs"
    a = mixed_to_dict(mix(mods[-1], "mu"), 2, True)
    b = mixed_to_dict(mix(mods[-1], "mu"), 2, True)
    if a != b:
        return False, "mixing certificate differs between runs"
    return True, f"{len(mods)} modules round-tripped; byte-identical output across processes"


CRITERIA = {
    1: ("Kostant suite", criterion_1, 5),
    2: ("local-formula oracle", criterion_2, 30),
    3: ("micro-support of weighted cohomology", criterion_3, 60),
    4: ("micro-support of intersection cohomology", criterion_4, 60),
    5: ("exactness battery", criterion_5, 120),
    6: ("mixing theorem", criterion_6, 120),
    7: ("IC = WC certificate", criterion_7, 120),
    8: ("order sanity", criterion_8, 10),
    9: ("serialization", criterion_9, 10),
}


def run_criterion(n):
    name, fn, budget = CRITERIA[n]
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # report, do not hide
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - t0
    if ok and elapsed > budget:
        ok, detail = False, f"{detail}; took {elapsed:.1f}s, target {budget}s"
    line = f"criterion {n} ({name}): {'PASS' if ok else 'FAIL'} - {detail} [{elapsed:.1f}s]"
    RESULTS[n] = line
    return ok, line


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n):
    ok, line = run_criterion(n)
    print(line)
    assert ok, line


if __name__ == "__main__":
    results = [run_criterion(n) for n in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
