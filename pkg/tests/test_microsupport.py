from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lmodules.builders import intersection_module, weighted_module
from lmodules.kostant import Irreducible, kostant, order_rel
from lmodules.lmod import LMod
from lmodules.microsupport import (TypeTable, q_bounds, self_contragredient, strong_ms, type_eta,
                                   weak_ms)
from lmodules.roots import build, interval

A1, A2, B2 = build("A1"), build("A2"), build("B2")


def test_q_bounds():
    assert q_bounds(A2, Irreducible(0, (0, 0)), 3) == (0, 0)
    assert q_bounds(A1, Irreducible(0, (-2,)), 1) == (1, 1)
    assert q_bounds(A1, Irreducible(0, (-1,)), 1) == (0, 1)
    with pytest.raises(ValueError):
        q_bounds(A2, Irreducible(1, (0, 0)), 2)


@pytest.mark.parametrize("eta", ["mu", "nu"])
def test_type_of_weighted_module(eta):
    for d in (A1, A2, B2):
        for R in interval(0, d.full):
            V = Irreducible(R, (0,) * d.rank)
            M = weighted_module(d, R, V, eta)
            assert type_eta(M, eta) == {V: Counter({0: 1})}
            assert set(weak_ms(M, eta)) == {V}


def test_empty_module():
    M = LMod(A2, interval(0, 3), [])
    assert weak_ms(M) == {} and strong_ms(M) == {} and type_eta(M, "mu") == {}


def test_a1_boundary_type_vanishes():
    M = weighted_module(A1, 1, Irreducible(1, (0,)), "mu")
    t = TypeTable(M)
    assert not +t.q_type(Irreducible(0, (-2,)), 1)


def test_weak_micro_support_is_zero_order_set():
    E = Irreducible(3, (1, 1))
    M = weighted_module(A2, 3, E, "mu")
    expect = {c.target for P in interval(0, 3) for c in kostant(A2, P, E)
              if order_rel(A2, c.target, E, "zero")}
    assert set(weak_ms(M)) == expect


def test_self_contragredient():
    assert self_contragredient(A2, Irreducible(3, (0, 0)))
    assert not self_contragredient(A2, Irreducible(1, (1, 0)))
    assert not self_contragredient(A2, Irreducible(3, (1, 0)))
    assert self_contragredient(A2, Irreducible(3, (1, 1)))
    for lam in [(0, 0), (3, -5), (-1, 2)]:
        assert self_contragredient(A2, Irreducible(0, lam))


def test_strong_micro_support_of_ic():
    E = Irreducible(3, (0, 0))
    assert set(strong_ms(intersection_module(A2, E, "m"), "mu")) == {E}
    assert set(strong_ms(intersection_module(A2, E, "n"), "nu")) == {E}


def test_strong_micro_support_empty_for_non_self_dual():
    V = Irreducible(3, (1, 0))
    assert strong_ms(weighted_module(A2, 3, V, "mu"), "mu") == {}


@given(st.sampled_from(["A2", "B2", "G2"]), st.integers(0, 3), st.integers(0, 2), st.integers(0, 2))
def test_type_window_is_a_subset_of_full_window(label, R, a, b):
    d = build(label)
    V = Irreducible(R, (a, b))
    M = weighted_module(d, R, V, "nu")
    full = weak_ms(M, "full")
    for variant in ("mu", "nu"):
        assert set(weak_ms(M, variant)) <= set(full)
