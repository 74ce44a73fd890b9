import random

import pytest
from hypothesis import given, settings, strategies as st

from polyrew import diagram as dg
from polyrew.branchings import gen_diagrams
from polyrew.diagram import Diagram

from conftest import random_diagram
from oracles import oracle_canonical, oracle_class, oracle_equal, oracle_matches

SEED = 20260809


def w(n):
    return ("w",) * n


# --- composition ----------------------------------------------------------

def test_compose_h_with_identity(perm):
    tau = dg.generator(perm.sig, "tau", "pt")
    out = dg.compose_h(perm.sig, tau, dg.identity(w(1), "pt"))
    assert out.slices == (((), "tau", ("w",)),)


def test_compose_h_tau_tau_canonical(perm):
    tau = dg.generator(perm.sig, "tau", "pt")
    out = dg.compose_h(perm.sig, tau, tau)
    assert out.slices == (((), "tau", w(2)), (w(2), "tau", ()))


def test_compose_v_identity_left(perm):
    yb = perm.three_cell("yb").src
    out = dg.compose_v(perm.sig, dg.identity(w(3), "pt"), yb)
    assert out == dg.canonicalize(perm.sig, yb)


def test_compose_v_tau_tau_is_inv_source(perm):
    tau = dg.generator(perm.sig, "tau", "pt")
    out = dg.compose_v(perm.sig, tau, tau)
    assert dg.equal_up_to_exchange(perm.sig, out, perm.three_cell("inv").src)


def test_compose_v_boundary_mismatch(perm):
    tau = dg.generator(perm.sig, "tau", "pt")
    with pytest.raises(dg.DiagramError):
        dg.compose_v(perm.sig, tau, dg.identity(w(3), "pt"))


def test_size_additive_under_both_compositions(perm, monoid, ce):
    rng = random.Random(SEED)
    for poly in (perm, monoid, ce):
        for _ in range(20):
            d1 = random_diagram(poly, rng)
            d2 = random_diagram(poly, rng)
            h = dg.compose_h(poly.sig, d1, d2)
            assert h.size() == d1.size() + d2.size()
            d3 = random_diagram(poly, rng)
            tgt = dg.target(poly.sig, d3)
            d4 = Diagram(tgt, (), d3.at)
            assert dg.compose_v(poly.sig, d3, d4).size() == d3.size()


def test_compose_h_exchange_soundness(perm, ce):
    # both interleavings of a horizontal composite are the same cell
    rng = random.Random(SEED + 1)
    for poly in (perm, ce):
        for _ in range(15):
            d1 = random_diagram(poly, rng, max_size=3)
            d2 = random_diagram(poly, rng, max_size=3)
            t1 = dg.target(poly.sig, d1)
            left_first = dg.compose_v(
                poly.sig,
                dg.whisker(poly.sig, (), d1, d2.source),
                dg.whisker(poly.sig, t1, d2, (), at=d1.at))
            right_first = dg.compose_v(
                poly.sig,
                dg.whisker(poly.sig, d1.source, d2, (), at=d1.at),
                dg.whisker(poly.sig, (), d1, dg.target(poly.sig, d2)))
            h = dg.compose_h(poly.sig, d1, d2)
            assert dg.equal_up_to_exchange(poly.sig, h, left_first)
            assert dg.equal_up_to_exchange(poly.sig, h, right_first)


# --- canonicalization -----------------------------------------------------

def test_canonicalize_forced_swap(perm):
    d = Diagram(w(4), ((w(2), "tau", ()), ((), "tau", w(2))), "pt")
    assert dg.canonicalize(perm.sig, d).slices == (
        ((), "tau", w(2)), (w(2), "tau", ()))


def test_canonicalize_yb_source_fixed(perm):
    yb = perm.three_cell("yb").src
    assert dg.canonicalize(perm.sig, yb).slices == yb.slices


def _all_diagrams(poly, max_size, max_width):
    from polyrew.branchings import composable_words
    for word, at in composable_words(poly, max_width):
        yield from gen_diagrams(poly, word, at, max_size, max_width)


@pytest.mark.parametrize("fixture", ["perm", "monoid", "ce", "xi"])
def test_canonical_agrees_with_bfs_oracle_small(fixture, request):
    poly = request.getfixturevalue(fixture)
    count = 0
    for d in _all_diagrams(poly, 4, 4):
        cls = oracle_class(poly.sig, d)
        canon = dg.canonicalize(poly.sig, d).slices
        assert canon == oracle_canonical(poly.sig, d)
        for rep in cls:
            got = dg.canonicalize(poly.sig, Diagram(d.source, rep, d.at)).slices
            assert got == canon
        count += 1
    assert count > 10


def test_canonicalize_idempotent_random(perm, monoid, ce):
    rng = random.Random(SEED + 2)
    for poly in (perm, monoid, ce):
        for _ in range(40):
            d = random_diagram(poly, rng, max_size=5, max_width=5)
            c = dg.canonicalize(poly.sig, d)
            assert dg.canonicalize(poly.sig, c) == c


def test_distinct_classes_have_distinct_canonicals(perm):
    seen = {}
    for d in _all_diagrams(perm, 4, 4):
        canon = dg.canonicalize(perm.sig, d)
        cls = frozenset(oracle_class(perm.sig, d))
        if canon in seen:
            assert seen[canon] == cls
        seen[canon] = cls


def test_equal_up_to_exchange_examples(perm):
    tau = dg.generator(perm.sig, "tau", "pt")
    a = dg.compose_v(perm.sig,
                     dg.compose_h(perm.sig, tau, dg.identity(w(2), "pt")),
                     dg.compose_h(perm.sig, dg.identity(w(2), "pt"), tau))
    b = dg.compose_v(perm.sig,
                     dg.compose_h(perm.sig, dg.identity(w(2), "pt"), tau),
                     dg.compose_h(perm.sig, tau, dg.identity(w(2), "pt")))
    assert dg.equal_up_to_exchange(perm.sig, a, b)
    yb = perm.three_cell("yb")
    assert not dg.equal_up_to_exchange(perm.sig, yb.src, yb.tgt)


# --- occurrence counting --------------------------------------------------

def test_count_occurrences(ce, perm):
    alpha = ce.three_cell("alpha")
    assert dg.count_occurrences(alpha.src, "n") == 1
    assert dg.count_occurrences(dg.identity(w(3), "pt"), "tau") == 0
    rng = random.Random(SEED + 3)
    for _ in range(20):
        d1 = random_diagram(perm, rng)
        d2 = random_diagram(perm, rng)
        tgt = dg.target(perm.sig, d1)
        lifted = Diagram(tgt, d2.slices, d2.at) if d2.source == tgt else None
        if lifted is not None:
            both = dg.compose_v(perm.sig, d1, lifted)
            assert dg.count_occurrences(both, "tau") == (
                dg.count_occurrences(d1, "tau") + dg.count_occurrences(d2, "tau"))
        c = dg.canonicalize(perm.sig, d1)
        assert dg.count_occurrences(c, "tau") == dg.count_occurrences(d1, "tau")


# --- matching -------------------------------------------------------------

def test_match_associativity_overlap(monoid):
    peak = Diagram(w(4), (((), "m", w(2)), ((), "m", w(1)), ((), "m", ())), "pt")
    ms = dg.enumerate_matches(monoid.sig, peak, monoid.three_cell("alpha").src)
    assert len(ms) == 2


def test_match_self_is_identity_context(perm):
    yb = perm.three_cell("yb").src
    ms = dg.enumerate_matches(perm.sig, yb, yb)
    assert len(ms) == 1
    assert ms[0].top.slices == () and ms[0].bottom.slices == ()
    assert ms[0].left == () and ms[0].right == ()


def test_match_identity_host_no_matches(perm):
    tau = dg.generator(perm.sig, "tau", "pt")
    assert dg.enumerate_matches(perm.sig, dg.identity(w(2), "pt"), tau) == []


def test_degenerate_pattern_rejected(perm):
    with pytest.raises(dg.DiagramError, match="degenerate"):
        dg.enumerate_matches(perm.sig, dg.identity(w(2), "pt"),
                             dg.identity(w(1), "pt"))


def test_match_recomposition(perm, ce, monoid):
    rng = random.Random(SEED + 4)
    for poly in (perm, ce, monoid):
        pats = [c.src for c in poly.cells3]
        for _ in range(25):
            d = random_diagram(poly, rng, max_size=4)
            for pat in pats:
                for ctx in dg.enumerate_matches(poly.sig, d, pat):
                    again = dg.plug(poly.sig, ctx, pat)
                    assert dg.equal_up_to_exchange(poly.sig, again, d)


@pytest.mark.parametrize("fixture", ["perm", "ce", "monoid"])
def test_match_agrees_with_oracle(fixture, request):
    poly = request.getfixturevalue(fixture)
    rng = random.Random(SEED + 5)
    pats = [c.src for c in poly.cells3]
    for _ in range(30):
        d = random_diagram(poly, rng, max_size=4)
        for pat in pats:
            got = {(c.top.slices, c.left, c.right, c.bottom.slices)
                   for c in dg.enumerate_matches(poly.sig, d, pat)}
            want = {(t, l, r, b)
                    for (t, l, r, b) in oracle_matches(poly.sig, d, pat)}
            assert got == want


# --- exchange class vs semantic invariants --------------------------------

@given(st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_class_members_all_equal(seed):
    from conftest import load_poly
    poly = load_poly("counterexample.poly")
    rng = random.Random(seed)
    d = random_diagram(poly, rng, max_size=4)
    for rep in oracle_class(poly.sig, d):
        other = Diagram(d.source, rep, d.at)
        assert dg.equal_up_to_exchange(poly.sig, d, other)
        assert oracle_equal(poly.sig, d, other)
