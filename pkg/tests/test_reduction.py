import random

import pytest
from hypothesis import given, settings, strategies as st

from corpus import KINK, figure_eight, random_closure, random_polyhedral, trefoil, unknot
from knotverify.bracket import jones_f
from knotverify.generation import generate_closures
from knotverify.moves import ReidemeisterMove, applicable_moves, apply_reidemeister, scramble
from knotverify.pd import canonical_pd_key, mirror, parse_pd, pd_validate
from knotverify.polynomial import ONE
from knotverify.reduction import (
    find_bridges,
    find_elementary_reduction,
    find_pass_move,
    polyhedral_vertex_count,
    reduce_fixpoint,
)

# closure of (2*0+2*2*0)*0-1: an over-bridge of length 3 has a route across one strand
PASS_EXAMPLE = "X(1,10,2,11) X(2,14,3,13) X(3,9,4,8) X(5,12,6,13) X(7,5,8,4) X(9,14,10,1) X(11,6,12,7)"


def _kinked_unknot(k):
    d = unknot()
    for i in range(k):
        d = apply_reidemeister(d, ReidemeisterMove("R1+" if i % 2 else "R1-", (0, bool(i % 3))))
    return d


def _with_clasp(d):
    m = next(m for m in applicable_moves(d, ("R2",), shrink=False))
    return apply_reidemeister(d, m)


def test_kink_is_r1():
    out = find_elementary_reduction(parse_pd(KINK))
    assert out.kind == "r1"
    assert (out.before_count, out.after_count) == (1, 0)
    assert out.result.n == 0


def test_clasp_is_r2():
    d = _with_clasp(trefoil())
    out = find_elementary_reduction(d)
    assert out.kind == "r2"
    assert out.after_count == d.n - 2
    assert pd_validate(out.result) == []


@pytest.mark.parametrize("bridge", [None, 1, 2, 3, 10])
def test_minimal_diagrams_have_no_reduction(bridge):
    for d in (trefoil(), figure_eight(), mirror(trefoil())):
        assert find_elementary_reduction(d) is None
        assert find_pass_move(d, max_bridge=bridge) is None
        assert reduce_fixpoint(d, bridge) == d


def test_pass_example():
    d = parse_pd(PASS_EXAMPLE)
    assert pd_validate(d) == []
    assert find_elementary_reduction(d) is None
    out = find_pass_move(d)
    assert out.kind == "pass"
    assert out.after_count < out.before_count == 7
    assert pd_validate(out.result) == []
    assert jones_f(out.result) == jones_f(d)
    assert find_pass_move(d, max_bridge=2) is None or find_pass_move(d, max_bridge=2).after_count < 7


def test_bridges_cover_every_over_pass():
    d = parse_pd(PASS_EXAMPLE)
    over = find_bridges(d, "over")
    under = find_bridges(d, "under")
    assert sum(b.length for b in over) == d.n
    assert sum(b.length for b in under) == d.n
    assert any(b.length == 3 for b in over)


def test_five_kink_unknot_reduces_to_nothing():
    d = _kinked_unknot(5)
    assert d.n == 5
    trace = []
    out = reduce_fixpoint(d, trace=trace)
    assert out.n == 0
    assert len(trace) <= 5


def test_artificial_clasp_cancels():
    d = figure_eight()
    out = reduce_fixpoint(_with_clasp(d))
    assert canonical_pd_key(out) == canonical_pd_key(d)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_pass_search_subsumes_elementary(seed):
    rng = random.Random(seed)
    d, _ = scramble(trefoil(), rng, 8, max_crossings=12)
    el = find_elementary_reduction(d)
    if el is None:
        return
    for bridge in (1, None):
        out = find_pass_move(d, max_bridge=bridge)
        assert out is not None
        assert out.after_count < out.before_count


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 12), st.integers(0, 2**32))
def test_reduction_preserves_jones(n, seed):
    rng = random.Random(seed)
    d = random_closure(n, rng)
    d, _ = scramble(d, rng, 4, max_crossings=14)
    trace = []
    out = reduce_fixpoint(d, trace=trace)
    assert pd_validate(out) == []
    assert jones_f(out) == jones_f(d)
    # each step lowers crossings, or vertices at equal crossings
    for step in trace:
        assert pd_validate(step.result) == []
        assert step.after_count < step.before_count or step.vertices_after < step.vertices_before


def test_vertex_count():
    assert polyhedral_vertex_count(trefoil()) == 0
    assert polyhedral_vertex_count(unknot()) == 0
    rng = random.Random(2)
    for _ in range(5):
        assert polyhedral_vertex_count(random_closure(rng.randint(3, 12), rng)) == 0
        assert polyhedral_vertex_count(random_polyhedral(rng.randint(8, 12), rng)) == 6


def test_eliminated_closures_reappear_at_smaller_budgets():
    # replay: the reduced form of each eliminated closure has the knot type
    # of some closure enumerated at its (smaller) crossing number
    known = {0: {ONE}}
    eliminated = 0
    for n in range(1, 9):
        here = set()
        for _, d in generate_closures(n):
            if d is None:
                continue
            f = jones_f(d)
            here.update((f, f.substitute_power(-1)))
            if find_pass_move(d) is None:
                continue
            eliminated += 1
            r = reduce_fixpoint(d)
            assert r.n < n
            pool = set().union(*(known[m] for m in range(r.n + 1)))
            assert jones_f(r) in pool
        known[n] = here
    assert eliminated > 1000
