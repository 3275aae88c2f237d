import random

import pytest
from hypothesis import given, settings, strategies as st

from corpus import KINK, figure_eight, random_closure, random_polyhedral, trefoil, unknot
from knotverify.bracket import (
    FrontierWidthError,
    OracleLimitError,
    PlanarMatching,
    TLElement,
    bracket,
    bracket_dc,
    bracket_naive,
    catalan,
    crossing_element,
    enumerate_matchings,
    glue,
    jones_f,
    jones_polynomial,
    plan_cut_order,
    random_cut_order,
)
from knotverify.moves import ReidemeisterMove, apply_reidemeister
from knotverify.pd import mirror, parse_pd
from knotverify.polynomial import ONE, is_unit_monomial, parse_poly
from knotverify.tangles import Twist, parse_conway, tangle_closure


def _brute_matchings(points):
    # every perfect matching, kept when no two chords interleave
    def all_pairings(pts):
        if not pts:
            yield ()
            return
        a = pts[0]
        for i in range(1, len(pts)):
            rest = pts[1:i] + pts[i + 1:]
            for tail in all_pairings(rest):
                yield ((a, pts[i]),) + tail

    out = set()
    for m in all_pairings(list(range(1, points + 1))):
        if not any(a < c < b < d for a, b in m for c, d in m):
            out.add(tuple(sorted(m)))
    return out


@pytest.mark.parametrize("k", range(0, 7))
def test_matchings_are_all_noncrossing_matchings(k):
    ms = enumerate_matchings(2 * k)
    assert len(ms) == catalan(k)
    assert {m.pairs for m in ms} == _brute_matchings(2 * k)


@pytest.mark.parametrize("points, count", [(0, 1), (2, 1), (4, 2), (8, 14), (16, 1430)])
def test_matching_counts(points, count):
    assert len(enumerate_matchings(points)) == count


def test_matching_rejects_odd_and_crossing():
    with pytest.raises(ValueError):
        enumerate_matchings(3)
    with pytest.raises(ValueError):
        PlanarMatching(((1, 3), (2, 4)))


@pytest.mark.parametrize(
    "pd, expected",
    [
        ("", "1"),
        (KINK, None),
        ("X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)", None),
        ("X(4,2,5,1) X(8,6,1,5) X(6,3,7,4) X(2,7,3,8)", "A^8 - A^4 + 1 - A^-4 + A^-8"),
    ],
)
def test_naive_examples(pd, expected):
    d = parse_pd(pd)
    got = bracket_naive(d)
    if expected is not None:
        assert got == parse_poly(expected)
    else:
        assert got == bracket_dc(d)


def test_kink_bracket_is_signed_cube():
    got = bracket_naive(parse_pd(KINK))
    assert got in (parse_poly("-A^3"), parse_poly("-A^-3"))


def test_trefoil_bracket_up_to_mirror():
    target = parse_poly("A^-7 - A^-3 - A^5")
    got = bracket_naive(trefoil())
    assert got in (target, target.substitute_power(-1))
    assert bracket_dc(trefoil()) == got
    assert not is_unit_monomial(got)


def test_trefoil_jones_convention():
    assert jones_polynomial(trefoil()) == parse_poly("-t^-4 + t^-3 + t^-1")
    assert jones_polynomial(mirror(trefoil())) == parse_poly("-t^4 + t^3 + t")


def test_oracle_limit():
    d = tangle_closure(Twist(17), "D")
    with pytest.raises(OracleLimitError):
        bracket_naive(d)
    assert bracket_dc(d) == parse_poly("-A^3") ** 17 or bracket_dc(d) == parse_poly("-A^-3") ** 17


def test_glue_of_clasp_is_two_parallel_strands():
    # ends listed counterclockwise from the incoming under-strand; the left
    # crossing has its under-strand on the SW-NE diagonal, the right one on
    # NW-SE, so the strand through NW1-SE1-SW2-NE2 is over at both
    x = crossing_element(("sw1", "se1", "ne1", "nw1"))
    y = crossing_element(("nw2", "sw2", "se2", "ne2"))
    out = glue(x, y, [("ne1", "nw2"), ("se1", "sw2")])
    assert out.boundary == {"sw1", "nw1", "se2", "ne2"}
    assert len(out.terms) == 1
    (m, coeff), = out.terms.items()
    assert {frozenset(p) for p in m} == {frozenset(("sw1", "se2")), frozenset(("nw1", "ne2"))}
    assert coeff == ONE


def test_glue_closing_a_kink():
    # the A-smoothing closes a loop: A*delta + A^-1 = -A^3
    x = crossing_element(("a", "b", "c", "d"))
    closed = glue(x, TLElement.identity(), [("a", "b")])
    assert closed.boundary == {"c", "d"}
    ((m, coeff),) = closed.terms.items()
    assert coeff == parse_poly("-A^3")


def test_glue_rejects_shared_points():
    x = crossing_element((1, 2, 3, 4))
    with pytest.raises(ValueError):
        glue(x, x, [])


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**32))
def test_dc_matches_naive_on_closures(n, seed):
    rng = random.Random(seed)
    d = random_closure(n, rng)
    expected = bracket_naive(d)
    assert bracket_dc(d) == expected
    for _ in range(3):
        assert bracket_dc(d, random_cut_order(d, rng), width_cap=4 * n) == expected


@pytest.mark.parametrize("seed", range(5))
def test_dc_matches_naive_on_polyhedral(seed):
    rng = random.Random(seed)
    d = random_polyhedral(rng.randint(8, 12), rng)
    assert bracket_dc(d) == bracket_naive(d)
    assert bracket_dc(d, random_cut_order(d, rng, sweep=True)) == bracket_naive(d)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 30), st.integers(0, 2**32))
def test_algebraic_width_at_most_four(n, seed):
    d = random_closure(n, random.Random(seed))
    assert plan_cut_order(d).max_width <= 4


def test_polyhedral_width_is_measured_and_small():
    rng = random.Random(7)
    widths = [plan_cut_order(random_polyhedral(10, rng)).max_width for _ in range(10)]
    assert max(widths) <= 8


def test_width_cap_raises():
    d = figure_eight()
    order = random_cut_order(d, random.Random(1), sweep=True)
    with pytest.raises(FrontierWidthError):
        bracket_dc(d, order, width_cap=order.max_width - 2)


def test_twenty_crossing_twist_knot():
    d = tangle_closure(parse_conway("18*0+2"), "N")
    assert d.n == 20
    br = bracket(d)
    assert plan_cut_order(d).max_width <= 4
    # Jones of a twist knot is unchanged by a pair of cancelling clasps
    bigger = apply_reidemeister(d, ReidemeisterMove("R2", _r2_site(d)))
    assert jones_f(bigger) == jones_f(d, br)


def _r2_site(d):
    face = max(d.geometry.faces, key=len)
    return (face[0], face[2], True)


def test_kinked_unknot_has_f_one():
    d = unknot()
    for k in ("R1+", "R1-", "R1+"):
        d = apply_reidemeister(d, ReidemeisterMove(k, (0, False)))
    assert is_unit_monomial(bracket(d))
    assert jones_f(d) == ONE
