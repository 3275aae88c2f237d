import random

import pytest
from hypothesis import given, settings, strategies as st

from corpus import FIGURE_EIGHT, KINK, TREFOIL, figure_eight, random_closure, trefoil, unknot
from knotverify.bracket import bracket_naive, jones_polynomial
from knotverify.moves import ReidemeisterMove, apply_reidemeister
from knotverify.pd import (
    MultiComponentError,
    PlanarDiagram,
    canonical_pd_key,
    dt_code,
    format_pd,
    mirror,
    parse_pd,
    pd_validate,
    writhe,
)


@pytest.mark.parametrize(
    "crossings, problems",
    [
        ([(1, 4, 2, 5), (3, 6, 4, 1), (5, 2, 6, 3)], []),
        ([(1, 1, 2, 2)], []),
        ([(1, 2, 3, 4)], ["duplicate-arc-count"]),
        ([], []),
    ],
)
def test_validate_examples(crossings, problems):
    assert pd_validate(crossings) == problems


def test_validate_detects_two_components():
    # standard Hopf link
    assert "multi-component" in pd_validate([(1, 3, 2, 4), (3, 1, 4, 2)])


def test_validate_detects_non_planar_gluing():
    # each arc appears twice but the rotation system is not a sphere
    bad = [(1, 3, 2, 4), (3, 2, 4, 1)]
    assert pd_validate(bad) != []


def test_parse_format_round_trip():
    d = parse_pd(FIGURE_EIGHT)
    assert parse_pd(format_pd(d)) == d
    assert parse_pd("PD[X[1,4,2,5], X[3,6,4,1], X[5,2,6,3]]") == trefoil()
    assert parse_pd("") == unknot()


def test_parse_rejects_bad_text():
    with pytest.raises(ValueError):
        parse_pd("X(1,2,3)")
    with pytest.raises(ValueError):
        parse_pd("X(1,1,2,2) junk")


def test_writhe_examples():
    assert writhe(unknot()) == 0
    assert writhe(trefoil()) == -3
    assert writhe(figure_eight()) == 0
    assert abs(writhe(parse_pd(KINK))) == 1


def test_r1_plus_raises_writhe_by_one():
    d = trefoil()
    kinked = apply_reidemeister(d, ReidemeisterMove("R1+", (1, True)))
    assert kinked.n == 4
    assert writhe(kinked) == writhe(d) + 1


def test_writhe_rejects_links():
    with pytest.raises(MultiComponentError):
        writhe(PlanarDiagram(((1, 3, 2, 4), (3, 1, 4, 2))))


def test_mirror_examples():
    d = trefoil()
    assert mirror(mirror(d)) == d
    assert writhe(mirror(d)) == -writhe(d)
    assert jones_polynomial(mirror(d)) == jones_polynomial(d).substitute_power(-1)


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 10), st.integers(0, 2**32))
def test_mirror_properties_on_closures(n, seed):
    d = random_closure(n, random.Random(seed))
    m = mirror(d)
    assert pd_validate(m) == []
    assert mirror(m) == d
    assert writhe(m) == -writhe(d)
    assert bracket_naive(m) == bracket_naive(d).substitute_power(-1)


def test_dt_code_of_trefoil():
    code = dt_code(trefoil())
    assert sorted(abs(x) for x in code) == [2, 4, 6]
    assert [abs(x) for x in code] == [4, 6, 2]


def test_dt_code_alternating_knots_have_uniform_sign():
    for d in (trefoil(), figure_eight()):
        code = dt_code(d)
        assert all(x > 0 for x in code) or all(x < 0 for x in code)


def test_canonical_key_ignores_relabelling():
    d = trefoil()
    # same knot diagram with arcs shifted by two along the orientation
    shifted = PlanarDiagram(tuple(tuple((v + 1) % 6 + 1 for v in x) for x in d.crossings))
    assert pd_validate(shifted) == []
    assert canonical_pd_key(shifted) == canonical_pd_key(d)
    assert canonical_pd_key(figure_eight()) != canonical_pd_key(d)


def test_trefoil_text_constant_round_trips():
    assert format_pd(trefoil()) == TREFOIL
