"""Shared diagrams and random corpora for the test suite."""

from __future__ import annotations

import random
from functools import lru_cache

from knotverify.generation import generate_closures, random_algebraic_tangle, slot_candidates
from knotverify.moves import MoveError, scramble
from knotverify.pd import MultiComponentError, PlanarDiagram, parse_pd
from knotverify.tangles import Twist, default_catalog, polyhedron_substitute, tangle_closure

TREFOIL = "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)"
FIGURE_EIGHT = "X(4,2,5,1) X(8,6,1,5) X(6,3,7,4) X(2,7,3,8)"
KINK = "X(1,1,2,2)"


def trefoil() -> PlanarDiagram:
    return parse_pd(TREFOIL)


def figure_eight() -> PlanarDiagram:
    return parse_pd(FIGURE_EIGHT)


def unknot() -> PlanarDiagram:
    return PlanarDiagram(())


def random_closure(n: int, rng: random.Random) -> PlanarDiagram:
    while True:
        t = random_algebraic_tangle(n, rng)
        try:
            return tangle_closure(t, rng.choice("ND"))
        except MultiComponentError:
            continue


def random_polyhedral(n: int, rng: random.Random) -> PlanarDiagram:
    poly = default_catalog()[0]
    while True:
        sizes = [1] * poly.vertex_count
        for _ in range(n - poly.vertex_count):
            sizes[rng.randrange(len(sizes))] += 1
        fill = [rng.choice(slot_candidates(s)) for s in sizes]
        try:
            return polyhedron_substitute(poly, fill)
        except MultiComponentError:
            continue


def random_diagram(n: int, rng: random.Random) -> PlanarDiagram:
    """A valid knot diagram with exactly n crossings from a mix of sources."""
    kind = rng.random()
    if n >= 8 and kind < 0.25:
        return random_polyhedral(n, rng)
    if kind < 0.6:
        return random_closure(n, rng)
    # scramble a small knot until the size is right
    base = rng.choice([unknot(), trefoil(), figure_eight()])
    d = base
    for _ in range(200):
        try:
            d, _ = scramble(d, rng, 1, max_crossings=n)
        except MoveError:
            break
        if d.n == n:
            return d
    return random_closure(n, rng)


@lru_cache(maxsize=None)
def random_corpus(count: int = 200, lo: int = 4, hi: int = 14, seed: int = 20240611) -> tuple:
    rng = random.Random(seed)
    return tuple(random_diagram(rng.randint(lo, hi), rng) for _ in range(count))


@lru_cache(maxsize=None)
def closure_corpus(max_budget: int) -> tuple:
    out = []
    for n in range(1, max_budget + 1):
        out.extend(d for _, d in generate_closures(n) if d is not None)
    return tuple(out)


def corpus_14(random_count: int = 200) -> tuple:
    """Named small knots, all closures up to 7 crossings and a random mix up to 14."""
    fixed = (unknot(), parse_pd(KINK), trefoil(), figure_eight())
    return fixed + closure_corpus(7) + random_corpus(random_count)
