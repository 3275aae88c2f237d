"""Kauffman bracket and Jones polynomial.

Two independent evaluators live here: :func:`bracket_naive`, the plain
2^n state sum used as an oracle, and :func:`bracket_dc`, which glues
Temperley-Lieb states along a merge tree (a :class:`CutOrder`).

Smoothing convention for a crossing ``(a, b, c, d)``: the A-smoothing joins
``a-b`` and ``c-d``, the B-smoothing joins ``a-d`` and ``b-c``. With this
choice a positive kink has bracket ``-A^3``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Hashable, Iterable, Sequence

from .pd import PlanarDiagram, require_knot
from .polynomial import DELTA, ONE, ZERO, LaurentPolynomial

__all__ = [
    "PlanarMatching",
    "TLElement",
    "CutOrder",
    "FrontierWidthError",
    "OracleLimitError",
    "enumerate_matchings",
    "catalan",
    "glue",
    "crossing_element",
    "plan_cut_order",
    "sweep_order",
    "random_cut_order",
    "bracket_naive",
    "bracket_dc",
    "bracket",
    "jones_f",
    "jones_polynomial",
    "DEFAULT_WIDTH_CAP",
    "ORACLE_LIMIT",
]

DEFAULT_WIDTH_CAP = 16
ORACLE_LIMIT = 16


class FrontierWidthError(MemoryError):
    """A cut order needs a wider frontier than the configured cap."""

    def __init__(self, width: int, cap: int):
        super().__init__(f"frontier width {width} exceeds cap {cap}")
        self.width = width
        self.cap = cap


class OracleLimitError(ValueError):
    pass


# -- planar matchings ---------------------------------------------------------

Pairing = tuple[tuple[Hashable, Hashable], ...]


@dataclass(frozen=True)
class PlanarMatching:
    """Non-crossing perfect matching of points 1..2k in circular order."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pairs = tuple(sorted(tuple(sorted(p)) for p in self.pairs))
        object.__setattr__(self, "pairs", pairs)
        pts = sorted(v for p in pairs for v in p)
        if pts != list(range(1, len(pts) + 1)):
            raise ValueError("matching must cover 1..2k exactly once")
        for a, b in pairs:
            for c, d in pairs:
                if a < c < b < d:
                    raise ValueError(f"chords {a}-{b} and {c}-{d} cross")

    @property
    def size(self) -> int:
        return 2 * len(self.pairs)


def catalan(k: int) -> int:
    c = 1
    for i in range(k):
        c = c * 2 * (2 * i + 1) // (i + 2)
    return c


@lru_cache(maxsize=None)
def _matchings(lo: int, hi: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    # non-crossing matchings of the interval lo..hi (inclusive)
    if lo > hi:
        return ((),)
    out = []
    for j in range(lo + 1, hi + 1, 2):
        for inner in _matchings(lo + 1, j - 1):
            for outer in _matchings(j + 1, hi):
                out.append(((lo, j),) + inner + outer)
    return tuple(out)


def enumerate_matchings(points: int) -> list[PlanarMatching]:
    if points < 0 or points % 2:
        raise ValueError("number of boundary points must be even and nonnegative")
    return [PlanarMatching(m) for m in _matchings(1, points)]


# -- Temperley-Lieb elements and gluing ---------------------------------------


class TLElement:
    """Linear combination of matchings of a labeled boundary.

    Matchings are stored as sorted tuples of pairs of boundary labels. The
    labels are arbitrary hashables; for diagrams they are crossing ends.
    """

    __slots__ = ("boundary", "terms")

    def __init__(self, boundary: Iterable[Hashable], terms: dict[Pairing, LaurentPolynomial]):
        self.boundary = frozenset(boundary)
        self.terms = {m: p for m, p in terms.items() if p}
        for m in self.terms:
            if {v for pair in m for v in pair} != self.boundary:
                raise ValueError("matching does not cover the boundary")

    @classmethod
    def _trusted(cls, boundary: frozenset, terms: dict) -> "TLElement":
        el = cls.__new__(cls)
        el.boundary = boundary
        el.terms = terms
        return el

    @classmethod
    def identity(cls) -> "TLElement":
        return cls._trusted(frozenset(), {(): ONE})

    def __eq__(self, other) -> bool:
        if not isinstance(other, TLElement):
            return NotImplemented
        return self.boundary == other.boundary and self.terms == other.terms

    def __repr__(self) -> str:
        body = ", ".join(f"{m}: {p}" for m, p in sorted(self.terms.items(), key=repr))
        return f"TLElement({sorted(self.boundary, key=repr)}, {{{body}}})"


_DELTA_POW = [ONE]


def _delta_pow(k: int) -> LaurentPolynomial:
    while len(_DELTA_POW) <= k:
        _DELTA_POW.append(_DELTA_POW[-1] * DELTA)
    return _DELTA_POW[k]


def _sort_pair(a, b):
    return (a, b) if a <= b else (b, a)


def glue(x: TLElement, y: TLElement, joins: Sequence[tuple[Hashable, Hashable]]) -> TLElement:
    """Bilinear gluing of two elements along pairs of boundary points.

    Each closed loop produced by a join multiplies the coefficient by the
    loop value ``-A^2 - A^-2``. A join may connect two points of the same
    operand.
    """
    if x.boundary & y.boundary:
        raise ValueError("operands share boundary points")
    everything = x.boundary | y.boundary
    jmap: dict = {}
    for a, b in joins:
        if a == b or a not in everything or b not in everything:
            raise ValueError(f"join ({a!r}, {b!r}) references a missing point")
        if a in jmap or b in jmap:
            raise ValueError("a boundary point is joined twice")
        jmap[a] = b
        jmap[b] = a
    boundary = everything - jmap.keys()
    out: dict[Pairing, LaurentPolynomial] = {}
    for mx, px in x.terms.items():
        for my, py in y.terms.items():
            match = {}
            for a, b in mx:
                match[a] = b
                match[b] = a
            for a, b in my:
                match[a] = b
                match[b] = a
            pairs = []
            seen = set()
            for p in boundary:
                if p in seen:
                    continue
                q = match[p]
                while q in jmap:
                    seen.add(q)
                    r = jmap[q]
                    seen.add(r)
                    q = match[r]
                seen.add(p)
                seen.add(q)
                pairs.append(_sort_pair(p, q))
            loops = 0
            for p in jmap:
                if p in seen:
                    continue
                loops += 1
                q = p
                while True:
                    seen.add(q)
                    r = match[q]
                    seen.add(r)
                    q = jmap[r]
                    if q == p:
                        break
            key = tuple(sorted(pairs)) if len(pairs) > 1 else tuple(pairs)
            coeff = px * py
            if loops:
                coeff = coeff * _delta_pow(loops)
            prev = out.get(key)
            out[key] = coeff if prev is None else prev + coeff
    return TLElement._trusted(frozenset(boundary), {m: p for m, p in out.items() if p})


_A = LaurentPolynomial.monomial(1, 1)
_AINV = LaurentPolynomial.monomial(1, -1)


def crossing_element(ends: Sequence[Hashable]) -> TLElement:
    """Skein expansion of one crossing whose four ends are listed as in a PD tuple."""
    a, b, c, d = ends
    return TLElement._trusted(
        frozenset(ends),
        {
            tuple(sorted((_sort_pair(a, b), _sort_pair(c, d)))): _A,
            tuple(sorted((_sort_pair(a, d), _sort_pair(b, c)))): _AINV,
        },
    )


# -- cut orders ---------------------------------------------------------------


@dataclass(frozen=True)
class CutOrder:
    """Merge schedule for the divide-and-conquer evaluation.

    ``tree`` is a nested binary tuple whose leaves are crossing indices; a
    plain sweep is the left-deep tree. ``order`` lists the leaves left to
    right and ``widths`` the open boundary size after every node in
    evaluation (post-)order.
    """

    tree: object
    order: tuple[int, ...]
    widths: tuple[int, ...]

    @property
    def max_width(self) -> int:
        return max(self.widths, default=0)


def _leaves(tree) -> list[int]:
    out = []
    stack = [tree]
    while stack:
        t = stack.pop()
        if isinstance(t, int):
            out.append(t)
        else:
            stack.extend(reversed(t))
    return out


def _widths(tree, partner: Sequence[int]) -> list[int]:
    widths: list[int] = []

    def walk(t) -> set[int]:
        if isinstance(t, int):
            part = {t}
        else:
            part = walk(t[0]) | walk(t[1])
        widths.append(sum(1 for c in part for s in range(4) if partner[4 * c + s] >> 2 not in part))
        return part

    if tree is not None:
        walk(tree)
    return widths


def _make_order(tree, d: PlanarDiagram) -> CutOrder:
    if tree is None:
        return CutOrder(None, (), ())
    order = tuple(_leaves(tree))
    if sorted(order) != list(range(d.n)):
        raise ValueError("cut order must use every crossing exactly once")
    return CutOrder(tree, order, tuple(_widths(tree, d.geometry.partner)))


def _left_deep(seq: Sequence[int]):
    it = iter(seq)
    tree = next(it)
    for c in it:
        tree = (tree, c)
    return tree


def sweep_order(d: PlanarDiagram, order: Sequence[int]) -> CutOrder:
    """Sequential sweep adding crossings in the given order."""
    if not d.n:
        return CutOrder(None, (), ())
    return _make_order(_left_deep(order), d)


def _greedy_sequence(d: PlanarDiagram) -> list[int]:
    n = d.n
    partner = d.geometry.partner
    done = [False] * n
    score = [0] * n
    seq = []
    for _ in range(n):
        best = -1
        for c in range(n):
            if not done[c] and (best < 0 or score[c] > score[best]):
                best = c
        done[best] = True
        seq.append(best)
        for s in range(4):
            other = partner[4 * best + s] >> 2
            if not done[other]:
                score[other] += 1
    return seq


def plan_cut_order(d: PlanarDiagram) -> CutOrder:
    """Follow the recorded tangle tree when present, else sweep greedily.

    The greedy sweep repeatedly takes the crossing sharing the most arcs
    with the processed part, ties broken by lowest index.
    """
    require_knot(d)
    if not d.n:
        return CutOrder(None, (), ())
    if d.tree is not None:
        try:
            return _make_order(d.tree, d)
        except ValueError:
            pass
    return sweep_order(d, _greedy_sequence(d))


def random_cut_order(d: PlanarDiagram, rng: random.Random, sweep: bool | None = None) -> CutOrder:
    """Random sweep or random binary merge tree (for equivalence testing)."""
    if not d.n:
        return CutOrder(None, (), ())
    seq = list(range(d.n))
    rng.shuffle(seq)
    if sweep is None:
        sweep = rng.random() < 0.5
    if sweep:
        return sweep_order(d, seq)
    parts: list = list(seq)
    while len(parts) > 1:
        i, j = sorted(rng.sample(range(len(parts)), 2))
        b = parts.pop(j)
        a = parts.pop(i)
        parts.append((a, b))
    return _make_order(parts[0], d)


# -- evaluators ---------------------------------------------------------------


def bracket_naive(d: PlanarDiagram, limit: int = ORACLE_LIMIT) -> LaurentPolynomial:
    """State sum over all 2^n smoothings, normalised so the unknot is 1."""
    require_knot(d)
    n = d.n
    if n > limit:
        raise OracleLimitError(f"{n} crossings exceeds the oracle limit {limit}")
    if n == 0:
        return ONE
    m = 2 * n
    a_pairs = [((x[0], x[1]), (x[2], x[3])) for x in d.crossings]
    b_pairs = [((x[0], x[3]), (x[1], x[2])) for x in d.crossings]
    tally: dict[tuple[int, int], int] = {}
    for state in range(1 << n):
        parent = list(range(m + 1))

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        comps = m
        a_count = 0
        for i in range(n):
            if (state >> i) & 1:
                pairs = b_pairs[i]
            else:
                pairs = a_pairs[i]
                a_count += 1
            for u, v in pairs:
                ru, rv = find(u), find(v)
                if ru != rv:
                    parent[ru] = rv
                    comps -= 1
        key = (2 * a_count - n, comps)
        tally[key] = tally.get(key, 0) + 1
    total = ZERO
    for (exp, loops), count in tally.items():
        total = total + _delta_pow(loops - 1).shift(exp) * count
    return total


def bracket_dc(d: PlanarDiagram, order: CutOrder | None = None, width_cap: int = DEFAULT_WIDTH_CAP) -> LaurentPolynomial:
    """Bracket by gluing crossing states along ``order`` (planned if omitted)."""
    require_knot(d)
    if not d.n:
        return ONE
    if order is None:
        order = plan_cut_order(d)
    if order.max_width > width_cap:
        raise FrontierWidthError(order.max_width, width_cap)
    partner = d.geometry.partner
    ident = TLElement.identity()

    def evaluate(t) -> tuple[set[int], TLElement]:
        if isinstance(t, int):
            base = 4 * t
            ends = (base, base + 1, base + 2, base + 3)
            el = crossing_element(ends)
            joins = [(e, partner[e]) for e in ends if base <= partner[e] < base + 4 and e < partner[e]]
            if joins:
                el = glue(el, ident, joins)
            return {t}, el
        lp, le = evaluate(t[0])
        rp, re_ = evaluate(t[1])
        joins = [(e, partner[e]) for e in le.boundary if (partner[e] >> 2) in rp]
        return lp | rp, glue(le, re_, joins)

    _, root = evaluate(order.tree)
    if root.boundary:
        raise ValueError("cut order left open boundary points")
    closed = root.terms.get((), ZERO)
    return closed.exact_div(DELTA)


def bracket(d: PlanarDiagram, width_cap: int = DEFAULT_WIDTH_CAP) -> LaurentPolynomial:
    return bracket_dc(d, plan_cut_order(d), width_cap)


def jones_f(d: PlanarDiagram, br: LaurentPolynomial | None = None, width_cap: int = DEFAULT_WIDTH_CAP) -> LaurentPolynomial:
    """Normalised bracket (-A^3)^(-writhe) * <d>, a polynomial in A."""
    geo = require_knot(d)
    w = sum(geo.signs) if d.n else 0
    if br is None:
        br = bracket(d, width_cap)
    f = br.shift(-3 * w)
    return -f if w % 2 else f


def jones_polynomial(d: PlanarDiagram, f: LaurentPolynomial | None = None) -> LaurentPolynomial:
    """Jones polynomial in t via t = A^-4."""
    if f is None:
        f = jones_f(d)
    if any(e % 4 for e in f.terms):
        raise ValueError("exponents of the normalised bracket are not multiples of 4")
    return LaurentPolynomial({-e // 4: c for e, c in f.terms.items()})
