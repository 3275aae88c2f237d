"""Candidate diagram generation: algebraic tangle streams, closures and
polyhedral fillings, with resumable sharded cursors.

Tangle stream normal form
-------------------------
The stream for budget ``n`` lists each tangle shape once under a normal
form that only drops diagrams isotopic (rel boundary) to a listed diagram
with at most as many crossings:

* rational tangles appear as their canonical alternating continued-fraction
  diagram (both signs); ``F`` with ``|F| < 1`` is ``Product(canon(1/F), 0)``;
* non-rational tangles are sums of *atoms*, an atom being a non-integer
  rational tangle or ``Product(S, 0)`` (the flip of a non-rational sum ``S``);
  summands form a multiset (sum order is not distinguished);
* an integer summand is only kept when no rational atom is present, since
  otherwise it merges into a rational neighbour;
* a bare flipped sum is not listed at top level: its closures are the
  closures of ``S`` with the roles swapped, reflected in the plane.

:func:`normal_form` maps any grammar tree to this form, which is how the
coverage of the stream is checked against brute-force enumeration.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product as cartesian
from typing import Iterator, Sequence

from .pd import MultiComponentError, PlanarDiagram
from .tangles import (
    INFINITY_TANGLE,
    ZERO_TANGLE,
    ConwayPolyhedron,
    Infinity,
    Product,
    Sum,
    Tangle,
    Twist,
    Zero,
    format_conway,
    is_rational,
    polyhedron_substitute,
    tangle_closure,
)

__all__ = [
    "enumerate_algebraic_tangles",
    "canonical_key",
    "normal_form",
    "canonical_rational",
    "rational_crossing_number",
    "is_algebraically_trivializable",
    "slot_candidates",
    "generate_closures",
    "generate_polyhedral",
    "GenerationCursor",
    "Candidate",
    "candidates",
    "random_algebraic_tangle",
    "CLASSES",
]

CLASSES = ("algebraic", "polyhedral")
INF = None


# -- rational tangles ---------------------------------------------------------

def _cf(f: Fraction) -> list[int]:
    """Positive continued fraction [a1..am] of f > 1 in the tree order."""
    p, q = f.numerator, f.denominator
    quotients = []
    while q:
        a, r = divmod(p, q)
        quotients.append(a)
        p, q = q, r
    return quotients[::-1]


def rational_crossing_number(f) -> int:
    if f is INF or f == 0:
        return 0
    f = abs(f)
    if f < 1:
        f = 1 / f
    return sum(_cf(f))


def canonical_rational(f) -> Tangle:
    """Alternating continued-fraction diagram of fraction ``f``."""
    if f is INF:
        return INFINITY_TANGLE
    f = Fraction(f)
    if f == 0:
        return ZERO_TANGLE
    sign = 1 if f > 0 else -1
    g = abs(f)
    if g < 1:
        return Product(canonical_rational(sign / g), ZERO_TANGLE)
    parts = _cf(g)
    t: Tangle = Twist(sign * parts[0])
    for a in parts[1:]:
        t = Product(t, Twist(sign * a))
    return t


@lru_cache(maxsize=None)
def _rational_fractions(n: int) -> tuple:
    """Fractions with crossing number n, in a fixed order."""
    out = []
    if n < 1:
        return ()
    # compositions of n with first part >= 2 (or a single part)
    def comps(rest, first):
        if rest == 0:
            yield ()
            return
        lo = 2 if first else 1
        for a in range(lo, rest + 1):
            if first and a != rest and a < 2:
                continue
            for tail in comps(rest - a, False):
                yield (a,) + tail
    seqs = [(n,)] + [c for c in comps(n, True) if len(c) > 1]
    for seq in seqs:
        # seq = [a1..am]; fraction am + 1/(a_{m-1} + ...)
        f = Fraction(seq[0])
        for a in seq[1:]:
            f = a + 1 / f
        out.append(f)
        if f != 1:
            out.append(1 / f)
    res = []
    for f in out:
        res.append(f)
        res.append(-f)
    return tuple(res)


# -- normal form --------------------------------------------------------------
# ("r", F)                 rational with fraction F (None for infinity)
# ("s", atoms, k)          non-rational sum; atoms sorted, integer summand k
# ("f", S)                 flip of a non-rational sum S
# atoms: ("r", F) with F non-integer, or ("f", S)
# ("x",)                   degenerate (contains a split-off loop or a
#                          tangle with a knotted strand); never in the stream

DEGENERATE = ("x",)


def _atom_key(a) -> tuple:
    if a[0] == "r":
        f = a[1]
        return (0, rational_crossing_number(f), f.denominator, f.numerator)
    return (1, _nf_size(a[1]), _nf_repr(a[1]))


def _nf_repr(x) -> str:
    if x[0] == "r":
        return "r" + ("oo" if x[1] is INF else str(x[1]))
    if x[0] == "f":
        return "f(" + _nf_repr(x[1]) + ")"
    if x[0] == "s":
        return "s(" + ",".join(_nf_repr(a) for a in x[1]) + (f";{x[2]}" if x[2] else "") + ")"
    return "x"


def _nf_size(x) -> int:
    if x[0] == "r":
        return rational_crossing_number(x[1])
    if x[0] == "f":
        return _nf_size(x[1])
    if x[0] == "s":
        return sum(_nf_size(a) for a in x[1]) + abs(x[2])
    return 0


def _as_parts(x):
    """Split a normal form into (atoms list, integer) for summation."""
    if x[0] == "r":
        f = x[1]
        if f is INF:
            return None
        if f.denominator == 1:
            return [], int(f)
        return [x], 0
    if x[0] == "f":
        return [x], 0
    if x[0] == "s":
        return list(x[1]), x[2]
    return None


def _make_sum(atoms: list, k: int):
    rats = [i for i, a in enumerate(atoms) if a[0] == "r"]
    if k and rats:
        i = min(rats, key=lambda j: _atom_key(atoms[j]))
        f = atoms[i][1] + k
        atoms = atoms[:i] + [("r", f)] + atoms[i + 1:]
        k = 0
    if not atoms:
        return ("r", Fraction(k))
    if len(atoms) == 1 and not k:
        return atoms[0]
    return ("s", tuple(sorted(atoms, key=_atom_key)), k)


def _nf_sum(x, y):
    if x == DEGENERATE or y == DEGENERATE:
        return DEGENERATE
    # infinity plus an integer stays infinity; anything else is degenerate
    if x == ("r", INF) or y == ("r", INF):
        other = y if x == ("r", INF) else x
        if other[0] == "r" and other[1] is not INF and other[1].denominator == 1:
            return ("r", INF)
        return DEGENERATE
    px, py = _as_parts(x), _as_parts(y)
    return _make_sum(px[0] + py[0], px[1] + py[1])


def _nf_flip(x):
    if x[0] == "r":
        f = x[1]
        if f is INF:
            return ("r", Fraction(0))
        if f == 0:
            return ("r", INF)
        return ("r", 1 / f)
    if x[0] == "f":
        return x[1]
    if x[0] == "s":
        return ("f", x)
    return DEGENERATE


def normal_form(t: Tangle):
    """Normal form of a tangle tree (see module docstring)."""
    if isinstance(t, Twist):
        return ("r", Fraction(t.k))
    if isinstance(t, Zero):
        return ("r", Fraction(0))
    if isinstance(t, Infinity):
        return ("r", INF)
    if isinstance(t, Sum):
        return _nf_sum(normal_form(t.left), normal_form(t.right))
    return _nf_sum(_nf_flip(normal_form(t.left)), normal_form(t.right))


def _nf_tree(x) -> Tangle:
    if x[0] == "r":
        return canonical_rational(x[1])
    if x[0] == "f":
        return Product(_nf_tree(x[1]), ZERO_TANGLE)
    if x[0] == "s":
        parts = [_nf_tree(a) for a in x[1]]
        if x[2]:
            parts.append(Twist(x[2]))
        t = parts[0]
        for p in parts[1:]:
            t = Sum(t, p)
        return t
    raise ValueError("degenerate normal form has no tree")


# -- stream -------------------------------------------------------------------

@lru_cache(maxsize=None)
def _sums(n: int) -> tuple:
    """Non-rational sum normal forms of size n, in deterministic order."""
    if n < 3:
        return ()
    out = []
    # atoms by size, in fixed order
    # a single atom of size n is never a sum, so smaller atoms suffice
    pool = [(s, a) for s in range(1, n) for a in _atoms(s)]

    def multisets(start, remaining, chosen):
        if remaining == 0:
            yield list(chosen)
            return
        for j in range(start, len(pool)):
            s, a = pool[j]
            if s > remaining:
                break
            chosen.append(a)
            yield from multisets(j, remaining - s, chosen)
            chosen.pop()

    # pool is sorted by size, so the break above is valid
    for total_atoms in range(1, n + 1):
        k_abs = n - total_atoms
        for ms in multisets(0, total_atoms, []):
            has_rat = any(a[0] == "r" for a in ms)
            if k_abs == 0:
                if len(ms) >= 2:
                    out.append(("s", tuple(sorted(ms, key=_atom_key)), 0))
            elif not has_rat:
                for k in (k_abs, -k_abs):
                    out.append(("s", tuple(sorted(ms, key=_atom_key)), k))
    return tuple(out)


@lru_cache(maxsize=None)
def _atoms(n: int) -> tuple:
    rats = tuple(("r", f) for f in _rational_fractions(n) if f.denominator != 1)
    flips = tuple(("f", s) for s in _sums(n))
    return rats + flips


@lru_cache(maxsize=None)
def _stream_forms(n: int) -> tuple:
    if n < 1:
        return ()
    rats = tuple(("r", f) for f in _rational_fractions(n))
    return rats + _sums(n)


def enumerate_algebraic_tangles(n: int) -> Iterator[Tangle]:
    """Deterministic stream of algebraic tangles with exactly n crossings."""
    if n < 1:
        raise ValueError("crossing budget must be positive")
    for x in _stream_forms(n):
        yield _nf_tree(x)


def stream_size(n: int) -> int:
    return len(_stream_forms(n))


def canonical_key(t: Tangle) -> str:
    """Tree key that ignores the order of summands (products are kept as is)."""
    if isinstance(t, Twist):
        return str(t.k)
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, Infinity):
        return "oo"
    if isinstance(t, Sum):
        parts = []
        stack = [t]
        while stack:
            x = stack.pop()
            if isinstance(x, Sum):
                stack.extend((x.left, x.right))
            else:
                parts.append(canonical_key(x))
        return "+(" + ",".join(sorted(parts)) + ")"
    return "*(" + canonical_key(t.left) + "," + canonical_key(t.right) + ")"


# -- trivializability ---------------------------------------------------------

def _fraction_pq(t: Tangle, signs: Sequence[int], pos: list) -> tuple | None:
    """(p, q) of t with leaf signs applied, or None when not rational."""
    if isinstance(t, Twist):
        s = signs[pos[0]]
        pos[0] += 1
        return (s * t.k, 1)
    if isinstance(t, Zero):
        return (0, 1)
    if isinstance(t, Infinity):
        return (1, 0)
    a = _fraction_pq(t.left, signs, pos)
    b = _fraction_pq(t.right, signs, pos)
    if a is None or b is None:
        return None
    if isinstance(t, Product):
        a = (a[1], a[0])
    # sum is rational when either side is an integer (or infinity joins an integer)
    (p1, q1), (p2, q2) = a, b
    if q1 == 0 and q2 == 0:
        return None
    if q1 == 0 or q2 == 0:
        other = (p2, q2) if q1 == 0 else (p1, q1)
        return (1, 0) if other[1] == 1 else None
    if q1 != 1 and q2 != 1:
        return None
    f = Fraction(p1, q1) + Fraction(p2, q2)
    return (f.numerator, f.denominator)


def _count_leaves(t: Tangle) -> int:
    if isinstance(t, Twist):
        return 1
    if isinstance(t, (Sum, Product)):
        return _count_leaves(t.left) + _count_leaves(t.right)
    return 0


def is_algebraically_trivializable(t: Tangle, max_leaves: int = 16) -> bool:
    """Conservative filter for polyhedron slot fillings.

    Rational tangles: true iff some choice of signs on the twist leaves gives
    a fraction ``p/q`` with ``|p| = 1`` or ``|q| = 1`` (0 and infinity
    included), i.e. one of the closures becomes an unknot. Anything else, or
    any sign choice leaving the rational class, is kept (true).
    """
    if not is_rational(t):
        return True
    leaves = _count_leaves(t)
    if leaves > max_leaves:
        return True
    for signs in cartesian((1, -1), repeat=leaves):
        pq = _fraction_pq(t, signs, [0])
        if pq is None:
            return True
        p, q = pq
        if abs(p) == 1 or abs(q) == 1:
            return True
    return False


def slot_candidates(s: int) -> list[Tangle]:
    """Tangles that may fill a polyhedron vertex with s crossings."""
    out = []
    for x in _stream_forms(s):
        t = _nf_tree(x)
        if is_algebraically_trivializable(t):
            out.append(t)
        if x[0] == "s":
            # the rotated insertion of a non-rational tangle
            out.append(Product(t, ZERO_TANGLE))
    return out


# -- diagrams -----------------------------------------------------------------

@dataclass(frozen=True)
class Candidate:
    """One enumerated item. ``diagram`` is None for multi-component results."""

    cls: str
    budget: int
    index: int
    label: str
    diagram: PlanarDiagram | None

    @property
    def src(self) -> str:
        return f"{self.cls}/{self.budget}/{self.index}"


def _closure_items(n: int, first: int = 0):
    """Items from index ``first`` on; item 2j and 2j+1 are the N and D
    closures of stream tangle j."""
    forms = _stream_forms(n)
    for j in range(first // 2, len(forms)):
        t = _nf_tree(forms[j])
        for k, mode in enumerate(("N", "D")):
            if 2 * j + k >= first:
                yield f"{mode}({format_conway(t)})", t, mode


def generate_closures(n: int) -> Iterator[tuple[str, PlanarDiagram | None]]:
    """(label, diagram) for both closures of every stream tangle; the
    diagram is None when the closure is a link."""
    for label, t, mode in _closure_items(n):
        try:
            yield label, tangle_closure(t, mode)
        except MultiComponentError:
            yield label, None


def _compositions(n: int, k: int):
    if k == 1:
        if n >= 1:
            yield (n,)
        return
    for first in range(1, n - k + 2):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def _polyhedral_items(n: int, catalog: Sequence[ConwayPolyhedron]):
    for p in catalog:
        if n < p.vertex_count:
            continue
        for sizes in _compositions(n, p.vertex_count):
            lists = [slot_candidates(s) for s in sizes]
            for fill in cartesian(*lists):
                label = p.name + "[" + ";".join(format_conway(t) for t in fill) + "]"
                yield label, p, fill


def generate_polyhedral(n: int, catalog: Sequence[ConwayPolyhedron]) -> Iterator[tuple[str, PlanarDiagram | None]]:
    if not catalog:
        raise ValueError("polyhedron catalog is empty")
    for label, p, fill in _polyhedral_items(n, catalog):
        try:
            yield label, polyhedron_substitute(p, fill)
        except MultiComponentError:
            yield label, None


# -- cursor and sharding ------------------------------------------------------

@dataclass(frozen=True)
class GenerationCursor:
    """Next item to produce: class, crossing budget and index within it."""

    cls: str
    budget: int
    index: int

    def __post_init__(self):
        if self.cls not in CLASSES:
            raise ValueError(f"unknown class {self.cls!r}")
        if self.budget < 1 or self.index < 0:
            raise ValueError("cursor out of range")

    def serialize(self) -> str:
        return f"cursor class={self.cls} budget={self.budget} index={self.index}"

    @classmethod
    def parse(cls, line: str) -> "GenerationCursor":
        parts = line.split()
        if not parts or parts[0] != "cursor":
            raise ValueError(f"not a cursor record: {line!r}")
        kv = dict(p.split("=", 1) for p in parts[1:])
        return cls(kv["class"], int(kv["budget"]), int(kv["index"]))


def candidates(
    classes: Sequence[str],
    max_crossings: int,
    catalog: Sequence[ConwayPolyhedron] = (),
    shard: tuple[int, int] = (0, 1),
    start: GenerationCursor | None = None,
) -> Iterator[Candidate]:
    """All candidates in canonical order: class, then budget, then index.

    Only indices ``i`` with ``i % k == shard_index`` are built. Iteration
    begins at ``start`` when given.
    """
    si, sk = shard
    if not (0 <= si < sk):
        raise ValueError("shard index out of range")
    for cls in classes:
        if cls not in CLASSES:
            raise ValueError(f"unknown class {cls!r}")
        if start is not None and CLASSES.index(cls) < CLASSES.index(start.cls) and start.cls in classes:
            continue
        for n in range(1, max_crossings + 1):
            if start is not None and cls == start.cls and n < start.budget:
                continue
            first = start.index if (start is not None and cls == start.cls and n == start.budget) else 0
            if cls == "algebraic":
                items = enumerate(_closure_items(n, first), start=first)
            else:
                items = enumerate(_polyhedral_items(n, catalog))
            for i, item in items:
                if i < first or i % sk != si:
                    continue
                if cls == "algebraic":
                    label, t, mode = item
                    build = lambda t=t, mode=mode: tangle_closure(t, mode)
                else:
                    label, p, fill = item
                    build = lambda p=p, fill=fill: polyhedron_substitute(p, fill)
                try:
                    d = build()
                except MultiComponentError:
                    d = None
                yield Candidate(cls, n, i, label, d)


def random_algebraic_tangle(n: int, rng: random.Random) -> Tangle:
    """A random stream-form tangle with n crossings (uniform over a few shapes).

    Builds a sum of random canonical rational atoms, nesting flipped sums,
    so the result is in normal form without enumerating the whole stream.
    """
    if n < 4:
        return _nf_tree(rng.choice(_stream_forms(n)))
    while True:
        # merging summands can cancel crossings; redraw until the size is exact
        x = _random_form(n, rng)
        if x[0] in ("r", "s") and _nf_size(x) == n:
            return _nf_tree(x)


def _random_rational(s: int, rng: random.Random):
    # random composition with first part >= 2, random orientation/sign
    if s == 1:
        return ("r", Fraction(rng.choice((1, -1))))
    parts = []
    rest = s
    while rest:
        lo = 2 if not parts else 1
        if rest < lo:
            parts[-1] += rest
            break
        a = rng.randint(lo, min(rest, 4))
        if rest - a == 1 and not parts and a == rest - 1:
            pass
        parts.append(a)
        rest -= a
    f = Fraction(parts[0])
    for a in parts[1:]:
        f = a + 1 / f
    if rng.random() < 0.5 and f != 1:
        f = 1 / f
    if rng.random() < 0.5:
        f = -f
    return ("r", f)


def _random_form(n: int, rng: random.Random):
    # split n into atom sizes >= 2
    sizes = []
    rest = n
    while rest:
        if rest <= 3:
            s = rest
        else:
            s = rng.randint(2, min(rest - 2, 8)) if rest >= 4 else rest
        sizes.append(s)
        rest -= s
    atoms = []
    for s in sizes:
        if s >= 6 and rng.random() < 0.25:
            sub = _random_form(s, rng)
            atoms.append(_nf_flip(sub) if sub[0] == "s" else sub)
        else:
            atoms.append(_random_rational(s, rng))
    x = atoms[0]
    for a in atoms[1:]:
        x = _nf_sum(x, a)
    return x
