"""Conway algebraic tangles, their closures, and polyhedron substitution.

Grammar: integer twists (horizontal, ``k != 0``), the 0 and infinity
tangles, ``Sum(a, b)`` (``a`` placed left of ``b``) and ``Product(a, b)``,
which is ``flip(a) + b`` with ``flip`` the reflection in the NW-SE diagonal.
For rational tangles the fraction behaves as ``F(a + k) = F(a) + k`` and
``F(flip a) = 1 / F(a)``.

Text form (Conway notation): integers, ``0``, ``oo``, ``+`` for sum, ``*``
for product, parentheses. ``*`` binds tighter than ``+`` and both associate
to the left, so ``2*2+3`` is ``Sum(Product(2, 2), 3)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from itertools import count
from typing import Iterable, Sequence, Union

from .pd import DiagramError, MultiComponentError, PlanarDiagram, build_pd, pd_validate

__all__ = [
    "Twist",
    "Zero",
    "Infinity",
    "Sum",
    "Product",
    "Tangle",
    "ZERO_TANGLE",
    "INFINITY_TANGLE",
    "crossing_count",
    "parse_conway",
    "format_conway",
    "tangle_closure",
    "fraction",
    "is_rational",
    "ConwayPolyhedron",
    "parse_catalog",
    "load_catalog",
    "default_catalog",
    "polyhedron_substitute",
]


@dataclass(frozen=True)
class Twist:
    k: int

    def __post_init__(self):
        if self.k == 0:
            raise ValueError("use Zero() for the 0-tangle")

    @property
    def crossing_count(self) -> int:
        return abs(self.k)


@dataclass(frozen=True)
class Zero:
    crossing_count = 0


@dataclass(frozen=True)
class Infinity:
    crossing_count = 0


@dataclass(frozen=True)
class Sum:
    left: "Tangle"
    right: "Tangle"
    crossing_count: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "crossing_count", self.left.crossing_count + self.right.crossing_count)


@dataclass(frozen=True)
class Product:
    left: "Tangle"
    right: "Tangle"
    crossing_count: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "crossing_count", self.left.crossing_count + self.right.crossing_count)


Tangle = Union[Twist, Zero, Infinity, Sum, Product]
ZERO_TANGLE = Zero()
INFINITY_TANGLE = Infinity()


def crossing_count(t: Tangle) -> int:
    return t.crossing_count


# -- text ---------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(-?\d+)|(oo|inf)|([+*()]))")


def parse_conway(text: str) -> Tangle:
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"bad Conway notation at {text[pos:]!r}")
        tokens.append(m.group(1) or m.group(2) or m.group(3))
        pos = m.end()
    tokens.append(None)
    i = 0

    def peek():
        return tokens[i]

    def take():
        nonlocal i
        tok = tokens[i]
        i += 1
        return tok

    def atom():
        tok = take()
        if tok == "(":
            t = expr()
            if take() != ")":
                raise ValueError("unbalanced parentheses")
            return t
        if tok in ("oo", "inf"):
            return INFINITY_TANGLE
        if tok is None or tok in "+*)":
            raise ValueError(f"unexpected token {tok!r}")
        k = int(tok)
        return ZERO_TANGLE if k == 0 else Twist(k)

    def term():
        t = atom()
        while peek() == "*":
            take()
            t = Product(t, atom())
        return t

    def expr():
        t = term()
        while peek() == "+":
            take()
            t = Sum(t, term())
        return t

    t = expr()
    if peek() is not None:
        raise ValueError(f"trailing input in {text!r}")
    return t


def format_conway(t: Tangle) -> str:
    if isinstance(t, Twist):
        return str(t.k)
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, Infinity):
        return "oo"
    if isinstance(t, Sum):
        r = format_conway(t.right)
        if isinstance(t.right, Sum):
            r = f"({r})"
        return f"{format_conway(t.left)}+{r}"
    left = format_conway(t.left)
    if isinstance(t.left, Sum):
        left = f"({left})"
    r = format_conway(t.right)
    if isinstance(t.right, (Sum, Product)):
        r = f"({r})"
    return f"{left}*{r}"


# -- fractions ----------------------------------------------------------------

INF = None  # the fraction of the infinity tangle


def _add(f, g):
    if f is INF or g is INF:
        return INF
    return f + g


def _inv(f):
    if f is INF:
        return Fraction(0)
    if f == 0:
        return INF
    return 1 / f


def fraction(t: Tangle):
    """Fraction of a rational tangle (None for infinity); ValueError otherwise."""
    ok, f = _rational(t)
    if not ok:
        raise ValueError(f"{format_conway(t)} is not a rational tangle")
    return f


def is_rational(t: Tangle) -> bool:
    return _rational(t)[0]


def _is_integral(f) -> bool:
    return f is not INF and f.denominator == 1


def _rational(t: Tangle):
    if isinstance(t, Twist):
        return True, Fraction(t.k)
    if isinstance(t, Zero):
        return True, Fraction(0)
    if isinstance(t, Infinity):
        return True, INF
    if isinstance(t, Sum):
        ra, fa = _rational(t.left)
        rb, fb = _rational(t.right)
        if ra and rb and (_is_integral(fa) or _is_integral(fb)):
            return True, _add(fa, fb)
        return False, None
    ra, fa = _rational(t.left)
    rb, fb = _rational(t.right)
    if ra and rb:
        fl = _inv(fa)
        if _is_integral(fl) or _is_integral(fb):
            return True, _add(fl, fb)
    return False, None


# -- geometric realisation ----------------------------------------------------
# A crossing drawn as an X has ends at SE, NE, NW, SW (counterclockwise).
# The under-strand must sit in slots 0 and 2, so a +1 crossing (over-strand
# of positive slope, SW-NE) starts at SE and a -1 crossing starts at SW.
_SLOT = {
    1: {"SE": 0, "NE": 1, "NW": 2, "SW": 3},
    -1: {"SW": 0, "SE": 1, "NE": 2, "NW": 3},
}


class _RawTangle:
    """Crossings plus a symmetric link table over ends and boundary nodes.

    Crossing ends are ``4 * c + s``; boundary nodes are negative ints.
    """

    __slots__ = ("n", "link", "corner", "loops", "tree")

    def __init__(self, n, link, corner, loops=0, tree=None):
        self.n = n
        self.link = link
        self.corner = corner
        self.loops = loops
        self.tree = tree


_node_ids = count(1)


def _new_node() -> int:
    return -next(_node_ids)


def _twist(k: int) -> _RawTangle:
    sign = 1 if k > 0 else -1
    slot = _SLOT[sign]
    m = abs(k)
    link: dict[int, int] = {}

    def end(c, pos):
        return 4 * c + slot[pos]

    for c in range(m - 1):
        link[end(c, "NE")] = end(c + 1, "NW")
        link[end(c + 1, "NW")] = end(c, "NE")
        link[end(c, "SE")] = end(c + 1, "SW")
        link[end(c + 1, "SW")] = end(c, "SE")
    corner = {}
    for name, c, pos in (("NW", 0, "NW"), ("SW", 0, "SW"), ("NE", m - 1, "NE"), ("SE", m - 1, "SE")):
        node = _new_node()
        corner[name] = node
        link[node] = end(c, pos)
        link[end(c, pos)] = node
    tree = 0
    for c in range(1, m):
        tree = (tree, c)
    return _RawTangle(m, link, corner, 0, tree)


def _trivial(vertical: bool) -> _RawTangle:
    nodes = {name: _new_node() for name in ("NW", "NE", "SE", "SW")}
    pairs = (("NW", "SW"), ("NE", "SE")) if vertical else (("NW", "NE"), ("SW", "SE"))
    link = {}
    for a, b in pairs:
        link[nodes[a]] = nodes[b]
        link[nodes[b]] = nodes[a]
    return _RawTangle(0, link, nodes, 0, None)


def _shift_tree(tree, off):
    if tree is None:
        return None
    if isinstance(tree, int):
        return tree + off
    return (_shift_tree(tree[0], off), _shift_tree(tree[1], off))


def _join_trees(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return (a, b)


def _join(link: dict[int, int], x: int, y: int) -> int:
    """Connect boundary nodes x and y; return 1 if that closed a crossingless loop."""
    xp = link.pop(x)
    if xp == y:
        link.pop(y)
        return 1
    yp = link.pop(y)
    link[xp] = yp
    link[yp] = xp
    return 0


def _sum(a: _RawTangle, b: _RawTangle) -> _RawTangle:
    off = 4 * a.n
    link = dict(a.link)
    for e, f in b.link.items():
        link[e + off if e >= 0 else e] = f + off if f >= 0 else f
    loops = a.loops + b.loops
    loops += _join(link, a.corner["NE"], b.corner["NW"])
    loops += _join(link, a.corner["SE"], b.corner["SW"])
    corner = {"NW": a.corner["NW"], "SW": a.corner["SW"], "NE": b.corner["NE"], "SE": b.corner["SE"]}
    tree = _join_trees(a.tree, _shift_tree(b.tree, a.n))
    return _RawTangle(a.n + b.n, link, corner, loops, tree)


def _flip(a: _RawTangle) -> _RawTangle:
    # reflection reverses every crossing's cyclic order: slots 1 <-> 3
    def m(e):
        return e if e < 0 or not (e & 1) else e ^ 2

    link = {m(e): m(f) for e, f in a.link.items()}
    c = a.corner
    corner = {"NW": c["NW"], "SE": c["SE"], "NE": c["SW"], "SW": c["NE"]}
    return _RawTangle(a.n, link, corner, a.loops, a.tree)


def _realise(t: Tangle) -> _RawTangle:
    if isinstance(t, Twist):
        return _twist(t.k)
    if isinstance(t, Zero):
        return _trivial(False)
    if isinstance(t, Infinity):
        return _trivial(True)
    if isinstance(t, Sum):
        return _sum(_realise(t.left), _realise(t.right))
    return _sum(_flip(_realise(t.left)), _realise(t.right))


def _close(raw: _RawTangle, pairs) -> PlanarDiagram:
    link = dict(raw.link)
    loops = raw.loops
    for a, b in pairs:
        loops += _join(link, raw.corner[a], raw.corner[b])
    n = raw.n
    if n == 0:
        if loops != 1:
            raise MultiComponentError(loops)
        return PlanarDiagram(())
    if loops:
        raise MultiComponentError(loops + 1)
    table = [link[e] for e in range(4 * n)]
    return build_pd(n, table, start=0, tree=raw.tree)


def tangle_closure(t: Tangle, mode: str = "numerator") -> PlanarDiagram:
    """Numerator (NW-NE, SW-SE) or denominator (NW-SW, NE-SE) closure.

    Raises MultiComponentError when the closure is a link.
    """
    if mode in ("numerator", "N"):
        pairs = (("NW", "NE"), ("SW", "SE"))
    elif mode in ("denominator", "D"):
        pairs = (("NW", "SW"), ("NE", "SE"))
    else:
        raise ValueError(f"unknown closure mode {mode!r}")
    return _close(_realise(t), pairs)


# -- Conway polyhedra ---------------------------------------------------------

_CORNERS = ("NW", "SW", "SE", "NE")  # counterclockwise slot order of a vertex


@dataclass(frozen=True)
class ConwayPolyhedron:
    """A 4-valent planar template; ``vertices[v]`` lists edge labels
    counterclockwise, matched to the NW, SW, SE, NE corners of the tangle
    substituted there."""

    name: str
    vertices: tuple[tuple[int, int, int, int], ...]

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    def problems(self) -> list[str]:
        out = []
        n = len(self.vertices)
        # the template read as a PD code exercises the same face count
        geo_pd = [tuple(v) for v in self.vertices]
        labels = sorted(x for v in geo_pd for x in v)
        if labels != sorted(list(range(1, 2 * n + 1)) * 2):
            out.append("edge-labels")
            return out
        partner = {}
        where: dict[int, list[int]] = {}
        for i, v in enumerate(geo_pd):
            for s, lab in enumerate(v):
                where.setdefault(lab, []).append(4 * i + s)
        for a, b in where.values():
            partner[a] = b
            partner[b] = a
        seen = set()
        faces = 0
        sizes = []
        for e0 in range(4 * n):
            if e0 in seen:
                continue
            faces += 1
            size = 0
            e = e0
            while e not in seen:
                seen.add(e)
                size += 1
                p = partner[e]
                e = (p & ~3) | ((p + 1) & 3)
            sizes.append(size)
        if faces != n + 2:
            out.append("non-planar")
        if n < 6:
            out.append("too-few-vertices")
        if min(sizes, default=3) < 3:
            out.append("bigon-or-monogon")
        # connectivity
        adj = {i: set() for i in range(n)}
        for a, b in partner.items():
            adj[a >> 2].add(b >> 2)
        stack, reach = [0], {0}
        while stack:
            v = stack.pop()
            for w in adj[v] - reach:
                reach.add(w)
                stack.append(w)
        if len(reach) != n:
            out.append("disconnected")
        return out


_V = re.compile(r"V\s*\(\s*([^)]*)\)")


def parse_catalog(text: str) -> list[ConwayPolyhedron]:
    """One polyhedron per line: ``name vertex_count V(a,b,c,d) V(...) ...``.

    Blank lines and ``#`` comments are ignored.
    """
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 2)
        if len(parts) < 3:
            raise ValueError(f"line {lineno}: expected 'name vertex_count template'")
        name, vc, template = parts
        verts = []
        for m in _V.finditer(template):
            vals = [int(v) for v in re.split(r"[\s,]+", m.group(1).strip()) if v]
            if len(vals) != 4:
                raise ValueError(f"line {lineno}: vertex needs four edge labels")
            verts.append(tuple(vals))
        if len(verts) != int(vc):
            raise ValueError(f"line {lineno}: declared {vc} vertices, found {len(verts)}")
        poly = ConwayPolyhedron(name, tuple(verts))
        bad = poly.problems()
        if bad:
            raise ValueError(f"line {lineno}: polyhedron {name} invalid: {', '.join(bad)}")
        out.append(poly)
    return out


def load_catalog(path) -> list[ConwayPolyhedron]:
    with open(path, encoding="utf-8") as fh:
        return parse_catalog(fh.read())


def default_catalog() -> list[ConwayPolyhedron]:
    text = resources.files("knotverify").joinpath("data/polyhedra.txt").read_text(encoding="utf-8")
    return parse_catalog(text)


def polyhedron_substitute(p: ConwayPolyhedron, slots: Sequence[Tangle]) -> PlanarDiagram:
    """Insert one tangle per vertex; corners NW, SW, SE, NE follow the
    vertex's counterclockwise edge list."""
    if len(slots) != p.vertex_count:
        raise ValueError(f"{p.name} has {p.vertex_count} vertices, got {len(slots)} tangles")
    raws = [_realise(t) for t in slots]
    link: dict[int, int] = {}
    offsets = []
    off = 0
    for r in raws:
        offsets.append(off)
        for e, f in r.link.items():
            link[e + 4 * off if e >= 0 else e] = f + 4 * off if f >= 0 else f
        off += r.n
    loops = sum(r.loops for r in raws)
    # each template edge joins two tangle corners
    where: dict[int, list[int]] = {}
    for v, edges in enumerate(p.vertices):
        for s, lab in enumerate(edges):
            where.setdefault(lab, []).append(raws[v].corner[_CORNERS[s]])
    for a, b in where.values():
        loops += _join(link, a, b)
    n = off
    if n == 0 or loops:
        raise MultiComponentError(loops + (1 if n else 0))
    table = [link[e] for e in range(4 * n)]
    tree = None
    for r, o in zip(raws, offsets):
        tree = _join_trees(tree, _shift_tree(r.tree, o))
    d = build_pd(n, table, start=0, tree=tree)
    return d
