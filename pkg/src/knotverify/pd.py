"""Planar diagram (PD) codes for knot diagrams.

Each crossing is a 4-tuple of arc labels listed counterclockwise starting
from the incoming under-strand, so slot 0 enters under, slot 2 leaves under
and slots 1/3 carry the over-strand. Internally a crossing end is the
integer ``4 * crossing + slot``.

Everything built here goes through :func:`build_pd`, which takes a "raw"
diagram (crossings whose under-strand occupies slots 0 and 2, plus a
symmetric end-to-end link table) and renumbers the arcs along the knot.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Sequence

__all__ = [
    "PlanarDiagram",
    "DiagramError",
    "MultiComponentError",
    "pd_validate",
    "writhe",
    "mirror",
    "parse_pd",
    "format_pd",
    "build_pd",
    "raw_links",
    "canonical_pd_key",
    "dt_code",
]


class DiagramError(ValueError):
    """An operation was given a diagram it cannot handle."""


class MultiComponentError(DiagramError):
    """The construction produced a link with more than one component."""

    def __init__(self, components: int):
        super().__init__(f"diagram has {components} components")
        self.components = components


Crossing = tuple[int, int, int, int]


@dataclass(frozen=True)
class PlanarDiagram:
    crossings: tuple[Crossing, ...]
    # optional merge tree (nested 2-tuples of crossing indices) recorded by
    # tangle constructions; the bracket planner follows it when present
    tree: Any = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(
            self, "crossings", tuple(tuple(int(v) for v in x) for x in self.crossings)
        )

    @property
    def n(self) -> int:
        return len(self.crossings)

    @property
    def arc_count(self) -> int:
        return 2 * len(self.crossings)

    def __len__(self) -> int:
        return len(self.crossings)

    def __str__(self) -> str:
        return format_pd(self)

    @cached_property
    def geometry(self) -> "_Geometry":
        return _Geometry(self.crossings)


class _Geometry:
    """Derived data for a valid knot PD: partners, orientation and faces."""

    def __init__(self, crossings: Sequence[Crossing]):
        n = len(crossings)
        self.n = n
        where: dict[int, list[int]] = {}
        for i, x in enumerate(crossings):
            if len(x) != 4:
                raise DiagramError("crossings must have four entries")
            for s, lab in enumerate(x):
                where.setdefault(lab, []).append(4 * i + s)
        bad = [lab for lab, ends in where.items() if len(ends) != 2]
        if bad:
            raise DiagramError(f"arc labels not used exactly twice: {sorted(bad)[:5]}")
        partner = [0] * (4 * n)
        for a, b in where.values():
            partner[a] = b
            partner[b] = a
        self.partner = partner
        self.labels = [crossings[e >> 2][e & 3] for e in range(4 * n)]

        # strand tracing: entering at end e, leave at e ^ 2, arrive at partner
        seen = [False] * (4 * n)
        comps = 0
        order: list[int] = []
        orient_ok = True
        for start in range(4 * n):
            if seen[start]:
                continue
            comps += 1
            # orient from an under-entry (slot 0) when the component has one
            members = []
            e = start
            while True:
                members.append(e)
                e = partner[e ^ 2]
                if e == start or len(members) > 4 * n:
                    break
            unders = [f for f in members + [f ^ 2 for f in members] if (f & 3) == 0]
            first = min(unders) if unders else start
            e = first
            while True:
                seen[e] = seen[e ^ 2] = True
                if comps == 1:
                    order.append(e)
                if (e & 3) == 2:
                    orient_ok = False
                e = partner[e ^ 2]
                if e == first:
                    break
        self.components = comps
        self.orientation_ok = orient_ok
        # entering ends of the first component, in traversal order
        self.passes = order

        # faces: the dart e -> partner[e] continues with the dart leaving
        # the next slot counterclockwise; the face lies on its right
        face_of = [-1] * (4 * n)
        faces: list[list[int]] = []
        for e0 in range(4 * n):
            if face_of[e0] >= 0:
                continue
            fid = len(faces)
            cyc = []
            e = e0
            while face_of[e] < 0:
                face_of[e] = fid
                cyc.append(e)
                p = partner[e]
                e = (p & ~3) | ((p + 1) & 3)
            faces.append(cyc)
        self.face_of = face_of
        self.faces = faces

    @cached_property
    def is_in(self) -> list[bool]:
        """is_in[e]: the knot enters its crossing through end e."""
        flags = [False] * (4 * self.n)
        for e in self.passes:
            flags[e] = True
        return flags

    @cached_property
    def over_in(self) -> list[int]:
        """Slot (1 or 3) where the over-strand enters each crossing."""
        res = [0] * self.n
        for e in self.passes:
            if e & 1:
                res[e >> 2] = e & 3
        return res

    @cached_property
    def signs(self) -> list[int]:
        return [1 if s == 3 else -1 for s in self.over_in]


def pd_validate(d: PlanarDiagram | Sequence[Sequence[int]]) -> list[str]:
    """Return the list of violated invariants; an empty list means valid."""
    crossings = d.crossings if isinstance(d, PlanarDiagram) else tuple(map(tuple, d))
    problems: list[str] = []
    if any(len(x) != 4 for x in crossings):
        return ["malformed"]
    n = len(crossings)
    counts = Counter(lab for x in crossings for lab in x)
    if any(c != 2 for c in counts.values()):
        problems.append("duplicate-arc-count")
        return problems
    if set(counts) != set(range(1, 2 * n + 1)):
        problems.append("arc-labels")
    geo = _Geometry(crossings)
    if geo.components != 1 and n > 0:
        problems.append("multi-component")
    elif not geo.orientation_ok:
        problems.append("orientation")
    if n > 0 and geo.components == 1 and len(geo.faces) != n + 2:
        problems.append("non-planar")
    return problems


def require_knot(d: PlanarDiagram) -> _Geometry:
    geo = d.geometry
    if d.n and geo.components != 1:
        raise MultiComponentError(geo.components)
    return geo


def writhe(d: PlanarDiagram) -> int:
    if not d.n:
        return 0
    return sum(require_knot(d).signs)


def mirror(d: PlanarDiagram) -> PlanarDiagram:
    """Switch every crossing; labels and crossing order are kept."""
    geo = require_knot(d)
    out = []
    for x, s in zip(d.crossings, geo.over_in):
        a, b, c, e = x
        out.append((e, a, b, c) if s == 3 else (b, c, e, a))
    return PlanarDiagram(tuple(out), tree=d.tree)


_X = re.compile(r"X\s*[\(\[]\s*([^\)\]]*)[\)\]]")


def parse_pd(text: str) -> PlanarDiagram:
    """Parse ``X(1,4,2,5) X(3,6,4,1) ...``; an empty string is the unknot."""
    body = text.strip()
    if body.upper().startswith("PD"):
        body = body[2:].strip()
        if body[:1] in "[(" and body[-1:] in "])":
            body = body[1:-1]
    crossings = []
    pos = 0
    for m in _X.finditer(body):
        if body[pos:m.start()].strip(" ,;"):
            raise ValueError(f"unexpected text in PD code: {body[pos:m.start()]!r}")
        vals = [v for v in re.split(r"[\s,]+", m.group(1).strip()) if v]
        if len(vals) != 4:
            raise ValueError(f"crossing needs four labels: {m.group(0)!r}")
        crossings.append(tuple(int(v) for v in vals))
        pos = m.end()
    if body[pos:].strip(" ,;"):
        raise ValueError(f"unexpected text in PD code: {body[pos:]!r}")
    return PlanarDiagram(tuple(crossings))


def format_pd(d: PlanarDiagram) -> str:
    return " ".join("X(%d,%d,%d,%d)" % x for x in d.crossings)


def raw_links(d: PlanarDiagram) -> list[int]:
    """End-to-end link table of a PD (slot 0/2 is the under-strand)."""
    return list(d.geometry.partner)


def _remap_tree(tree, mapping):
    if tree is None:
        return None
    if isinstance(tree, int):
        return mapping[tree]
    return tuple(_remap_tree(t, mapping) for t in tree)


def build_pd(n: int, link: Sequence[int], start: int = 0, tree: Any = None) -> PlanarDiagram:
    """Renumber a raw diagram along the knot.

    ``link[e]`` is the end joined to end ``e``; slots 0 and 2 of every
    crossing form its under-strand (direction free). The traversal enters a
    crossing through ``start`` and the arc entering there becomes arc 1.
    Crossings are listed by their under-incoming label. Raises
    MultiComponentError when the ends do not form a single closed strand.
    """
    if n == 0:
        return PlanarDiagram((), tree=None)
    m = 2 * n
    label = [0] * (4 * n)
    rot = [0] * n
    e = start
    j = 0
    while True:
        label[e] = j + 1
        out = e ^ 2
        label[out] = (j + 1) % m + 1
        if not (e & 1):
            rot[e >> 2] = e & 3
        j += 1
        e = link[out]
        if e == start:
            break
        if j > m:
            raise DiagramError("link table does not close up")
    if j != m:
        # count the components for the error message
        seen = [False] * (4 * n)
        comps = 0
        for s in range(4 * n):
            if seen[s]:
                continue
            comps += 1
            f = s
            while not seen[f]:
                seen[f] = seen[f ^ 2] = True
                f = link[f ^ 2]
        raise MultiComponentError(comps)
    tuples = []
    for c in range(n):
        r = rot[c]
        b = 4 * c
        tuples.append(
            (label[b + r], label[b + ((r + 1) & 3)], label[b + ((r + 2) & 3)], label[b + ((r + 3) & 3)])
        )
    order = sorted(range(n), key=lambda c: tuples[c][0])
    new_index = {old: new for new, old in enumerate(order)}
    return PlanarDiagram(tuple(tuples[c] for c in order), tree=_remap_tree(tree, new_index))


def canonical_pd_key(d: PlanarDiagram) -> tuple:
    """Relabeling-invariant key: minimum over all traversal starts and directions."""
    if not d.n:
        return ()
    link = raw_links(d)
    best = None
    for start in range(4 * d.n):
        key = build_pd(d.n, link, start).crossings
        if best is None or key < best:
            best = key
    return best


def dt_code(d: PlanarDiagram) -> list[int]:
    """Dowker-Thistlethwaite code along the orientation from arc 1.

    Visits are numbered from 1 at the crossing that arc 1 enters; the even
    label of each crossing is negated when that visit passes under.
    """
    if not d.n:
        return []
    geo = require_knot(d)
    passes = geo.passes
    labels = geo.labels
    k = next(i for i, e in enumerate(passes) if labels[e] == 1)
    seq = passes[k:] + passes[:k]
    odd_to_even: dict[int, int] = {}
    visit: dict[int, tuple[int, int]] = {}
    for num, e in enumerate(seq, start=1):
        c = e >> 2
        if c in visit:
            first, _ = visit[c]
            pair = (first, num) if first % 2 else (num, first)
            even_num = pair[1]
            even_under = (seq[even_num - 1] & 1) == 0
            odd_to_even[pair[0]] = -even_num if even_under else even_num
        else:
            visit[c] = (num, 0)
    return [odd_to_even[i] for i in range(1, 2 * d.n, 2)]
