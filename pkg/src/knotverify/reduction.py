"""Elimination of diagrams that simplify by a pass move.

A pass move lifts a bridge (a run of consecutive over-passes between two
under-passes) off the diagram and lays it back along a different route
through the faces of what is left, passing over every strand it meets.
The route is a shortest path in the dual graph, so the search finds a
crossing-reducing pass whenever one exists for a given bridge. Under-bridges
are handled on the mirror image.

Kinks and cancelling clasps are the length-1 cases and are checked first.
A pass that keeps the crossing count but lowers the number of polyhedral
vertices (what is left after collapsing every algebraic tangle region) is
also reported when ``vertex_moves`` is on.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .moves import remove_crossings
from .pd import PlanarDiagram, build_pd, mirror, require_knot

__all__ = [
    "Bridge",
    "ReductionOutcome",
    "find_bridges",
    "find_elementary_reduction",
    "find_pass_move",
    "reduce_fixpoint",
    "polyhedral_vertex_count",
]


@dataclass(frozen=True)
class Bridge:
    """A maximal run of over-passes (``level='over'``) or under-passes."""

    level: str
    start: int  # crossing where the strand last passed on the other level
    end: int  # crossing where it next does
    crossings: tuple[int, ...]  # crossings spanned, in order

    @property
    def length(self) -> int:
        return len(self.crossings)


@dataclass(frozen=True)
class ReductionOutcome:
    kind: str  # "r1", "r2" or "pass"
    before_count: int
    after_count: int
    witness: str
    result: PlanarDiagram = field(repr=False)
    vertices_before: int | None = None
    vertices_after: int | None = None

    def describe(self) -> str:
        text = f"{self.kind}: {self.before_count} -> {self.after_count} crossings ({self.witness})"
        if self.vertices_before is not None:
            text += f", polyhedral vertices {self.vertices_before} -> {self.vertices_after}"
        return text


def _finish(n: int, link) -> PlanarDiagram:
    if n == 0:
        return PlanarDiagram(())
    return build_pd(n, link)


# -- elementary ---------------------------------------------------------------

def find_elementary_reduction(d: PlanarDiagram) -> ReductionOutcome | None:
    if d.n == 0:
        return None
    geo = require_knot(d)
    p = geo.partner
    for c in range(d.n):
        for s in range(4):
            if p[4 * c + s] == 4 * c + ((s + 1) & 3):
                n, link, _ = remove_crossings(d.n, list(p), {c})
                return ReductionOutcome("r1", d.n, n, f"kink at crossing {c}", _finish(n, link))
    for face in geo.faces:
        if len(face) != 2:
            continue
        c1, c2 = face[0] >> 2, face[1] >> 2
        if c1 != c2 and all(((e ^ p[e]) & 1) == 0 for e in face):
            n, link, _ = remove_crossings(d.n, list(p), {c1, c2})
            return ReductionOutcome("r2", d.n, n, f"clasp at crossings {c1},{c2}", _finish(n, link))
    return None


# -- bridges ------------------------------------------------------------------

def find_bridges(d: PlanarDiagram, level: str = "over") -> list[Bridge]:
    if d.n == 0:
        return []
    geo = require_knot(d)
    passes = geo.passes
    want = 1 if level == "over" else 0
    m = len(passes)
    # start right after some pass of the other level
    k0 = next(i for i, e in enumerate(passes) if (e & 1) != want)
    seq = passes[k0 + 1:] + passes[:k0 + 1]
    out = []
    run: list[int] = []
    prev = passes[k0] >> 2
    for e in seq:
        if (e & 1) == want:
            run.append(e >> 2)
        else:
            if run:
                out.append(Bridge(level, prev, e >> 2, tuple(run)))
                run = []
            prev = e >> 2
    assert not run and m == len(seq)
    return out


def _faces_without(n: int, link, missing: set[int]):
    """Faces of the graph with ends in ``missing`` deleted."""
    face_of = {}
    faces = []
    for e0 in range(4 * n):
        if e0 in missing or e0 in face_of:
            continue
        fid = len(faces)
        cyc = []
        e = e0
        while e not in face_of:
            face_of[e] = fid
            cyc.append(e)
            q = link[e]
            c, s = q & ~3, q & 3
            s = (s + 1) & 3
            while (c | s) in missing:
                s = (s + 1) & 3
            e = c | s
        faces.append(cyc)
    return face_of, faces


def _reroute_over(d: PlanarDiagram, b: Bridge):
    """Best over-reroute of bridge ``b``: (cost, new n, link) or None."""
    geo = d.geometry
    removed = set(b.crossings)
    if b.start in removed or b.end in removed or b.start == b.end:
        return None
    n, link, loops = remove_crossings(d.n, list(geo.partner), removed)
    if loops:
        return None
    keep = [c for c in range(d.n) if c not in removed]
    idx = {c: i for i, c in enumerate(keep)}
    a_end = 4 * idx[b.start] + 2  # bridge leaves its start under-pass here
    z_end = 4 * idx[b.end]  # and enters the end under-pass here
    if link[a_end] != z_end:
        return None
    missing = {a_end, z_end}
    face_of, faces = _faces_without(n, link, missing)
    src = face_of[4 * idx[b.start] + 3]
    dst = face_of[4 * idx[b.end] + 1]
    # BFS in the dual graph; crossing an edge costs one new crossing
    prev = {src: None}
    queue = deque([src])
    while queue and dst not in prev:
        f = queue.popleft()
        for e in faces[f]:
            g = face_of[link[e]]
            if g not in prev:
                prev[g] = (f, e)
                queue.append(g)
    if dst not in prev:
        return None
    path = []
    f = dst
    while prev[f] is not None:
        f0, e = prev[f]
        path.append((e, f0))
        f = f0
    path.reverse()
    return len(path), n, link, path, a_end, z_end, face_of


def _build_reroute(n, link, path, a_end, z_end, face_of) -> tuple[int, list[int]]:
    """Lay the strand from ``a_end`` to ``z_end`` over the crossed edges."""
    m = len(path)
    total = n + m
    out = list(link) + [0] * (4 * m)

    def join(x, y):
        out[x] = y
        out[y] = x

    prev_end = a_end
    for i, (e, from_face) in enumerate(path):
        c = 4 * (n + i)
        f = link[e]
        # dart e -> f is split: under-strand slot 0 toward e, slot 2 toward f
        join(e, c)
        join(c + 2, f)
        # the strand arrives from face ``from_face``; face_of[e] lies right of e -> f
        if from_face == face_of[e]:
            over_in, over_out = 1, 3
        else:
            over_in, over_out = 3, 1
        join(prev_end, c + over_in)
        prev_end = c + over_out
        # later path edges may reference e or f; keep them pointing at the split
        link = list(link)
        link[e] = c
        link[f] = c + 2
    join(prev_end, z_end)
    return total, out


def _try_bridges(d: PlanarDiagram, max_bridge: int | None, level_name: str, vertex_moves: bool, vcount):
    for b in find_bridges(d, "over"):
        if max_bridge is not None and b.length > max_bridge:
            continue
        found = _reroute_over(d, b)
        if found is None:
            continue
        m, n, link, path, a_end, z_end, face_of = found
        if m < b.length or (vertex_moves and m == b.length and vcount() > 0):
            total, new_link = _build_reroute(n, link, path, a_end, z_end, face_of)
            result = _finish(total, new_link)
            if m == b.length:
                after_v = polyhedral_vertex_count(result)
                if after_v >= vcount():
                    continue
                yield b, m, result, (vcount(), after_v)
            else:
                yield b, m, result, None


def find_pass_move(
    d: PlanarDiagram,
    max_bridge: int | None = None,
    vertex_moves: bool = True,
) -> ReductionOutcome | None:
    """A pass move that lowers the crossing count (or, with ``vertex_moves``,
    the polyhedral vertex count at equal crossings); None when there is none."""
    if d.n == 0:
        return None
    el = find_elementary_reduction(d)
    if el is not None:
        return el
    cache: dict[str, int] = {}

    def vcount():
        if "v" not in cache:
            cache["v"] = polyhedral_vertex_count(d)
        return cache["v"]

    best_vertex = None
    for level, diagram in (("over", d), ("under", None)):
        if diagram is None:
            diagram = mirror(d)
        for b, m, result, vinfo in _try_bridges(diagram, max_bridge, level, vertex_moves, vcount):
            if level == "under":
                result = mirror(result)
            witness = f"{level}-bridge {'-'.join(map(str, b.crossings))} of length {b.length} rerouted across {m}"
            if vinfo is None:
                return ReductionOutcome("pass", d.n, result.n, witness, result)
            if best_vertex is None:
                best_vertex = ReductionOutcome("pass", d.n, result.n, witness, result, vinfo[0], vinfo[1])
    return best_vertex


def reduce_fixpoint(
    d: PlanarDiagram,
    max_bridge: int | None = None,
    vertex_moves: bool = True,
    trace: list | None = None,
) -> PlanarDiagram:
    """Apply reductions until none is found.

    Every step lowers (crossings, polyhedral vertices) lexicographically,
    so this terminates.
    """
    while True:
        out = find_pass_move(d, max_bridge, vertex_moves)
        if out is None:
            return d
        if trace is not None:
            trace.append(out)
        d = out.result


# -- polyhedral vertex count --------------------------------------------------

def polyhedral_vertex_count(d: PlanarDiagram) -> int:
    """Vertices left after collapsing the diagram's algebraic regions.

    Works on the 4-valent graph with its rotation system: rotation-adjacent
    loops are dropped, degree-2 vertices are smoothed out and the two ends
    of a bigon face are merged into one vertex, until nothing changes.
    Algebraic diagrams collapse to 0; a filled basic polyhedron keeps its
    vertex count.
    """
    if d.n == 0:
        return 0
    geo = require_knot(d)
    mate = dict(enumerate(geo.partner))
    rot = {c: [4 * c + s for s in range(4)] for c in range(d.n)}
    owner = {h: h >> 2 for h in mate}

    def kill_vertex_deg2(v):
        h1, h2 = rot.pop(v)
        del owner[h1], owner[h2]
        m1, m2 = mate.pop(h1), mate.pop(h2)
        if m1 == h2:
            return
        mate[m1] = m2
        mate[m2] = m1

    changed = True
    while changed:
        changed = False
        for v in list(rot):
            if v not in rot:
                continue
            r = rot[v]
            k = len(r)
            if k == 0:
                del rot[v]
                changed = True
                continue
            if k == 2:
                kill_vertex_deg2(v)
                changed = True
                continue
            # adjacent loop
            for i in range(k):
                h, g = r[i], r[(i + 1) % k]
                if mate.get(h) == g:
                    r.remove(h)
                    r.remove(g)
                    del mate[h], mate[g], owner[h], owner[g]
                    changed = True
                    break
            if changed:
                break
            # bigon: consecutive h, g at v whose mates are consecutive at w
            for i in range(k):
                h, g = r[i], r[(i + 1) % k]
                mh, mg = mate[h], mate[g]
                w = owner[mh]
                if w == v or owner[mg] != w:
                    continue
                rw = rot[w]
                # planar bigon: g follows h at v, so mh follows mg at w
                jg = rw.index(mg)
                if rw[(jg + 1) % len(rw)] != mh:
                    continue
                rest_v = [x for x in _cyclic_from(r, (i + 2) % k) if x not in (h, g)]
                rest_w = [x for x in _cyclic_from(rw, (jg + 2) % len(rw)) if x not in (mh, mg)]
                for x in (h, g, mh, mg):
                    del mate[x]
                    del owner[x]
                del rot[w]
                rot[v] = rest_v + rest_w
                for x in rest_w:
                    owner[x] = v
                changed = True
                break
            if changed:
                break
    return len(rot)


def _cyclic_from(lst, i):
    return lst[i:] + lst[:i]
