"""Reidemeister moves on PD diagrams, used to build invariance test corpora.

Moves operate on the raw form (crossing ends ``4 * c + s`` with the
under-strand on slots 0 and 2, plus a symmetric link table) and the result
is relabelled with :func:`build_pd`.

Locations:

* ``R1+`` / ``R1-``: ``(end, over_first)``. A kink is added on the arc
  leaving crossing end ``end``; ``over_first`` picks whether the strand
  meets the new crossing first on the over- or the under-strand. On the
  0-crossing unknot ``end`` is ignored.
* ``R1+`` / ``R1-`` inverse: ``(crossing,)`` of a kink with that sign.
* ``R2``: ``(end1, end2, over)`` where both darts ``end -> partner`` have
  the same face on their right; the first strand is pushed across the
  second, over it when ``over`` is true.
* ``R2`` inverse: ``(c1, c2)``, two crossings bounding a bigon face where
  one strand stays over.
* ``R3``: ``(face,)``, a triangular face that is not cyclically layered.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .pd import DiagramError, PlanarDiagram, build_pd, raw_links, require_knot

__all__ = [
    "ReidemeisterMove",
    "MoveError",
    "apply_reidemeister",
    "applicable_moves",
    "random_move",
    "scramble",
    "remove_crossings",
]

KINDS = ("R1+", "R1-", "R2", "R3")


class MoveError(DiagramError):
    """The move is not applicable at the given location."""


@dataclass(frozen=True)
class ReidemeisterMove:
    kind: str
    location: tuple
    inverse: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown move kind {self.kind!r}")
        if self.kind == "R3" and self.inverse:
            raise ValueError("R3 is its own inverse")


def remove_crossings(n: int, link: list[int], removed: set[int]):
    """Delete crossings, letting strands run straight through them.

    Returns ``(n', link', loops)`` where ``loops`` counts strands that closed
    up without meeting a surviving crossing.
    """
    keep = [c for c in range(n) if c not in removed]
    new_index = {c: i for i, c in enumerate(keep)}
    out = [0] * (4 * len(keep))

    def walk(e):
        # from surviving end e follow its arc through removed crossings
        f = link[e]
        while (f >> 2) in removed:
            f = link[f ^ 2]
        return f

    for c in keep:
        for s in range(4):
            e = 4 * c + s
            f = walk(e)
            out[4 * new_index[c] + s] = 4 * new_index[f >> 2] + (f & 3)
    loops = 0
    seen = set()
    for c in removed:
        for s in range(4):
            e = 4 * c + s
            if e in seen:
                continue
            # trace the strand through e; it is a loop iff it meets no survivor
            path = []
            f = e
            closed = True
            while True:
                path.append(f)
                seen.add(f)
                seen.add(f ^ 2)
                g = link[f ^ 2]
                if (g >> 2) not in removed:
                    closed = False
                    break
                if g == e or g in seen:
                    break
                f = g
            if closed:
                loops += 1
    return len(keep), out, loops


def _finish(n: int, link: list[int], start: int = 0) -> PlanarDiagram:
    if n == 0:
        return PlanarDiagram(())
    return build_pd(n, link, start=start)


def _r1_add(d: PlanarDiagram, sign: int, over_first: bool, end: int) -> PlanarDiagram:
    n = d.n
    c = 4 * n
    # (entry slot, loop slots, exit slot) along the strand direction
    if sign > 0:
        path = (3, (1, 0), 2) if over_first else (0, (2, 3), 1)
    else:
        path = (1, (3, 0), 2) if over_first else (0, (2, 1), 3)
    a, (l1, l2), b = path
    if n == 0:
        link = [0] * 4
        link[c + l1], link[c + l2] = c + l2, c + l1
        link[c + a], link[c + b] = c + b, c + a
        return _finish(1, link)
    geo = require_knot(d)
    link = list(geo.partner) + [0] * 4
    # orient the arc at ``end`` along the knot: u leaves, v enters
    if geo.is_in[end]:
        v = end
        u = geo.partner[end]
    else:
        u = end
        v = geo.partner[end]
    link[u], link[c + a] = c + a, u
    link[c + l1], link[c + l2] = c + l2, c + l1
    link[c + b], link[v] = v, c + b
    return _finish(n + 1, link)


def _r1_remove(d: PlanarDiagram, sign: int, c: int) -> PlanarDiagram:
    geo = require_knot(d)
    if not (0 <= c < d.n):
        raise MoveError("crossing out of range")
    p = geo.partner
    kink = any(p[4 * c + s] == 4 * c + ((s + 1) & 3) for s in range(4))
    if not kink:
        raise MoveError(f"crossing {c} is not a kink")
    if geo.signs[c] != sign:
        raise MoveError(f"crossing {c} has sign {geo.signs[c]}")
    n, link, _ = remove_crossings(d.n, list(p), {c})
    return _finish(n, link)


def _r2_add(d: PlanarDiagram, e1: int, e2: int, over: bool) -> PlanarDiagram:
    geo = require_knot(d)
    n = d.n
    if n == 0:
        raise MoveError("R2 needs two arcs")
    p = geo.partner
    if e1 == e2 or p[e1] == e2:
        raise MoveError("R2 needs two distinct darts")
    if geo.face_of[e1] != geo.face_of[e2]:
        raise MoveError("darts do not share a face")
    u1, v1, u2, v2 = e1, p[e1], e2, p[e2]
    link = list(p) + [0] * 8
    c1, c2 = 4 * n, 4 * n + 4

    def join(x, y):
        link[x] = y
        link[y] = x

    if over:
        # c1 = (d2_in, d1_in, d2_out, d1_out), c2 = (d2_in, d1_out, d2_out, d1_in)
        join(u1, c1 + 1)
        join(c1 + 3, c2 + 3)
        join(c2 + 1, v1)
        join(u2, c2 + 0)
        join(c2 + 2, c1 + 0)
        join(c1 + 2, v2)
    else:
        # c1 = (d1_in, d2_out, d1_out, d2_in), c2 = (d1_in, d2_in, d1_out, d2_out)
        join(u1, c1 + 0)
        join(c1 + 2, c2 + 0)
        join(c2 + 2, v1)
        join(u2, c2 + 1)
        join(c2 + 3, c1 + 3)
        join(c1 + 1, v2)
    return _finish(n + 2, link)


def _r2_pair_ok(geo, c1: int, c2: int) -> bool:
    if c1 == c2:
        return False
    p = geo.partner
    for face in geo.faces:
        if len(face) != 2:
            continue
        ends = {face[0] >> 2, face[1] >> 2}
        if ends != {c1, c2}:
            continue
        # both darts of the bigon join slots of equal parity
        if all(((e ^ p[e]) & 1) == 0 for e in face):
            return True
    return False


def _r2_remove(d: PlanarDiagram, c1: int, c2: int) -> PlanarDiagram:
    geo = require_knot(d)
    if not (0 <= c1 < d.n and 0 <= c2 < d.n) or not _r2_pair_ok(geo, c1, c2):
        raise MoveError(f"crossings {c1}, {c2} are not a cancelling pair")
    n, link, _ = remove_crossings(d.n, list(geo.partner), {c1, c2})
    return _finish(n, link)


def _triangle(geo, face: int):
    """Return the three triangle edges as (X, a, Y, b) or raise."""
    if not (0 <= face < len(geo.faces)):
        raise MoveError("face out of range")
    darts = geo.faces[face]
    if len(darts) != 3:
        raise MoveError("R3 needs a triangular face")
    cs = {e >> 2 for e in darts}
    if len(cs) != 3:
        raise MoveError("triangle must have three distinct crossings")
    p = geo.partner
    edges = [(e >> 2, e & 3, p[e] >> 2, p[e] & 3) for e in darts]
    levels = [((a & 1), (b & 1)) for _, a, _, b in edges]
    if not any(x == 1 and y == 1 for x, y in levels):
        raise MoveError("triangle is cyclically layered")
    return edges


def _r3(d: PlanarDiagram, face: int) -> PlanarDiagram:
    geo = require_knot(d)
    edges = _triangle(geo, face)
    old = geo.partner
    link = list(old)
    # every strand now meets its two triangle crossings in the opposite
    # order: what hung off the outer end at X now attaches to the old inner
    # end at Y, and the old outer ends become the new triangle edges
    moved = {}
    for X, a, Y, b in edges:
        xa, yb = 4 * X + a, 4 * Y + b
        moved[xa ^ 2] = yb
        moved[yb ^ 2] = xa
    for o, target in moved.items():
        nb = old[o]
        nb = moved.get(nb, nb)
        link[target] = nb
        link[nb] = target
    for X, a, Y, b in edges:
        xa, yb = 4 * X + a, 4 * Y + b
        link[xa ^ 2] = yb ^ 2
        link[yb ^ 2] = xa ^ 2
    return _finish(d.n, link)


def apply_reidemeister(d: PlanarDiagram, m: ReidemeisterMove) -> PlanarDiagram:
    try:
        if m.kind in ("R1+", "R1-"):
            sign = 1 if m.kind == "R1+" else -1
            if m.inverse:
                (c,) = m.location
                return _r1_remove(d, sign, c)
            end, over_first = m.location
            if d.n and not (0 <= end < 4 * d.n):
                raise MoveError("end out of range")
            return _r1_add(d, sign, bool(over_first), end)
        if m.kind == "R2":
            if m.inverse:
                c1, c2 = m.location
                return _r2_remove(d, c1, c2)
            e1, e2, over = m.location
            if not (0 <= e1 < 4 * d.n and 0 <= e2 < 4 * d.n):
                raise MoveError("end out of range")
            return _r2_add(d, e1, e2, bool(over))
        (face,) = m.location
        return _r3(d, face)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, MoveError):
            raise
        raise MoveError(str(exc)) from exc


def applicable_moves(d: PlanarDiagram, kinds=("R1", "R2", "R3"), grow=True, shrink=True):
    """List every move applicable to ``d`` (R2 additions sampled per face pair)."""
    moves = []
    n = d.n
    if n == 0:
        if grow and "R1" in kinds:
            for k in ("R1+", "R1-"):
                for of in (False, True):
                    moves.append(ReidemeisterMove(k, (0, of)))
        return moves
    geo = require_knot(d)
    p = geo.partner
    if "R1" in kinds:
        if grow:
            for e in range(4 * n):
                if geo.is_in[e]:
                    continue
                for k in ("R1+", "R1-"):
                    for of in (False, True):
                        moves.append(ReidemeisterMove(k, (e, of)))
        if shrink:
            for c in range(n):
                if any(p[4 * c + s] == 4 * c + ((s + 1) & 3) for s in range(4)):
                    k = "R1+" if geo.signs[c] > 0 else "R1-"
                    moves.append(ReidemeisterMove(k, (c,), inverse=True))
    if "R2" in kinds:
        if grow:
            for face in geo.faces:
                for i, e1 in enumerate(face):
                    for e2 in face:
                        if e1 != e2 and p[e1] != e2:
                            for over in (False, True):
                                moves.append(ReidemeisterMove("R2", (e1, e2, over)))
        if shrink:
            for face in geo.faces:
                if len(face) == 2:
                    c1, c2 = face[0] >> 2, face[1] >> 2
                    if _r2_pair_ok(geo, c1, c2):
                        moves.append(ReidemeisterMove("R2", (c1, c2), inverse=True))
    if "R3" in kinds:
        for f, face in enumerate(geo.faces):
            try:
                _triangle(geo, f)
            except MoveError:
                continue
            moves.append(ReidemeisterMove("R3", (f,)))
    return moves


def random_move(d: PlanarDiagram, rng: random.Random, max_crossings: int | None = None) -> ReidemeisterMove:
    """Pick a random applicable move, never exceeding ``max_crossings``.

    Raises MoveError when no move fits (a reduced diagram at the cap).
    """
    kinds = ["R1", "R2", "R3"]
    rng.shuffle(kinds)
    for kind in kinds:
        grow = True
        if max_crossings is not None:
            room = max_crossings - d.n
            if (kind == "R1" and room < 1) or (kind == "R2" and room < 2):
                grow = False
        moves = applicable_moves(d, (kind,), grow=grow, shrink=True)
        if moves:
            return rng.choice(moves)
    raise MoveError("no Reidemeister move fits within the crossing limit")


def scramble(d: PlanarDiagram, rng: random.Random, steps: int, max_crossings: int = 25):
    """Apply ``steps`` random moves; returns the final diagram and the moves."""
    history = []
    for _ in range(steps):
        m = random_move(d, rng, max_crossings)
        d = apply_reidemeister(d, m)
        history.append(m)
    return d, history
