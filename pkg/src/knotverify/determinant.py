"""Knot determinant from a Goeritz matrix, with the Jones value as a cross-check."""

from __future__ import annotations

from dataclasses import dataclass

from .bracket import jones_f
from .pd import PlanarDiagram, require_knot

__all__ = [
    "GoeritzData",
    "goeritz",
    "bareiss_det",
    "determinant_goeritz",
    "determinant_via_jones",
    "passes_det_filter",
]


@dataclass(frozen=True)
class GoeritzData:
    shaded: tuple[bool, ...]  # per face id
    shaded_faces: tuple[int, ...]
    matrix: tuple[tuple[int, ...], ...]  # full matrix over shaded faces


def _corner_face(geo, c: int, s: int) -> int:
    # the corner between slots s and s+1 lies in the face of the dart leaving slot s+1
    return geo.face_of[4 * c + ((s + 1) & 3)]


def goeritz(d: PlanarDiagram) -> GoeritzData:
    geo = require_knot(d)
    nf = len(geo.faces)
    if d.n == 0:
        return GoeritzData((False,), (), ())
    # two-colour the faces; faces on either side of an arc differ
    color = [-1] * nf
    e1 = next(e for e in geo.passes if geo.labels[e] == 1)
    start = geo.face_of[geo.partner[e1]]  # right of arc 1 when travelling along it
    color[start] = 0
    stack = [start]
    while stack:
        f = stack.pop()
        for e in geo.faces[f]:
            g = geo.face_of[geo.partner[e]]
            if color[g] < 0:
                color[g] = 1 - color[f]
                stack.append(g)
            elif color[g] == color[f]:
                raise ValueError("faces do not admit a checkerboard colouring")
    shaded = [c == 1 for c in color]
    idx = {}
    for f in range(nf):
        if shaded[f]:
            idx[f] = len(idx)
    m = len(idx)
    g = [[0] * m for _ in range(m)]
    for c in range(d.n):
        # shaded corners are either (1,2)&(3,0) or (0,1)&(2,3)
        if shaded[_corner_face(geo, c, 1)]:
            eta, f1, f2 = 1, _corner_face(geo, c, 1), _corner_face(geo, c, 3)
        else:
            eta, f1, f2 = -1, _corner_face(geo, c, 0), _corner_face(geo, c, 2)
        if f1 == f2:
            continue
        i, j = idx[f1], idx[f2]
        g[i][j] -= eta
        g[j][i] -= eta
    for i in range(m):
        g[i][i] = -sum(g[i][j] for j in range(m) if j != i)
    return GoeritzData(tuple(shaded), tuple(idx), tuple(tuple(r) for r in g))


def bareiss_det(matrix) -> int:
    """Exact determinant by fraction-free elimination."""
    a = [list(r) for r in matrix]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k]:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[-1][-1]


def determinant_goeritz(d: PlanarDiagram) -> int:
    data = goeritz(d)
    m = data.matrix
    if len(m) <= 1:
        return 1
    minor = [row[1:] for row in m[1:]]
    return abs(bareiss_det(minor))


def determinant_via_jones(d: PlanarDiagram) -> int:
    """|V(-1)|: with t = A^-4, a term A^e of f contributes (-1)^(e/4)."""
    f = jones_f(d)
    total = 0
    for e, c in f.items():
        if e % 4:
            raise ValueError("f-polynomial exponent not divisible by 4")
        total += c if (e // 4) % 2 == 0 else -c
    return abs(total)


def passes_det_filter(d: PlanarDiagram) -> bool:
    return determinant_goeritz(d) == 1
