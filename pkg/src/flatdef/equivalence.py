"""Translation equivalence via canonical Delaunay cell decompositions.

Two surfaces are translation equivalent when a cut-and-paste respecting
translations matches them.  Both are retriangulated to Delaunay by exact
incircle flips; gluing co-circular neighbors yields the canonical
Delaunay cell complex, which is then matched cell by cell over all
anchors (exponential worst case, fine at desk scale).
"""

from __future__ import annotations

from .errors import InternalInvariantError
from .field import FieldScalar, Vec2
from .polygon import ear_clip
from .surface import TranslationSurface

__all__ = ["translation_equivalent", "delaunay_cells"]

MAX_FLIPS = 100_000


class _Tri:
    """Triangulated surface with edge-vector triangles and gluings."""

    def __init__(self, surface: TranslationSurface):
        self.edges = []    # edges[t] = [Vec2, Vec2, Vec2] summing to zero
        self.gluing = {}
        diag = {}
        sides = {}
        for p, poly in enumerate(surface.polygons):
            n = len(poly)
            verts = surface.vertices(p)
            for (i0, i1, i2) in ear_clip(list(poly)):
                t_id = len(self.edges)
                self.edges.append([verts[i1] - verts[i0],
                                   verts[i2] - verts[i1],
                                   verts[i0] - verts[i2]])
                for k, (a, b) in enumerate(((i0, i1), (i1, i2), (i2, i0))):
                    if b == (a + 1) % n:
                        sides[(p, a)] = (t_id, k)
                    else:
                        key = (p, min(a, b), max(a, b))
                        if key in diag:
                            other = diag.pop(key)
                            self.gluing[(t_id, k)] = other
                            self.gluing[other] = (t_id, k)
                        else:
                            diag[key] = (t_id, k)
        if diag:
            raise InternalInvariantError("unmatched diagonals")
        for (p, e), side in sides.items():
            mate = sides[surface.gluing[(p, e)]]
            self.gluing[side] = mate
            self.gluing[mate] = side

    def hinge(self, t1, k1):
        """Develop the two triangles sharing edge (t1, k1) into the plane.

        Returns (P, Q, apex1, apex2): the shared edge runs P -> Q with
        apex1 the third vertex of t1 (left of PQ) and apex2 the partner
        triangle's apex (right of PQ).  The partner is always a distinct
        triangle: two sides of one triangle cannot carry opposite
        vectors without degenerating the third.
        """
        t2, k2 = self.gluing[(t1, k1)]
        if t2 == t1:
            raise InternalInvariantError("self-glued triangle side")
        e = self.edges[t1][k1]
        zero = FieldScalar(0, 0, e.ctx)
        p = Vec2(zero, zero)
        q = e
        u = self.edges[t1][(k1 + 1) % 3]
        apex1 = Vec2(e.x + u.x, e.y + u.y)
        # t2's side k2 carries -e, its tail placed at Q, so its vertex
        # k2+1 lands on P and the apex follows t2's next edge from P
        apex2 = self.edges[t2][(k2 + 1) % 3]
        return p, q, apex1, apex2

    def flip(self, t1, k1):
        """Replace the shared edge of the hinge with the other diagonal.

        Old: t1 = (P->Q, Q->A1, A1->P), t2 = (Q->P, P->A2, A2->Q).
        New: t1 = (A2->A1, A1->P, P->A2), t2 = (A1->A2, A2->Q, Q->A1).
        """
        t2, k2 = self.gluing[(t1, k1)]
        p, q, a1, a2 = self.hinge(t1, k1)
        d = Vec2(a1.x - a2.x, a1.y - a2.y)
        n1 = [d, Vec2(p.x - a1.x, p.y - a1.y), Vec2(a2.x - p.x, a2.y - p.y)]
        n2 = [Vec2(-d.x, -d.y), Vec2(q.x - a2.x, q.y - a2.y),
              Vec2(a1.x - q.x, a1.y - q.y)]
        nb = {
            "qa1": self.gluing[(t1, (k1 + 1) % 3)],
            "a1p": self.gluing[(t1, (k1 + 2) % 3)],
            "pa2": self.gluing[(t2, (k2 + 1) % 3)],
            "a2q": self.gluing[(t2, (k2 + 2) % 3)],
        }
        # outside mates referring to old quad sides must be renamed
        rename = {
            (t1, (k1 + 1) % 3): (t2, 2),
            (t1, (k1 + 2) % 3): (t1, 1),
            (t2, (k2 + 1) % 3): (t1, 2),
            (t2, (k2 + 2) % 3): (t2, 1),
        }
        self.edges[t1] = n1
        self.edges[t2] = n2
        pairs = {
            (t1, 0): (t2, 0),
            (t1, 1): rename.get(nb["a1p"], nb["a1p"]),
            (t1, 2): rename.get(nb["pa2"], nb["pa2"]),
            (t2, 1): rename.get(nb["a2q"], nb["a2q"]),
            (t2, 2): rename.get(nb["qa1"], nb["qa1"]),
        }
        for side, mate in pairs.items():
            self.gluing[side] = mate
            self.gluing[mate] = side


def _incircle(p, q, r, s) -> int:
    """Sign of the incircle determinant for ccw triangle pqr and query s;
    positive when s is strictly inside the circumcircle."""
    rows = []
    for v in (p, q, r):
        dx = v.x - s.x
        dy = v.y - s.y
        rows.append((dx, dy, dx * dx + dy * dy))
    det = (rows[0][0] * (rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1])
           - rows[0][1] * (rows[1][0] * rows[2][2] - rows[1][2] * rows[2][0])
           + rows[0][2] * (rows[1][0] * rows[2][1] - rows[1][1] * rows[2][0]))
    return det.sign()


def _delaunay(tri: _Tri):
    """Flip until every hinge satisfies the incircle condition."""
    flips = 0
    dirty = True
    while dirty:
        dirty = False
        for t1 in range(len(tri.edges)):
            for k1 in range(3):
                if (t1, k1) > tri.gluing[(t1, k1)]:
                    continue
                p, q, a1, a2 = tri.hinge(t1, k1)
                if _incircle(p, q, a1, a2) > 0:
                    # flippability: the quad must be strictly convex,
                    # which incircle violation guarantees for a hinge
                    tri.flip(t1, k1)
                    flips += 1
                    if flips > MAX_FLIPS:
                        raise InternalInvariantError(
                            "Delaunay flipping did not terminate")
                    dirty = True
    return tri


def delaunay_cells(surface: TranslationSurface):
    """The canonical Delaunay cell complex as (cells, gluing).

    Cells are polygons given by ccw edge-vector tuples; co-circular
    triangles are merged, so the complex does not depend on flip order
    or on the input presentation.  The gluing pairs (cell, edge) slots.
    """
    tri = _delaunay(_Tri(surface))
    n = len(tri.edges)
    # mark non-essential edges: hinge with all four points co-circular
    essential = {}
    for t1 in range(n):
        for k1 in range(3):
            p, q, a1, a2 = tri.hinge(t1, k1)
            essential[(t1, k1)] = _incircle(p, q, a1, a2) != 0
    # merge triangles across non-essential edges into cells: walk each
    # cell boundary along essential sides
    side_seen = set()
    cells = []
    cell_gluing = {}
    slot_of = {}

    def next_essential(side):
        # rotate within the cell: step to the next boundary side ccw
        t, k = side
        nxt = (t, (k + 1) % 3)
        while not essential[nxt]:
            t2, k2 = tri.gluing[nxt]
            nxt = (t2, (k2 + 1) % 3)
        return nxt

    for t1 in range(n):
        for k1 in range(3):
            if not essential[(t1, k1)] or (t1, k1) in side_seen:
                continue
            loop = []
            side = (t1, k1)
            guard = 0
            while True:
                guard += 1
                if guard > 3 * n + 3:
                    raise InternalInvariantError("cell walk did not close")
                loop.append(side)
                side_seen.add(side)
                side = next_essential(side)
                if side == (t1, k1):
                    break
            cell_id = len(cells)
            cells.append(tuple(tri.edges[t][k] for t, k in loop))
            for slot, s in enumerate(loop):
                slot_of[s] = (cell_id, slot)
    for s, (cell_id, slot) in slot_of.items():
        mate = tri.gluing[s]
        cell_gluing[(cell_id, slot)] = slot_of[mate]
    return cells, cell_gluing


def _match_from(cells1, gl1, cells2, gl2, c2, rot) -> bool:
    """Try to extend cell 0 of surface 1 -> (cell c2, rotation rot)."""
    n0 = len(cells1[0])
    if len(cells2[c2]) != n0:
        return False
    for k in range(n0):
        if cells1[0][k] != cells2[c2][(k + rot) % len(cells2[c2])]:
            return False
    assignment = {0: (c2, rot)}
    stack = [0]
    while stack:
        a = stack.pop()
        b, r = assignment[a]
        na = len(cells1[a])
        for k in range(na):
            (a2, k2) = gl1[(a, k)]
            (b2, j2) = gl2[(b, (k + r) % na)]
            r2 = (j2 - k2) % len(cells1[a2]) if len(cells1[a2]) else 0
            if len(cells2[b2]) != len(cells1[a2]):
                return False
            if a2 in assignment:
                if assignment[a2] != (b2, r2):
                    return False
                continue
            for k3 in range(len(cells1[a2])):
                if cells1[a2][k3] != cells2[b2][(k3 + r2) % len(cells2[b2])]:
                    return False
            assignment[a2] = (b2, r2)
            stack.append(a2)
    return len(assignment) == len(cells1)


def translation_equivalent(m1: TranslationSurface,
                           m2: TranslationSurface) -> bool:
    """Exact translation equivalence (cut-and-paste isomorphism).

    Fast invariants first (area, genus, signature), then canonical
    Delaunay cells and exhaustive anchored matching.
    """
    d1 = m1.singularities()
    d2 = m2.singularities()
    if d1.genus != d2.genus or d1.signature != d2.signature:
        return False
    if not (m1.area2() - m2.area2()).is_zero():
        return False
    cells1, gl1 = delaunay_cells(m1)
    cells2, gl2 = delaunay_cells(m2)
    if len(cells1) != len(cells2):
        return False
    if sorted(len(c) for c in cells1) != sorted(len(c) for c in cells2):
        return False
    for c2 in range(len(cells2)):
        for rot in range(len(cells2[c2])):
            if _match_from(cells1, gl1, cells2, gl2, c2, rot):
                return True
    return False
