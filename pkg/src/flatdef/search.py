"""Saddle-connection enumeration up to a length bound.

The search develops the surface into the plane triangle by triangle.
Each state is a window (a sub-segment of a triangle edge) seen from the
source singularity at the origin; the open cone through the window is
narrowed as it propagates, and a branch is pruned once every point of
its window lies beyond the bound.  Every saddle connection of length
at most R is the straight segment from the origin to a triangle vertex
seen through some chain of windows, so the enumeration is complete.
"""

from __future__ import annotations

from .errors import InternalInvariantError
from .field import FieldScalar, Vec2
from .polygon import ear_clip
from .surface import TranslationSurface

__all__ = ["enumerate_saddle_connections", "enumerate_directions",
           "Triangulated"]


class Triangulated:
    """A triangulated copy of a surface sharing its vertex set.

    Triangles are (polygon, (i0, i1, i2)) vertex-index triples; edges are
    glued pairwise: original polygon edges through the surface gluing,
    ear-clip diagonals within each polygon.
    """

    def __init__(self, surface: TranslationSurface):
        self.surface = surface
        self.triangles = []   # list of (polygon, (i0, i1, i2))
        self.gluing = {}      # (tri, k) -> (tri, k)
        diag_sides = {}
        edge_sides = {}
        for p, poly in enumerate(surface.polygons):
            n = len(poly)
            tris = ear_clip(list(poly))
            for tri in tris:
                t_id = len(self.triangles)
                self.triangles.append((p, tri))
                for k in range(3):
                    a, b = tri[k], tri[(k + 1) % 3]
                    if b == (a + 1) % n:
                        edge_sides[(p, a)] = (t_id, k)
                    else:
                        key = (p, min(a, b), max(a, b))
                        if key in diag_sides:
                            other = diag_sides.pop(key)
                            self.gluing[(t_id, k)] = other
                            self.gluing[other] = (t_id, k)
                        else:
                            diag_sides[key] = (t_id, k)
        if diag_sides:
            raise InternalInvariantError("unmatched triangulation diagonals")
        for (p, e), side in edge_sides.items():
            q, f = surface.gluing[(p, e)]
            mate = edge_sides[(q, f)]
            self.gluing[side] = mate
            self.gluing[mate] = side

    def corners(self):
        for t_id in range(len(self.triangles)):
            for k in range(3):
                yield (t_id, k)

    def vertex_coords(self, t_id, k) -> Vec2:
        p, tri = self.triangles[t_id]
        return self.surface.vertices(p)[tri[k]]

    def vertex_class(self, t_id, k) -> int:
        p, tri = self.triangles[t_id]
        return self.surface.vertex_class_map()[(p, tri[k])]


def _seg_min_dist_sq_beyond(a: Vec2, b: Vec2, bound_sq: FieldScalar) -> bool:
    """True when every point of segment ab is strictly beyond the bound."""
    d = b - a
    dd = d.dot(d)
    t = -(a.dot(d))
    # closest point parameter clamped to [0, 1] (times dd to stay exact)
    if t.sign() <= 0:
        closest = a
    elif (t - dd).sign() >= 0:
        closest = b
    else:
        frac = t / dd
        closest = Vec2(a.x + d.x * frac, a.y + d.y * frac)
    return (closest.norm_sq() - bound_sq).sign() > 0


def _ray_segment_point(w: Vec2, a: Vec2, b: Vec2):
    """The intersection of ray R+ * w with segment ab, if any."""
    d = b - a
    denom = w.cross(d)
    if denom.sign() == 0:
        return None
    t = a.cross(d) / denom
    if t.sign() <= 0:
        return None
    s = a.cross(w) / denom
    if s.sign() < 0 or (s - 1).sign() > 0:
        return None
    return Vec2(a.x + d.x * s, a.y + d.y * s)


def _clip_window(w1: Vec2, w2: Vec2, a: Vec2, b: Vec2):
    """Clip segment ab to the open cone spanned ccw from ray w1 to ray w2.

    The cone is convex (angle < pi).  Returns (a', b') or None when the
    open intersection is empty.
    """
    in_a = w1.cross(a).sign() > 0 and a.cross(w2).sign() > 0
    in_b = w1.cross(b).sign() > 0 and b.cross(w2).sign() > 0
    lo, hi = a, b
    if not in_a:
        p1 = _ray_segment_point(w1, a, b)
        p2 = _ray_segment_point(w2, a, b)
        cands = [p for p in (p1, p2) if p is not None]
        if not cands:
            if not in_b:
                return None
            raise InternalInvariantError("window clip lost an endpoint")
        if len(cands) == 2:
            # both rays cross; pick the one nearer to a
            da = (cands[0] - a).norm_sq()
            db = (cands[1] - a).norm_sq()
            lo = cands[0] if (da - db).sign() < 0 else cands[1]
        else:
            lo = cands[0]
    if not in_b:
        p1 = _ray_segment_point(w1, a, b)
        p2 = _ray_segment_point(w2, a, b)
        cands = [p for p in (p1, p2) if p is not None]
        if not cands:
            return None
        if len(cands) == 2:
            db = (cands[0] - b).norm_sq()
            da = (cands[1] - b).norm_sq()
            hi = cands[0] if (db - da).sign() < 0 else cands[1]
        else:
            hi = cands[0]
    if (hi - lo).norm_sq().sign() == 0:
        return None
    return lo, hi


class FoundConnection:
    __slots__ = ("holonomy", "start_class", "end_class")

    def __init__(self, holonomy, start_class, end_class):
        self.holonomy = holonomy
        self.start_class = start_class
        self.end_class = end_class


def enumerate_saddle_connections(surface: TranslationSurface,
                                 bound_sq) -> list[FoundConnection]:
    """All saddle connections with |holonomy|^2 <= bound_sq.

    Connections are reported from both endpoints (with opposite
    holonomies); callers deduplicate as needed.
    """
    if not isinstance(bound_sq, FieldScalar):
        bound_sq = FieldScalar(bound_sq)
    surface.singularities()
    tri = Triangulated(surface)
    found = []
    for t_id, k in tri.corners():
        _search_from_corner(tri, t_id, k, bound_sq, found)
    return found


def _search_from_corner(tri, t_id, k, bound_sq, found):
    origin = tri.vertex_coords(t_id, k)
    start_class = tri.vertex_class(t_id, k)
    k1 = (k + 1) % 3
    k2 = (k + 2) % 3
    b = tri.vertex_coords(t_id, k1) - origin
    c = tri.vertex_coords(t_id, k2) - origin
    # the outgoing triangle edge is this corner's germ; the other corner
    # ray belongs to the neighboring corner and is recorded there
    if (b.norm_sq() - bound_sq).sign() <= 0:
        found.append(FoundConnection(b, start_class, tri.vertex_class(t_id, k1)))
    # state: (glued side, cone rays, full edge segment as the pushing
    # triangle traverses it, clipped window used only for pruning)
    stack = [(tri.gluing[(t_id, k1)], b, c, b, c, b, c)]
    guard = 0
    while stack:
        guard += 1
        if guard > 2_000_000:
            raise InternalInvariantError("saddle-connection search runaway")
        (nt, nk), w1, w2, seg_a, seg_b, win_a, win_b = stack.pop()
        if _seg_min_dist_sq_beyond(win_a, win_b, bound_sq):
            continue
        # develop triangle nt across its edge nk: its vertices nk and
        # nk+1 sit at seg_b and seg_a (opposite orientation)
        local = [tri.vertex_coords(nt, i) for i in range(3)]
        # translation tau with local[nk] + tau = seg_b
        tau = seg_b - local[nk]
        apex_idx = (nk + 2) % 3
        apex = local[apex_idx] + tau
        # far edges of nt: (nk+1) runs seg_a -> apex, (nk+2) runs apex -> seg_b
        if w1.cross(apex).sign() > 0 and apex.cross(w2).sign() > 0:
            if (apex.norm_sq() - bound_sq).sign() <= 0:
                found.append(FoundConnection(
                    apex, start_class, tri.vertex_class(nt, apex_idx)))
            splits = (
                ((nk + 1) % 3, (seg_a, apex), (w1, apex)),
                ((nk + 2) % 3, (apex, seg_b), (apex, w2)),
            )
        else:
            # apex outside the open cone: nothing splits
            splits = (
                ((nk + 1) % 3, (seg_a, apex), (w1, w2)),
                ((nk + 2) % 3, (apex, seg_b), (w1, w2)),
            )
        for edge_k, (ea, eb), (nw1, nw2) in splits:
            clipped = _clip_window(nw1, nw2, ea, eb)
            if clipped is not None:
                stack.append((tri.gluing[(nt, edge_k)], nw1, nw2,
                              ea, eb, clipped[0], clipped[1]))


def enumerate_directions(surface: TranslationSurface, bound_sq):
    """Directions of all saddle connections up to the squared bound.

    A superset of the directions of cylinders whose boundary connections
    are that short; deduplicated and canonically sorted.
    """
    from .cylinders import Direction
    dirs = {}
    for conn in enumerate_saddle_connections(surface, bound_sq):
        d = Direction(conn.holonomy)
        dirs.setdefault(d, conn)
    return sorted(dirs, key=lambda d: d.sort_key())
