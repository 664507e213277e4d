"""Exact planar predicates for polygons given by edge-vector lists.

Conventions used throughout the package:

* a polygon is a cyclic list of edge vectors summing to zero; vertex i
  sits at the partial sum of edges 0..i-1, anchored at the origin;
* boundaries are positively oriented (interior on the left);
* straight vertices (interior angle exactly pi) are allowed -- they are
  marked points sitting on an edge of the flat metric;
* corner i spans, counterclockwise, from the outgoing edge ray E_i to
  the reversed incoming ray -E_{i-1}; its angle lies in (0, 2*pi).
"""

from __future__ import annotations

from .field import FieldScalar, Vec2

__all__ = [
    "vertex_positions",
    "signed_area2",
    "cross_sign",
    "same_ray",
    "sector_contains",
    "corner_crosses_east",
    "check_simple",
    "segments_intersect_interior",
    "ear_clip",
]


def vertex_positions(edges) -> list[Vec2]:
    pos = []
    ctx = edges[0].ctx
    cur = Vec2(FieldScalar(0, 0, ctx), FieldScalar(0, 0, ctx))
    for e in edges:
        pos.append(cur)
        cur = cur + e
    return pos


def signed_area2(edges) -> FieldScalar:
    """Twice the signed area (shoelace over the anchored vertex chain)."""
    pos = vertex_positions(edges)
    n = len(edges)
    total = FieldScalar(0, 0, edges[0].ctx)
    for i in range(n):
        p = pos[i]
        q = pos[(i + 1) % n]
        total = total + (p.x * q.y - q.x * p.y)
    return total


def cross_sign(u: Vec2, v: Vec2) -> int:
    return u.cross(v).sign()


def same_ray(u: Vec2, v: Vec2) -> bool:
    """True when u and v point in exactly the same direction."""
    return cross_sign(u, v) == 0 and u.dot(v).sign() > 0


def sector_contains(start: Vec2, end: Vec2, w: Vec2, *,
                    include_start: bool = True, include_end: bool = False) -> bool:
    """Membership of direction w in the ccw sector from start to end.

    The sweep angle is taken in (0, 2*pi); start == end (as rays) is a
    full turn and contains everything.  Boundary membership follows the
    include_* flags.
    """
    if same_ray(w, start):
        return include_start
    if same_ray(w, end):
        return include_end
    if same_ray(start, end):
        return True  # full 2*pi sector
    s = cross_sign(start, end)
    if s > 0:
        return cross_sign(start, w) > 0 and cross_sign(w, end) > 0
    if s < 0:
        # complement of the ccw sector from end to start (angle < pi)
        return not (cross_sign(end, w) > 0 and cross_sign(w, start) > 0)
    # start and end anti-parallel: half-plane to the left of start
    return cross_sign(start, w) > 0


def _east(ctx) -> Vec2:
    return Vec2(FieldScalar(1, 0, ctx), FieldScalar(0, 0, ctx))


def corner_crosses_east(out_ray: Vec2, rev_in_ray: Vec2) -> int:
    """1 when the ccw sweep from out_ray to rev_in_ray crosses (1, 0).

    Crossing is counted on the half-open sector (out_ray, rev_in_ray],
    so summing over the corner cycle of a vertex class counts full turns
    exactly once each.
    """
    e = _east(out_ray.ctx)
    return 1 if sector_contains(out_ray, rev_in_ray, e,
                                include_start=False, include_end=True) else 0


def _on_segment(p: Vec2, a: Vec2, b: Vec2) -> bool:
    """p strictly inside the open segment (a, b); assumes p collinear with a,b."""
    d = b - a
    t = (p - a).dot(d)
    return t.sign() > 0 and t < d.dot(d)


def segments_intersect_interior(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool:
    """True when segments ab and cd share a point other than common endpoints.

    Endpoint-to-endpoint contact is ignored; endpoint-on-interior and
    interior crossings (including collinear overlap) count.
    """
    ab = b - a
    cd = d - c
    d1 = cross_sign(ab, c - a)
    d2 = cross_sign(ab, d - a)
    d3 = cross_sign(cd, a - c)
    d4 = cross_sign(cd, b - c)
    if d1 != d2 and d3 != d4 and d1 * d2 < 0 and d3 * d4 < 0:
        return True  # proper crossing
    # collinear / touching configurations
    for p, (u, v) in ((c, (a, b)), (d, (a, b)), (a, (c, d)), (b, (c, d))):
        if cross_sign(v - u, p - u) == 0 and _on_segment(p, u, v):
            return True
    if d1 == 0 and d2 == 0:
        # fully collinear: overlap iff neither is strictly separated
        # endpoints shared already excluded by _on_segment checks unless equal
        if (a == c and b == d) or (a == d and b == c):
            return True
    return False


def check_simple(edges) -> None:
    """Raise ValueError unless the edge list traces a simple ccw polygon.

    Straight vertices are fine; zero edges, fold-backs, repeated
    vertices, self-intersections and clockwise orientation are not.
    """
    n = len(edges)
    if n < 3:
        raise ValueError("polygon needs at least 3 edges")
    for e in edges:
        if e.is_zero():
            raise ValueError("zero-length edge")
    total = edges[0]
    for e in edges[1:]:
        total = total + e
    if not total.is_zero():
        raise ValueError("edge vectors do not close up")
    for i in range(n):
        prev = edges[(i - 1) % n]
        if same_ray(edges[i], -prev):
            raise ValueError(f"fold-back at vertex {i}")
    pos = vertex_positions(edges)
    for i in range(n):
        for j in range(i + 1, n):
            if pos[i] == pos[j]:
                raise ValueError(f"repeated vertex position at {i} and {j}")
    for i in range(n):
        a, b = pos[i], pos[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue  # adjacent edges share a vertex by construction
            c, d = pos[j], pos[(j + 1) % n]
            if segments_intersect_interior(a, b, c, d):
                raise ValueError(f"edges {i} and {j} intersect")
    if signed_area2(edges).sign() <= 0:
        raise ValueError("boundary is not positively oriented")


def _point_in_closed_triangle(p: Vec2, a: Vec2, b: Vec2, c: Vec2) -> bool:
    s1 = cross_sign(b - a, p - a)
    s2 = cross_sign(c - b, p - b)
    s3 = cross_sign(a - c, p - c)
    return s1 >= 0 and s2 >= 0 and s3 >= 0


def _diagonal_ok(pos, idx, k) -> bool:
    """Is the diagonal skipping remaining-polygon vertex idx[k] valid?

    Checks the ear triangle is ccw and empty and that the new diagonal
    leaves both endpoints strictly into the interior and crosses no
    remaining edge.  Robust against straight vertices.
    """
    m = len(idx)
    i0, i1, i2 = idx[(k - 1) % m], idx[k], idx[(k + 1) % m]
    a, b, c = pos[i0], pos[i1], pos[i2]
    if cross_sign(b - a, c - b) <= 0:
        return False  # reflex or straight corner: not an ear tip
    for j in idx:
        if j in (i0, i1, i2):
            continue
        if _point_in_closed_triangle(pos[j], a, b, c):
            return False
    # the diagonal a->c must enter the open interior sector at both ends
    prev_a = pos[idx[(k - 2) % m]]
    next_c = pos[idx[(k + 2) % m]]
    if not sector_contains(b - a, prev_a - a, c - a,
                           include_start=False, include_end=False):
        return False
    if not sector_contains(next_c - c, b - c, a - c,
                           include_start=False, include_end=False):
        return False
    for t in range(m):
        u, v = idx[t], idx[(t + 1) % m]
        if u in (i0, i2) or v in (i0, i2):
            continue
        if segments_intersect_interior(a, c, pos[u], pos[v]):
            return False
    return True


def ear_clip(edges) -> list[tuple[int, int, int]]:
    """Triangulate a simple ccw polygon; returns vertex-index triples.

    Straight vertices are tolerated.  O(n^4) worst case, fine at desk
    scale.
    """
    n = len(edges)
    pos = vertex_positions(edges)
    idx = list(range(n))
    tris = []
    while len(idx) > 3:
        for k in range(len(idx)):
            if _diagonal_ok(pos, idx, k):
                m = len(idx)
                tris.append((idx[(k - 1) % m], idx[k], idx[(k + 1) % m]))
                idx.pop(k)
                break
        else:
            raise RuntimeError("no ear found; polygon not simple?")
    a, b, c = (pos[i] for i in idx)
    if cross_sign(b - a, c - b) <= 0:
        raise RuntimeError("degenerate final triangle in ear clipping")
    tris.append((idx[0], idx[1], idx[2]))
    return tris
