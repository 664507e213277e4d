"""Cylinder deformations in period coordinates.

The twist cocycle of a cylinder takes, on each homology class, the
signed count of crossings with the half-height core circle; scaled by
the heights and summed over a cylinder set it is the derivative of the
cylinder shear.  Shear and stretch themselves are geometric rebuilds:
the surface is recut along exactly those cylinder boundaries where the
deformed and undeformed regions meet, and the matrix acts piecewise.
Linearity of the rebuild in period coordinates is checked exactly.
"""

from __future__ import annotations

from .cylinders import Decomposition, _build_cut_pieces, _Chord, decompose
from .errors import (DeformationTooLarge, DegenerateCylinder,
                     InternalInvariantError)
from .field import FieldScalar, Mat2, Vec2
from .homology import Cocycle, HomologyFrame
from .linalg import ComplexScalar, rational_relation_lattice, row_reduce
from .surface import TranslationSurface

__all__ = ["intersection_cocycle", "eta", "eta_normalized", "shear",
           "stretch", "twist_space", "cylinder_preserving_space",
           "torus_closure", "verify_linearity", "deform_from_periods",
           "TorusClosure"]


def _cylinder_subset(decomposition, ids):
    if ids is None:
        return list(decomposition.cylinders)
    chosen = []
    for cyl in decomposition.cylinders:
        if cyl.cyl_id in ids:
            chosen.append(cyl)
    if len(chosen) != len(set(ids)):
        raise ValueError(f"unknown cylinder ids in {sorted(set(ids))}")
    return chosen


def intersection_cocycle(surface: TranslationSurface, frame: HomologyFrame,
                         decomposition: Decomposition, cyl_id: int) -> Cocycle:
    """The integer cocycle counting crossings with one core circle.

    Zero on every class realized disjointly from the cylinder's interior;
    this is checked against the boundary saddle connections of the
    decomposition.
    """
    cyl = _cylinder_subset(decomposition, [cyl_id])[0]
    values = []
    for chain in frame.basis_chains:
        values.append(sum(c * x for c, x in zip(chain, cyl.core_crossings)))
    cocycle = frame.cocycle([ComplexScalar(v) for v in values])
    for sc in decomposition.saddle_connections:
        coords = frame.coords_of_path(sc.chords)
        if not frame.evaluate(cocycle, coords).is_zero():
            raise InternalInvariantError(
                "twist cocycle does not vanish on a boundary saddle connection")
    return cocycle


def eta_normalized(frame: HomologyFrame, decomposition: Decomposition,
                   ids=None) -> Cocycle:
    """Sum of height-weighted core-crossing cocycles, in normalized frame
    coordinates (real values; the shear derivative on the normalized
    surface)."""
    chosen = _cylinder_subset(decomposition, ids)
    ctx = decomposition.normalized.ctx
    totals = []
    for chain in frame.basis_chains:
        acc = FieldScalar(0, 0, ctx)
        for cyl in chosen:
            count = sum(c * x for c, x in zip(chain, cyl.core_crossings))
            if count:
                acc = acc + cyl.height * count
        totals.append(acc)
    return frame.cocycle([ComplexScalar(v) for v in totals])


def eta(surface: TranslationSurface, frame: HomologyFrame,
        decomposition: Decomposition, ids=None) -> Cocycle:
    """The shear derivative for the decomposition's own direction.

    Transported through the inverse normalizing matrix, so adding
    t * eta to the periods of the original surface is exactly the
    direction-v cylinder shear by t.
    """
    base = eta_normalized(frame, decomposition, ids)
    factor = decomposition.transport_factor()
    return base.scale(factor)


def twist_space(surface: TranslationSurface, frame: HomologyFrame,
                decomposition: Decomposition):
    """Exact basis of the span of the per-cylinder shear cocycles.

    Returns (basis, dim); the cocycles of distinct cylinders are
    independent (their cross classes are disjoint), which is verified.
    """
    if not decomposition.is_periodic:
        raise ValueError("twist space needs a Periodic decomposition")
    gens = [eta_normalized(frame, decomposition, [cyl.cyl_id])
            for cyl in decomposition.cylinders]
    rows = [[v.re for v in gen.values] for gen in gens]
    rank, _, _ = row_reduce(rows, ncols=frame.m)
    if rank != len(gens):
        raise InternalInvariantError(
            "per-cylinder shear cocycles are not independent")
    return gens, rank


def cylinder_preserving_space(surface: TranslationSurface,
                              frame: HomologyFrame,
                              decomposition: Decomposition):
    """Real cocycles vanishing on every core class, as frame cocycles.

    Computed relative to the stratum (the full dual); always contains
    the twist space, which is checked.
    """
    if not decomposition.is_periodic:
        raise ValueError("cylinder-preserving space needs a Periodic "
                         "decomposition")
    ctx = surface.ctx
    rows = [[FieldScalar(c, 0, ctx) for c in cyl.core_coords]
            for cyl in decomposition.cylinders]
    rank, _, null = row_reduce(rows, ncols=frame.m)
    basis = [frame.cocycle([ComplexScalar(x) for x in vec]) for vec in null]
    twist_gens, _ = twist_space(surface, frame, decomposition)
    for cyl in decomposition.cylinders:
        for gen in twist_gens:
            val = frame.evaluate(gen, cyl.core_coords)
            if not val.is_zero():
                raise InternalInvariantError(
                    "twist cocycle does not vanish on a core class")
    return basis, len(basis)


class TorusClosure:
    """Closure data of a multi-parameter cylinder twist."""

    __slots__ = ("dimension", "allowed_basis", "relation_basis",
                 "rational_solution", "cocycle")

    def __init__(self, dimension, allowed_basis, relation_basis,
                 rational_solution, cocycle):
        self.dimension = dimension
        self.allowed_basis = allowed_basis
        self.relation_basis = relation_basis
        self.rational_solution = rational_solution
        self.cocycle = cocycle


def torus_closure(moduli, frame: HomologyFrame | None = None,
                  decomposition: Decomposition | None = None) -> TorusClosure:
    """Closure of the twist flow with the given cylinder moduli.

    The allowed twist parameters A are the rational vectors satisfying
    every homogeneous rational relation the moduli do; the closure
    dimension is dim A.  A nonzero rational solution is always returned;
    when a decomposition is supplied, so is the induced rational tangent
    cocycle sum_i t_i c_i I_i.
    """
    vals = []
    for m in moduli:
        if not isinstance(m, FieldScalar):
            m = FieldScalar(m)
        if m.sign() <= 0:
            raise ValueError("moduli must be positive")
        vals.append(m)
    relations, allowed = rational_relation_lattice(vals)
    if not allowed:
        raise InternalInvariantError("positive moduli admit no twist at all")
    t = list(allowed[0])
    cocycle = None
    if decomposition is not None:
        if frame is None:
            frame = decomposition.frame
        if len(moduli) != len(decomposition.cylinders):
            raise ValueError("moduli do not match the decomposition")
        ctx = decomposition.normalized.ctx
        totals = []
        for chain in frame.basis_chains:
            acc = FieldScalar(0, 0, ctx)
            for ti, cyl in zip(t, decomposition.cylinders):
                count = sum(c * x for c, x in zip(chain, cyl.core_crossings))
                if count:
                    acc = acc + cyl.circumference * FieldScalar(ti) * count
            totals.append(acc)
        cocycle = frame.cocycle([ComplexScalar(v) for v in totals])
    return TorusClosure(len(allowed), [list(a) for a in allowed],
                        [list(r) for r in relations], t, cocycle)


# -- geometric shear and stretch -------------------------------------------


def _piecewise_rebuild(decomposition: Decomposition, member_ids,
                       inner: Mat2):
    """Recut along boundaries separating member cylinders from the rest
    and apply `inner` (in normalized coordinates) to the member side.

    Returns (new TranslationSurface, new holonomy per frame cell).
    """
    surface = decomposition.surface
    frame = decomposition.frame
    normalized = decomposition.normalized
    cut = decomposition.cut
    g = decomposition.matrix
    g_inv = g.inverse()
    members = set()
    comp_of = {}
    for cyl in decomposition.cylinders:
        root = cut.pieces[cyl.piece_ids[0]].component
        comp_of[cyl.cyl_id] = root
        if cyl.cyl_id in member_ids:
            members.add(root)

    # chords that separate a member region from a non-member region
    chord_sides = {}
    for piece in cut.pieces:
        for item in piece.items:
            if item.kind == "chord":
                side = chord_sides.setdefault(item.chord_id, {})
                side[item.direction] = piece.component
    needed = []
    for ch in cut.chords:
        sides = chord_sides[ch.chord_id]
        above = sides.get(1)
        below = sides.get(-1)
        if (above in members) != (below in members):
            needed.append(ch)

    reduced_by_polygon: dict[int, list] = {}
    for new_id, ch in enumerate(needed):
        copy = _Chord(new_id, ch.polygon, ch.sc_id, ch.sc_index, ch.start,
                      ch.end, ch.start_coords, ch.end_coords)
        reduced_by_polygon.setdefault(ch.polygon, []).append(copy)
    pieces, sub_lookup, _ = _build_cut_pieces(normalized, reduced_by_polygon)

    # treatment per reduced piece: each reduced sub-edge starts at a fine
    # subdivision point, so the fine sub item there names the component
    def treatment(piece) -> bool:
        for item in piece.items:
            if item.kind != "sub":
                continue
            vec = normalized.polygons[piece.polygon][item.edge]
            if vec.y.sign() == 0:
                continue
            fine = cut.sub_lookup.get((piece.polygon, item.edge, item.t0))
            if fine is not None:
                return fine.piece.component in members
        raise InternalInvariantError("piece treatment undetermined")

    treat = {piece.pid: treatment(piece) for piece in pieces}

    # polygons of the deformed surface
    new_polys = []
    for piece in pieces:
        poly = []
        for item in piece.items:
            vec = item.vec
            mapped = inner.apply(vec) if treat[piece.pid] else vec
            poly.append(g_inv.apply(mapped))
        new_polys.append(poly)

    gluing = []
    seen = set()
    one = FieldScalar(1, 0, normalized.ctx)
    for piece in pieces:
        for k, item in enumerate(piece.items):
            key = (piece.pid, k)
            if key in seen:
                continue
            if item.kind == "sub":
                p, e = piece.polygon, item.edge
                vec = normalized.polygons[p][e]
                if vec.y.sign() != 0:
                    mate = sub_lookup[(normalized.gluing[(p, e)][0],
                                       normalized.gluing[(p, e)][1],
                                       one - item.t1)]
                else:
                    # horizontal cell: partner sub is the full partner edge
                    q, f = normalized.gluing[(p, e)]
                    mate = sub_lookup[(q, f, one - item.t1)]
                mk = (mate.piece.pid, mate.index)
                gluing.append((key, mk))
                seen.add(key)
                seen.add(mk)
            else:
                # chords pair their two directed sides
                for piece2 in pieces:
                    for k2, item2 in enumerate(piece2.items):
                        if (item2.kind == "chord"
                                and item2.chord_id == item.chord_id
                                and item2.direction == -item.direction):
                            mk = (piece2.pid, k2)
                            gluing.append((key, mk))
                            seen.add(key)
                            seen.add(mk)
    index_map = {}
    for new_p, piece in enumerate(pieces):
        for k in range(len(piece.items)):
            index_map[(piece.pid, k)] = (new_p, k)
    gluing = [(index_map[a], index_map[b]) for a, b in gluing]
    result = TranslationSurface(new_polys, gluing, surface.label)
    result.singularities()

    # restricted holonomy of every original frame cell
    cell_hol = []
    for cell in frame.cells:
        p, e = cell
        vec = normalized.polygons[p][e]
        if vec.y.sign() == 0:
            cell_hol.append(g_inv.apply(vec))
            continue
        total_x = FieldScalar(0, 0, normalized.ctx)
        total_y = FieldScalar(0, 0, normalized.ctx)
        found = False
        for (pp, ee, t0), item in sub_lookup.items():
            if (pp, ee) != cell:
                continue
            found = True
            sub_vec = item.vec
            mapped = (inner.apply(sub_vec) if treat[item.piece.pid]
                      else sub_vec)
            total_x = total_x + mapped.x
            total_y = total_y + mapped.y
        if not found:
            raise InternalInvariantError(f"cell {cell} lost its sub-edges")
        cell_hol.append(g_inv.apply(Vec2(total_x, total_y)))
    return result, cell_hol


def _restricted_periods(frame: HomologyFrame, cell_hol):
    out = []
    for chain in frame.basis_chains:
        x = cell_hol[0].x - cell_hol[0].x
        y = x
        for c, coeff in enumerate(chain):
            if coeff:
                x = x + cell_hol[c].x * coeff
                y = y + cell_hol[c].y * coeff
        out.append(ComplexScalar(x, y))
    return out


def shear(surface: TranslationSurface, decomposition: Decomposition, t,
          ids=None):
    """The cylinder shear u_t applied to the chosen cylinders.

    With ids=None the whole certified cylinder set is sheared, which is
    the deformation that stays in the orbit closure.  The result is
    rebuilt geometrically; its periods satisfy the exact linearity law,
    which verify_linearity re-checks independently.
    """
    if not isinstance(t, FieldScalar):
        t = FieldScalar(t)
    chosen = {cyl.cyl_id for cyl in _cylinder_subset(decomposition, ids)}
    result, _ = _piecewise_rebuild(decomposition, chosen, Mat2.shear(t))
    return result


def stretch(surface: TranslationSurface, decomposition: Decomposition, s,
            ids=None):
    """The cylinder stretch with vertical scale 1+s on the chosen set."""
    if not isinstance(s, FieldScalar):
        s = FieldScalar(s)
    one_plus = FieldScalar(1) + s
    if one_plus.sign() <= 0:
        raise DegenerateCylinder("stretch needs 1 + s > 0")
    chosen = {cyl.cyl_id for cyl in _cylinder_subset(decomposition, ids)}
    result, _ = _piecewise_rebuild(decomposition, chosen,
                                   Mat2.vertical_scale(one_plus))
    return result


def verify_linearity(surface: TranslationSurface, frame: HomologyFrame,
                     decomposition: Decomposition, t, ids=None) -> bool:
    """Check Phi(shear) = Phi + t * eta exactly, both sides independently.

    The left side comes from the geometric rebuild (sub-edge holonomy
    sums over the original frame); the right side from the crossing-count
    cocycle.  Exact disagreement returns False and means a bug.
    """
    if not isinstance(t, FieldScalar):
        t = FieldScalar(t)
    chosen = {cyl.cyl_id for cyl in _cylinder_subset(decomposition, ids)}
    _, cell_hol = _piecewise_rebuild(decomposition, chosen, Mat2.shear(t))
    sheared = _restricted_periods(frame, cell_hol)
    base = frame.periods()
    ec = eta(surface, frame, decomposition, ids)
    tc = ComplexScalar(t)
    for got, phi, ev in zip(sheared, base, ec.values):
        want = phi + tc * ev
        if not (got - want).is_zero():
            return False
    return True


def deform_from_periods(surface: TranslationSurface, frame: HomologyFrame,
                        zeta: Cocycle, eps) -> TranslationSurface:
    """Displace every edge holonomy by eps * zeta and rebuild.

    Raises DeformationTooLarge when any polygon stops being simple (or
    the stratum changes, or a real deformation fails to preserve the
    horizontal cylinder heights it must preserve).
    """
    frame.check(zeta)
    if not isinstance(eps, FieldScalar):
        eps = FieldScalar(eps)
    if eps.sign() < 0:
        raise ValueError("eps must be nonnegative; rescale zeta instead")
    displacement = []
    for c in range(len(frame.cells)):
        coords = frame.cell_coords(frame.cells[c])
        val = frame.evaluate(zeta, coords)
        displacement.append(Vec2(val.re * eps, val.im * eps))
    new_polys = []
    for p, poly in enumerate(surface.polygons):
        new_poly = []
        for e, vec in enumerate(poly):
            cidx, sign = frame.cell_of[(p, e)]
            d = displacement[cidx]
            if sign > 0:
                new_poly.append(Vec2(vec.x + d.x, vec.y + d.y))
            else:
                new_poly.append(Vec2(vec.x - d.x, vec.y - d.y))
        new_polys.append(new_poly)
    gl = [(a, b) for a, b in surface.gluing.items() if a < b]
    pre_data = surface.singularities()
    pre_horizontal = None
    if zeta.is_real() and eps.sign() > 0:
        pre_horizontal = decompose(surface, Vec2(1, 0), frame=frame)
    try:
        result = TranslationSurface(new_polys, gl, surface.label)
        post_data = result.singularities()
    except Exception as exc:
        raise DeformationTooLarge(f"deformed surface is invalid: {exc}")
    if post_data.signature != pre_data.signature:
        raise DeformationTooLarge("deformation changed the stratum")
    if pre_horizontal is not None and pre_horizontal.is_periodic:
        post = decompose(result, Vec2(1, 0))
        pre_heights = sorted(c.height for c in pre_horizontal.cylinders)
        post_heights = sorted(c.height for c in post.cylinders)
        if not post.is_periodic or pre_heights != post_heights:
            raise DeformationTooLarge(
                "horizontal cylinders did not persist with their heights")
    return result
