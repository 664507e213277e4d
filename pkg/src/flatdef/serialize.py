"""Exact JSON serialization: surface files, decompositions, certificates.

Scalars travel as canonical strings ("p/q") or two-element arrays
(["p/q", "r/s"] meaning a + b*sqrt(d)); every writer sorts keys and
uses a fixed separator style so equal objects serialize byte-for-byte
identically across runs.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .cylinders import Decomposition
from .errors import FlatdefError
from .field import FieldCtx, FieldScalar, QQ
from .surface import TranslationSurface

__all__ = ["scalar_to_json", "scalar_from_json", "surface_to_json",
           "surface_from_json", "dump_surface", "load_surface",
           "decomposition_to_json", "span_to_json", "dumps"]

FORMAT_VERSION = 1


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def scalar_to_json(x: FieldScalar):
    if x.b == 0:
        return str(x.a)
    return [str(x.a), str(x.b)]


def scalar_from_json(v, ctx: FieldCtx) -> FieldScalar:
    if isinstance(v, str):
        return FieldScalar(Fraction(v), 0, ctx if ctx.d else QQ)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return FieldScalar(Fraction(v[0]), Fraction(v[1]), ctx)
    raise FlatdefError(f"malformed scalar {v!r}")


def surface_to_json(surface: TranslationSurface) -> dict:
    gl = sorted([list(a), list(b)] for a, b in surface.gluing.items() if a < b)
    return {
        "format": FORMAT_VERSION,
        "field": {"d": surface.ctx.d},
        "polygons": [
            [[scalar_to_json(e.x), scalar_to_json(e.y)] for e in poly]
            for poly in surface.polygons
        ],
        "gluing": gl,
        "label": surface.label,
    }


def surface_from_json(data: dict) -> TranslationSurface:
    try:
        d = int(data["field"]["d"])
        ctx = FieldCtx.get(d)
        polys = [
            [(scalar_from_json(sx, ctx), scalar_from_json(sy, ctx))
             for sx, sy in poly]
            for poly in data["polygons"]
        ]
        gluing = [((int(a[0]), int(a[1])), (int(b[0]), int(b[1])))
                  for a, b in data["gluing"]]
        label = data.get("label", "")
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise FlatdefError(f"malformed surface file: {exc}") from None
    return TranslationSurface(polys, gluing, label)


def dump_surface(surface: TranslationSurface, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(surface_to_json(surface)))


def load_surface(path) -> TranslationSurface:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return surface_from_json(data)


def _vec(v):
    return [str(v.x), str(v.y)]


def decomposition_to_json(dec: Decomposition) -> dict:
    cyls = []
    for cyl in dec.cylinders:
        cyls.append({
            "id": cyl.cyl_id,
            "height": str(cyl.height),
            "circumference": str(cyl.circumference),
            "modulus": str(cyl.modulus),
            "area": str(cyl.area),
            "core_class": list(cyl.core_coords),
            "cross_class": list(cyl.cross_coords),
            "boundary_saddle_connections": list(cyl.boundary_sc_ids),
        })
    scs = []
    for sc in dec.saddle_connections:
        scs.append({
            "id": sc.sc_id,
            "holonomy": _vec(sc.holonomy),
            "start_class": sc.start_class,
            "end_class": sc.end_class,
            "edge_run": sc.is_edge_run,
        })
    g = dec.matrix
    return {
        "format": FORMAT_VERSION,
        "direction": _vec(dec.direction.vector),
        "status": dec.status,
        "normalizing_matrix": [[str(g.a), str(g.b)], [str(g.c), str(g.d)]],
        "trace_bound_squared": str(dec.bound_sq),
        "frame_hash": dec.frame.hash,
        "cylinders": cyls,
        "saddle_connections": scs,
        "unresolved_rays": [list(c) for c in dec.unresolved_rays],
        "area_normalized": str(dec.normalized.area()),
    }


def _complex(v):
    return [str(v.re), str(v.im)]


def span_to_json(span, k_lb: int) -> dict:
    """Certificate JSON for a tangent span accumulation."""
    return {
        "format": FORMAT_VERSION,
        "frame_hash": span.frame_hash,
        "generators": [
            {"values": [_complex(v) for v in gen.values],
             "provenance": prov}
            for gen, prov in span.generators
        ],
        "non_certified": list(span.skipped),
        "basis": [[_complex(v) for v in row] for row in span.basis()],
        "dim_C": span.dim(),
        "p_dim": span.p_dim(),
        "rank_lower_bound": k_lb,
    }
