"""Certificates and scans built on certified cylinder decompositions.

Only the shear cocycle of a full, certified-Periodic cylinder set of a
direction enters the tangent span; partial directions are recorded but
never contribute.  The resulting span is an exact lower bound for the
orbit-closure tangent space, and half the dimension of its projection
to absolute cohomology (rounded up) bounds the cylinder rank from
below.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

from .cylinders import Decomposition, NO_CYLINDER, PERIODIC, decompose
from .deform import (cylinder_preserving_space, deform_from_periods, eta,
                     twist_space)
from .errors import DeformationTooLarge, InternalInvariantError
from .field import FieldScalar
from .homology import Cocycle, HomologyFrame, homology_frame
from .linalg import ComplexScalar, row_reduce
from .search import enumerate_directions
from .surface import TranslationSurface

__all__ = ["TangentSpan", "FieldReport", "accumulate_tangent",
           "rank_lower_bound", "independence_check", "field_bound",
           "complete_periodicity_scan", "complete_parabolicity_check",
           "more_cylinders_search", "scan_map"]


def thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("FLATDEF_THREADS", "1")))
    except ValueError:
        return 1


def scan_map(fn, items):
    """Order-preserving map over directions, optionally threaded."""
    n = thread_cap()
    items = list(items)
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


class TangentSpan:
    """An accumulating certified subspace of the orbit-closure tangent.

    Generators start from the period class itself and grow by the shear
    cocycles of fully certified periodic directions; the span is complex,
    so i*eta comes for free.
    """

    def __init__(self, frame: HomologyFrame):
        self.frame = frame
        self.frame_hash = frame.hash
        self.generators = []   # (Cocycle, provenance dict)
        self.skipped = []      # provenance of non-certified directions
        omega = frame.period_cocycle()
        self._add(omega, {"rule": "PeriodClass", "direction": None})

    def _add(self, cocycle: Cocycle, provenance):
        self.frame.check(cocycle)
        self.generators.append((cocycle, provenance))

    def add_certified(self, surface, decomposition: Decomposition):
        if decomposition.status != PERIODIC:
            self.skipped.append(_provenance(decomposition, "NotCertified"))
            return False
        cocycle = eta(surface, self.frame, decomposition)
        for sc in decomposition.saddle_connections:
            coords = self.frame.coords_of_path(sc.chords)
            if not self.frame.evaluate(cocycle, coords).is_zero():
                raise InternalInvariantError(
                    "certified shear cocycle nonzero on a direction "
                    "saddle connection")
        self._add(cocycle, _provenance(decomposition, "CertifiedPeriodic"))
        return True

    def dim(self) -> int:
        rows = [[v for v in gen.values] for gen, _ in self.generators]
        rank, _, _ = row_reduce(rows, ncols=self.frame.m)
        return rank

    def p_dim(self) -> int:
        rows = [list(self.frame.project_absolute(gen))
                for gen, _ in self.generators]
        rank, _, _ = row_reduce(rows, ncols=2 * self.frame.genus)
        return rank

    def basis(self):
        rows = [[v for v in gen.values] for gen, _ in self.generators]
        _, rowspace, _ = row_reduce(rows, ncols=self.frame.m)
        return rowspace


def _provenance(decomposition: Decomposition, rule: str):
    v = decomposition.direction.vector
    return {
        "rule": rule,
        "direction": [str(v.x), str(v.y)],
        "status": decomposition.status,
        "cylinders": len(decomposition.cylinders),
    }


def accumulate_tangent(surface: TranslationSurface, frame: HomologyFrame,
                       directions, trace_factor: int = 20,
                       trace_length=None) -> TangentSpan:
    """Span of the period class and all certified direction cocycles."""
    span = TangentSpan(frame)

    def work(d):
        return decompose(surface, d, trace_factor=trace_factor,
                         trace_length=trace_length, frame=frame)

    for dec in scan_map(work, directions):
        span.add_certified(surface, dec)
    return span


def rank_lower_bound(span: TangentSpan) -> int:
    """ceil(p-dim / 2): sound because the true projection is symplectic."""
    p = span.p_dim()
    return (p + 1) // 2


def independence_check(surface: TranslationSurface, frame: HomologyFrame,
                       decomposition: Decomposition, ids=None) -> bool:
    """Is p(eta) outside the span of Re p(omega) and Im p(omega)?

    True supports (conditionally on the cylinder set being complete and
    the direction not periodic) that the orbit closure has rank > 1; the
    conditional is the caller's to report, not this function's.
    """
    if not decomposition.cylinders:
        raise ValueError("independence check needs at least one cylinder")
    e = eta(surface, frame, decomposition, ids)
    omega = frame.period_cocycle()
    p_omega = frame.project_absolute(omega)
    re_row = [ComplexScalar(v.re) for v in p_omega]
    im_row = [ComplexScalar(v.im) for v in p_omega]
    target = list(frame.project_absolute(e))
    rank_base, _, _ = row_reduce([re_row, im_row], ncols=2 * frame.genus)
    rank_full, _, _ = row_reduce([re_row, im_row, target],
                                 ncols=2 * frame.genus)
    return rank_full > rank_base


class FieldReport:
    """Circumference-ratio field data of one direction."""

    __slots__ = ("direction", "circumferences", "ratios", "rational",
                 "single_cylinder", "field_d")

    def __init__(self, direction, circumferences, ratios, rational,
                 single_cylinder, field_d):
        self.direction = direction
        self.circumferences = circumferences
        self.ratios = ratios
        self.rational = rational
        self.single_cylinder = single_cylinder
        self.field_d = field_d

    @property
    def field_name(self) -> str:
        return "Q" if self.rational else f"Q(sqrt({self.field_d}))"


def field_bound(decomposition: Decomposition) -> FieldReport:
    """Exact circumference ratios and the field they generate.

    With a single cylinder the orbit-closure field of definition is Q
    outright; otherwise the ratios bound it inside Q or Q(sqrt(d)).
    The equality direction holds only if the listed cylinders form one
    parallelism class of the (unknown) closure, which is reported as a
    hypothesis, never asserted.
    """
    cyls = decomposition.cylinders
    if not cyls:
        raise ValueError("field bound needs at least one cylinder")
    c1 = cyls[0].circumference
    ratios = [cyl.circumference / c1 for cyl in cyls]
    rational = all(r.is_rational() for r in ratios)
    return FieldReport(
        direction=decomposition.direction,
        circumferences=[cyl.circumference for cyl in cyls],
        ratios=ratios,
        rational=rational,
        single_cylinder=(len(cyls) == 1),
        field_d=decomposition.surface.ctx.d,
    )


HAS_UNCERTIFIED = "HasCylinderNotCertifiedPeriodic"


def complete_periodicity_scan(surface: TranslationSurface, radius_sq,
                              trace_factor: int = 20, trace_length=None,
                              frame: HomologyFrame | None = None):
    """Classify every enumerated direction of the surface.

    Returns a report dict with per-direction entries Periodic /
    HasCylinderNotCertifiedPeriodic / NoCylinderFound.  A completely
    periodic surface shows no entries of the middle kind once the trace
    bound is large enough.
    """
    if frame is None:
        frame = homology_frame(surface)
    directions = enumerate_directions(surface, radius_sq)

    def work(d):
        dec = decompose(surface, d, trace_factor=trace_factor,
                        trace_length=trace_length, frame=frame)
        if dec.status == PERIODIC:
            kind = PERIODIC
        elif dec.cylinders:
            kind = HAS_UNCERTIFIED
        else:
            kind = NO_CYLINDER
        return d, kind, dec

    rows = scan_map(work, directions)
    counts = {PERIODIC: 0, HAS_UNCERTIFIED: 0, NO_CYLINDER: 0}
    entries = []
    offenders = []
    for d, kind, dec in rows:
        counts[kind] += 1
        entries.append({
            "direction": [str(d.vector.x), str(d.vector.y)],
            "classification": kind,
            "cylinders": len(dec.cylinders),
            "unresolved_rays": len(dec.unresolved_rays),
        })
        if kind == HAS_UNCERTIFIED:
            offenders.append(d)
    return {
        "directions": len(directions),
        "counts": counts,
        "entries": entries,
        "offending_directions": [[str(d.vector.x), str(d.vector.y)]
                                 for d in offenders],
        "decompositions": {d: dec for d, _, dec in rows},
    }


def complete_parabolicity_check(surface: TranslationSurface, radius_sq,
                                trace_factor: int = 20, trace_length=None,
                                frame: HomologyFrame | None = None):
    """For each certified periodic direction, check pairwise rational
    moduli; reports the first failure or a full pass up to the bound."""
    scan = complete_periodicity_scan(surface, radius_sq,
                                     trace_factor=trace_factor,
                                     trace_length=trace_length, frame=frame)
    failures = []
    checked = 0
    for d, dec in scan["decompositions"].items():
        if dec.status != PERIODIC or not dec.cylinders:
            continue
        checked += 1
        m1 = dec.cylinders[0].modulus
        for cyl in dec.cylinders[1:]:
            ratio = cyl.modulus / m1
            if not ratio.is_rational():
                failures.append({
                    "direction": [str(d.vector.x), str(d.vector.y)],
                    "moduli": [str(c.modulus) for c in dec.cylinders],
                })
                break
    return {
        "directions": scan["directions"],
        "periodic_directions_checked": checked,
        "parabolic": not failures,
        "failures": failures,
        "periodicity_counts": scan["counts"],
    }


def more_cylinders_search(surface: TranslationSurface, frame: HomologyFrame,
                          decomposition: Decomposition, eps,
                          candidate_directions,
                          max_halvings: int = 12):
    """Best-effort search for a nearby surface with more cylinders.

    Requires the cylinder-preserving space to strictly contain the twist
    space (else returns None immediately); deforms by i*eps*eta with eta
    in the difference, shrinking eps while the deformation is too large;
    confirms the old cylinders persisted; then scans the candidate
    directions for a certified decomposition with strictly more
    cylinders.  Existence is not guaranteed, only searched for.
    """
    if decomposition.status != PERIODIC:
        raise ValueError("search needs a Periodic decomposition")
    if not isinstance(eps, FieldScalar):
        eps = FieldScalar(eps)
    tw_gens, tw_dim = twist_space(surface, frame, decomposition)
    cp_gens, cp_dim = cylinder_preserving_space(surface, frame,
                                                decomposition)
    if cp_dim <= tw_dim:
        return None
    tw_rows = [[v.re for v in gen.values] for gen in tw_gens]
    chosen = None
    for gen in cp_gens:
        rows = tw_rows + [[v.re for v in gen.values]]
        rank, _, _ = row_reduce(rows, ncols=frame.m)
        if rank > tw_dim:
            chosen = gen
            break
    if chosen is None:
        raise InternalInvariantError("dimension gap without a witness")
    # i * eta transported to the original direction: the deformation that
    # tilts away the unwanted saddle connections but fixes every core
    factor = ComplexScalar(0, 1) * decomposition.transport_factor()
    imaginary = chosen.scale(factor)

    attempts = []
    deformed = None
    for _ in range(max_halvings):
        try:
            deformed = deform_from_periods(surface, frame, imaginary, eps)
            break
        except DeformationTooLarge as exc:
            attempts.append(str(eps))
            eps = eps / 2
    if deformed is None:
        return {"found": False, "attempted_eps": attempts,
                "reason": "every deformation size failed"}

    # the old cylinders must persist: their core holonomies are exactly
    # unchanged (the deformation vanishes on core classes), so their
    # circumferences reappear among the horizontal cylinders
    n_old = len(decomposition.cylinders)
    new_frame = homology_frame(deformed)
    post = decompose(deformed, decomposition.direction.vector,
                     frame=new_frame)
    old_circs = sorted(str(c.circumference) for c in decomposition.cylinders)
    post_circs = sorted(str(c.circumference) for c in post.cylinders)
    persisted = all(c in post_circs for c in old_circs)
    for c in old_circs:
        if c in post_circs:
            post_circs.remove(c)
        else:
            persisted = False
    if not persisted:
        return {"found": False, "attempted_eps": attempts + [str(eps)],
                "reason": "old cylinders not confirmed on the deformation",
                "surface": deformed}
    for d in candidate_directions:
        dec = decompose(deformed, d, frame=new_frame)
        if dec.status == PERIODIC and len(dec.cylinders) > n_old:
            return {
                "found": True,
                "surface": deformed,
                "decomposition": dec,
                "direction": dec.direction,
                "eps": str(eps),
                "old_cylinders": n_old,
                "new_cylinders": len(dec.cylinders),
            }
    return {"found": False, "attempted_eps": attempts + [str(eps)],
            "reason": "no candidate direction gained cylinders",
            "surface": deformed}
