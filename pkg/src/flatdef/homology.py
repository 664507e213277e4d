"""Homology frames: integer bases of H_1(X, Sigma; Z) and everything
hanging off them (periods, absolute subspace, intersection pairing,
cocycles, and turning explicit paths into classes).

Cell structure: one 1-cell per glued edge pair, oriented along the
lexicographically smaller (polygon, edge) of the pair; 2-cells are the
polygons; 0-cells the vertex classes.  Since every 0-cell is a marked
point or cone point, H_1(X, Sigma; Z) is the cokernel of the face
boundary map on 1-chains, and a basis is read off from a Smith normal
form with deterministic pivoting.
"""

from __future__ import annotations

import hashlib
import json

from .errors import InternalInvariantError, StaleCocycle
from .field import FieldScalar, Vec2
from .intmat import integer_kernel, smith_form
from .linalg import ComplexScalar
from .surface import TranslationSurface

__all__ = ["HomologyFrame", "Cocycle", "homology_frame", "period_map",
           "project_absolute", "PathPoint", "Chord"]


# a point on a polygon boundary: ("vertex", i) or ("edge", e, t) with the
# parameter t in (0, 1) measured along the polygon's own edge direction
PathPoint = tuple

# a straight run inside one polygon, from one boundary point to another
Chord = tuple  # (polygon_index, PathPoint, PathPoint)


class Cocycle:
    """An element of H^1(M, Sigma; C): complex values on the frame basis."""

    __slots__ = ("values", "frame_hash")

    def __init__(self, values, frame_hash: str):
        vals = []
        for v in values:
            if not isinstance(v, ComplexScalar):
                v = ComplexScalar(v)
            vals.append(v)
        object.__setattr__(self, "values", tuple(vals))
        object.__setattr__(self, "frame_hash", frame_hash)

    def __setattr__(self, *a):
        raise AttributeError("Cocycle is immutable")

    def is_real(self) -> bool:
        return all(v.im.is_zero() for v in self.values)

    def scale(self, c) -> "Cocycle":
        return Cocycle([v * c for v in self.values], self.frame_hash)

    def __add__(self, other: "Cocycle") -> "Cocycle":
        if self.frame_hash != other.frame_hash:
            raise StaleCocycle("cocycles live on different frames")
        return Cocycle([x + y for x, y in zip(self.values, other.values)],
                       self.frame_hash)

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        if not isinstance(other, Cocycle):
            return NotImplemented
        return self.frame_hash == other.frame_hash and self.values == other.values

    def __repr__(self):
        return f"Cocycle({[str(v) for v in self.values]})"


class HomologyFrame:
    """A chosen integer basis of H_1(X, Sigma; Z) with derived data."""

    def __init__(self, surface: TranslationSurface):
        self.surface = surface
        data = surface.singularities()
        self.singularity_data = data
        self.genus = data.genus

        refs = sorted(surface.edge_refs())
        cells = []
        cell_of: dict = {}
        for ref in refs:
            if ref in cell_of:
                continue
            partner = surface.gluing[ref]
            idx = len(cells)
            cells.append(ref)
            cell_of[ref] = (idx, 1)
            cell_of[partner] = (idx, -1)
        self.cells = tuple(cells)
        self.cell_of = cell_of
        ne = len(cells)

        # face boundaries as integer vectors in Z^E
        faces = []
        for p, poly in enumerate(surface.polygons):
            row = [0] * ne
            for e in range(len(poly)):
                c, s = cell_of[(p, e)]
                row[c] += s
            faces.append(row)
        diag, _, v, vinv = smith_form(faces)
        if any(d != 1 for d in diag):
            raise InternalInvariantError(
                f"relative H_1 has torsion {diag}; surface data is corrupt")
        r = len(diag)
        self.m = ne - r
        s = data.num_points
        if self.m != 2 * self.genus + s - 1:
            raise InternalInvariantError(
                f"basis size {self.m} != 2g+s-1 = {2 * self.genus + s - 1}")
        self._coord_cols = [[v[row][j] for j in range(r, ne)] for row in range(ne)]
        self.basis_chains = tuple(tuple(vinv[j]) for j in range(r, ne))
        for k, chain in enumerate(self.basis_chains):
            want = [1 if i == k else 0 for i in range(self.m)]
            if self.coords_of_chain(chain) != want:
                raise InternalInvariantError("basis chain coordinates inconsistent")
        for row in faces:
            if any(x != 0 for x in self.coords_of_chain(row)):
                raise InternalInvariantError("face boundary has nonzero coordinates")

        # vertex classes and the boundary map on basis classes
        self.vertex_class_of = surface.vertex_class_map()
        nv = data.num_points
        bnd = []
        for chain in self.basis_chains:
            out = [0] * nv
            for c, coeff in enumerate(chain):
                if coeff == 0:
                    continue
                p, e = self.cells[c]
                n = len(surface.polygons[p])
                tail = self.vertex_class_of[(p, e)]
                head = self.vertex_class_of[(p, (e + 1) % n)]
                out[head] += coeff
                out[tail] -= coeff
            bnd.append(out)
        self.boundary_matrix = tuple(tuple(row) for row in bnd)

        ker = integer_kernel(bnd)
        if len(ker) != 2 * self.genus:
            raise InternalInvariantError(
                f"absolute subspace rank {len(ker)} != 2g = {2 * self.genus}")
        self.absolute_basis = tuple(tuple(x) for x in ker)

        # ccw ray cycles around each vertex class, as (cell, sign) ends
        self._ray_cycles = []
        for cycle in data.classes:
            self._ray_cycles.append(tuple(cell_of[corner] for corner in cycle))

        jmat = []
        abs_chains = [self.chain_of_coords(v) for v in self.absolute_basis]
        for a in abs_chains:
            jmat.append(tuple(self.intersection_of_chains(a, b)
                              for b in abs_chains))
        self.intersection_matrix = tuple(jmat)
        for i in range(2 * self.genus):
            for j in range(2 * self.genus):
                if jmat[i][j] != -jmat[j][i]:
                    raise InternalInvariantError("intersection form not antisymmetric")
        self._j_inverse = None

        self.hash = self._content_hash()

    # -- coordinates -----------------------------------------------------

    def coords_of_chain(self, chain) -> list[int]:
        """Frame coordinates of an integer 1-chain given in Z^E."""
        return [sum(chain[e] * self._coord_cols[e][k] for e in range(len(chain)))
                for k in range(self.m)]

    def chain_of_coords(self, coords) -> list[int]:
        """A representative chain in Z^E for frame coordinates."""
        ne = len(self.cells)
        out = [0] * ne
        for k, c in enumerate(coords):
            if c:
                for e in range(ne):
                    out[e] += c * self.basis_chains[k][e]
        return out

    def cell_coords(self, ref) -> list[int]:
        """Frame coordinates of a single oriented polygon edge."""
        c, s = self.cell_of[ref]
        return [s * self._coord_cols[c][k] for k in range(self.m)]

    # -- geometry of cells -------------------------------------------------

    def cell_vector(self, c: int) -> Vec2:
        return self.surface.edge_vector(self.cells[c])

    def periods(self) -> tuple[ComplexScalar, ...]:
        """Exact periods of the basis classes (the period map Phi)."""
        ctx = self.surface.ctx
        out = []
        for chain in self.basis_chains:
            x = FieldScalar(0, 0, ctx)
            y = FieldScalar(0, 0, ctx)
            for c, coeff in enumerate(chain):
                if coeff:
                    v = self.cell_vector(c)
                    x = x + v.x * coeff
                    y = y + v.y * coeff
            out.append(ComplexScalar(x, y))
        return tuple(out)

    def period_cocycle(self) -> Cocycle:
        """[omega] as a cocycle: the tautological period class."""
        return Cocycle(self.periods(), self.hash)

    # -- intersection pairing ----------------------------------------------

    def intersection_of_chains(self, a, b) -> int:
        """Algebraic intersection number of two closed integer 1-chains.

        Strands are pushed off so that all crossings happen in vertex
        disks and at shared cells; at a vertex with ccw ray ends r_1..r_N
        the count is sum_{k<j} I_a(r_k) I_b(r_j), plus a_c b_c over cells.
        Requires both chains to be cycles (zero boundary).
        """
        total = sum(x * y for x, y in zip(a, b))
        for cycle in self._ray_cycles:
            prefix = 0
            for cell, sign in cycle:
                ib = sign * b[cell]
                if ib:
                    total += prefix * ib
                prefix += sign * a[cell]
        return total

    def intersection_of_coords(self, ca, cb) -> int:
        return self.intersection_of_chains(self.chain_of_coords(ca),
                                           self.chain_of_coords(cb))

    def j_inverse(self):
        """Inverse of the intersection matrix; integral by unimodularity."""
        if self._j_inverse is None:
            from fractions import Fraction
            n = 2 * self.genus
            from .linalg import solve_linear
            cols = []
            rows = [[Fraction(x) for x in row]
                    for row in self.intersection_matrix]
            for k in range(n):
                rhs = [Fraction(1 if i == k else 0) for i in range(n)]
                col = solve_linear(rows, rhs)
                if col is None:
                    raise InternalInvariantError("intersection form singular")
                cols.append(col)
            inv = [[cols[j][i] for j in range(n)] for i in range(n)]
            for row in inv:
                for x in row:
                    if x.denominator != 1:
                        raise InternalInvariantError(
                            "intersection form is not unimodular")
            self._j_inverse = tuple(tuple(int(x) for x in row) for row in inv)
        return self._j_inverse

    def symplectic_pairing(self, phi, psi):
        """Cup-product pairing of two absolute cocycle value vectors.

        phi and psi hold the values on the absolute basis (as returned by
        project_absolute, real or complex).  Cocycle vectors are J-images
        of homology classes, so the pairing pulls back through J^{-1}:
        <phi, psi> = phi^T J^{-T} psi, which vanishes exactly when the
        Poincare-dual classes have zero intersection.
        """
        jinv = self.j_inverse()
        n = 2 * self.genus
        total = None
        for i in range(n):
            for j in range(n):
                c = jinv[j][i]  # transpose of J^{-1}
                if c:
                    term = phi[i] * psi[j] * c
                    total = term if total is None else total + term
        if total is None:
            from .linalg import ComplexScalar
            return ComplexScalar(FieldScalar(0, 0, self.surface.ctx))
        return total

    # -- absolute projection -------------------------------------------------

    def project_absolute(self, cocycle: Cocycle) -> tuple[ComplexScalar, ...]:
        """Restriction of a cocycle to the absolute subspace basis (length 2g)."""
        self.check(cocycle)
        out = []
        for vec in self.absolute_basis:
            acc = ComplexScalar(FieldScalar(0, 0, self.surface.ctx))
            for k, coeff in enumerate(vec):
                if coeff:
                    acc = acc + cocycle.values[k] * coeff
            out.append(acc)
        return tuple(out)

    def evaluate(self, cocycle: Cocycle, coords) -> ComplexScalar:
        """Value of a cocycle on a class given in frame coordinates."""
        self.check(cocycle)
        acc = ComplexScalar(FieldScalar(0, 0, self.surface.ctx))
        for k, c in enumerate(coords):
            if c:
                acc = acc + cocycle.values[k] * c
        return acc

    def cocycle(self, values) -> Cocycle:
        if len(values) != self.m:
            raise ValueError(f"cocycle needs {self.m} values")
        return Cocycle(values, self.hash)

    def check(self, cocycle: Cocycle) -> None:
        if cocycle.frame_hash != self.hash:
            raise StaleCocycle("cocycle was computed against a different frame")

    # -- paths to classes -----------------------------------------------------

    def _prefix_chain(self, p: int, point: PathPoint, acc, weight):
        """Add the boundary path from polygon p's vertex 0 to `point`.

        The path runs forward along the polygon boundary; fractional
        traversal of the final edge is recorded with an exact scalar
        weight, which must cancel to integers over a full path.
        """
        if point[0] == "vertex":
            upto = point[1]
            t = None
        else:
            upto = point[1]
            t = point[2]
        for e in range(upto):
            c, s = self.cell_of[(p, e)]
            acc[c] = acc[c] + weight * s
        if t is not None and not t.is_zero():
            c, s = self.cell_of[(p, upto)]
            acc[c] = acc[c] + weight * t * s

    def chain_of_path(self, chords) -> list[int]:
        """The 1-chain in Z^E of a path given as polygon chords.

        Each chord is (polygon, start, end); inside a polygon the chord
        is homotoped rel endpoints onto the boundary through vertex 0.
        Consecutive chords must continue through gluings (or touch at a
        shared vertex class); the fractional boundary parts then cancel
        exactly, and a non-integer result raises.
        """
        ctx = self.surface.ctx
        zero = FieldScalar(0, 0, ctx)
        acc = [zero] * len(self.cells)
        minus_one = FieldScalar(-1, 0, ctx)
        one = FieldScalar(1, 0, ctx)
        for p, start, end in chords:
            self._prefix_chain(p, start, acc, minus_one)
            self._prefix_chain(p, end, acc, one)
        out = []
        for x in acc:
            if not x.is_rational() or x.a.denominator != 1:
                raise InternalInvariantError(
                    f"path chain has non-integer coefficient {x}")
            out.append(int(x.a))
        return out

    def coords_of_path(self, chords) -> list[int]:
        return self.coords_of_chain(self.chain_of_path(chords))

    # -- hashing -----------------------------------------------------------

    def _content_hash(self) -> str:
        payload = {
            "d": self.surface.ctx.d,
            "polygons": [[[str(e.x), str(e.y)] for e in poly]
                         for poly in self.surface.polygons],
            "gluing": sorted([list(a), list(b)]
                             for a, b in self.surface.gluing.items() if a < b),
            "cells": [list(c) for c in self.cells],
            "basis": [list(c) for c in self.basis_chains],
            "absolute": [list(v) for v in self.absolute_basis],
        }
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def __repr__(self):
        return (f"HomologyFrame(m={self.m}, genus={self.genus}, "
                f"hash={self.hash})")


def homology_frame(surface: TranslationSurface) -> HomologyFrame:
    if "frame" not in surface._cache:
        surface._cache["frame"] = HomologyFrame(surface)
    return surface._cache["frame"]


def period_map(surface: TranslationSurface,
               frame: HomologyFrame | None = None) -> tuple[ComplexScalar, ...]:
    if frame is None:
        frame = homology_frame(surface)
    if frame.surface is not surface and frame.surface != surface:
        raise ValueError("frame does not belong to this surface")
    return frame.periods()


def project_absolute(frame: HomologyFrame, cocycle: Cocycle):
    return frame.project_absolute(cocycle)
