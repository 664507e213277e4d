from fractions import Fraction

import pytest

from flatdef.errors import (
    GluingMismatch,
    NonClosedPolygon,
    NonPositiveLength,
    NonSimplePolygon,
    NotConnected,
    SingularMatrix,
)
from flatdef.field import FieldCtx, FieldScalar, Mat2, Vec2
from flatdef.surface import TranslationSurface, l_shape, square_tiled, validate

Q5 = FieldCtx.get(5)
PHI = FieldScalar(Fraction(1, 2), Fraction(1, 2), Q5)


def torus():
    return square_tiled([], [], n=1, label="torus")


def l_origami():
    return square_tiled([(1, 2)], [(1, 3)], n=3, label="l-origami")


def golden_l():
    return l_shape(PHI, 1, 1, PHI - 1, label="golden-l")


class TestValidate:
    def test_torus(self):
        data = validate(torus())
        assert data.genus == 1
        assert data.signature == (0,)
        assert data.num_points == 1

    def test_l_origami(self):
        data = validate(l_origami())
        assert data.genus == 2
        assert data.signature == (2,)
        assert data.num_points == 1

    def test_golden_l(self):
        surf = golden_l()
        data = validate(surf)
        assert data.genus == 2
        assert data.signature == (2,)
        # area = phi + (phi - 1) = sqrt(5)
        assert surf.area() == FieldScalar(0, 1, Q5)

    def test_unit_l_shape_matches_origami_stratum(self):
        data = validate(l_shape(2, 1, 1, 1))
        assert data.genus == 2
        assert data.signature == (2,)

    def test_gluing_mismatch(self):
        one, zero = FieldScalar(1), FieldScalar(0)
        polys = [[Vec2(one, zero), Vec2(zero, one), Vec2(-one, zero),
                  Vec2(zero, -one)]]
        # glue bottom to right: vectors not opposite
        gluing = [((0, 0), (0, 1)), ((0, 2), (0, 3))]
        with pytest.raises(GluingMismatch):
            validate(TranslationSurface(polys, gluing))

    def test_non_closed_polygon(self):
        polys = [[Vec2(1, 0), Vec2(0, 1), Vec2(-1, 0), Vec2(0, -2)]]
        gluing = [((0, 0), (0, 2)), ((0, 1), (0, 3))]
        with pytest.raises(NonClosedPolygon):
            validate(TranslationSurface(polys, gluing))

    def test_self_intersecting_polygon(self):
        polys = [[Vec2(2, 0), Vec2(-1, 1), Vec2(0, -2), Vec2(-1, 1)]]
        gluing = [((0, 0), (0, 2)), ((0, 1), (0, 3))]
        with pytest.raises((NonSimplePolygon, NonClosedPolygon)):
            validate(TranslationSurface(polys, gluing))

    def test_incomplete_gluing(self):
        polys = [[Vec2(1, 0), Vec2(0, 1), Vec2(-1, 0), Vec2(0, -1)]]
        with pytest.raises(GluingMismatch):
            TranslationSurface(polys, [((0, 0), (0, 2))])


class TestConstructors:
    def test_torus_area(self):
        assert torus().area() == FieldScalar(1)

    def test_origami_area_is_square_count(self):
        assert l_origami().area() == FieldScalar(3)

    def test_origami_not_connected(self):
        with pytest.raises(NotConnected):
            square_tiled([], [], n=2)

    def test_l_shape_bad_lengths(self):
        with pytest.raises(NonPositiveLength):
            l_shape(1, 1, 0, 1)
        with pytest.raises(NonPositiveLength):
            l_shape(1, 1, 1, 1)  # needs w2 < w1

    def test_golden_area_identity(self):
        # phi^2 = phi + 1 forces area phi + (phi-1) = 2 phi - 1 = sqrt 5
        s = golden_l()
        assert s.area() == 2 * PHI - 1


class TestGL2:
    def test_identity_fixed(self):
        m = torus()
        assert m.apply_matrix(Mat2.identity()) == m

    def test_shear_torus(self):
        m = torus().apply_matrix(Mat2.shear(1))
        assert m.polygons[0][0] == Vec2(1, 0)
        assert m.polygons[0][1] == Vec2(1, 1)
        validate(m)

    def test_direction_mapping(self):
        g = Mat2(1, 2, -2, 1)
        assert g.apply(Vec2(1, 2)) == Vec2(5, 0)

    def test_singular_matrix(self):
        with pytest.raises(SingularMatrix):
            torus().apply_matrix(Mat2(1, 1, 1, 1))

    def test_orientation_reversing(self):
        m = torus().apply_matrix(Mat2(1, 0, 0, -1))
        data = validate(m)
        assert data.genus == 1
        assert m.area() == FieldScalar(1)

    def test_area_scales_by_det(self):
        g = Mat2(1, 2, -2, 1)
        m = l_origami().apply_matrix(g)
        assert m.area() == FieldScalar(15)
        data = validate(m)
        assert data.signature == (2,)
