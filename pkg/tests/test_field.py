from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from flatdef.field import FieldCtx, FieldScalar, Mat2, QQ, Vec2, parse_scalar

Q5 = FieldCtx.get(5)
Q2 = FieldCtx.get(2)


def s5(a, b=0):
    return FieldScalar(a, b, Q5)


class TestSign:
    def test_zero(self):
        assert s5(0, 0).sign() == 0

    def test_one_minus_sqrt5(self):
        assert s5(1, -1).sign() == -1

    def test_minus3_plus_2sqrt2(self):
        assert FieldScalar(-3, 2, Q2).sign() == -1

    def test_rational_cases(self):
        assert FieldScalar(Fraction(3, 7)).sign() == 1
        assert FieldScalar(-2).sign() == -1

    def test_golden_ratio_positive(self):
        phi = s5(Fraction(1, 2), Fraction(1, 2))
        assert phi.sign() == 1
        assert (phi * phi - phi - 1).is_zero()


rationals = st.fractions(min_value=-10**6, max_value=10**6, max_denominator=10**4)


@st.composite
def field_scalars(draw):
    d = draw(st.sampled_from([0, 2, 3, 5, 7]))
    a = draw(rationals)
    b = draw(rationals) if d else Fraction(0)
    return FieldScalar(a, b, FieldCtx.get(d))


class TestScalarProperties:
    @given(field_scalars())
    def test_sign_antisymmetry(self, s):
        assert s.sign() * (-s).sign() in (0, -1)
        assert (s * s).sign() >= 0

    @given(field_scalars())
    def test_parse_print_roundtrip(self, s):
        assert parse_scalar(str(s)) == s

    @given(field_scalars(), field_scalars())
    def test_ring_ops(self, x, y):
        try:
            assert x + y - y == x
            assert (x * y) - (y * x) == 0
        except ValueError:
            assert x.b != 0 and y.b != 0 and x.ctx.d != y.ctx.d

    @given(field_scalars())
    def test_inverse(self, x):
        if not x.is_zero():
            assert (x * x.inverse() - 1).is_zero()

    @given(field_scalars(), field_scalars())
    def test_order_total(self, x, y):
        if x.ctx.d in (0, y.ctx.d) or y.b == 0 or x.b == 0:
            assert (x < y) or (x == y) or (y < x)


class TestParse:
    def test_examples(self):
        assert parse_scalar("3/4") == FieldScalar(Fraction(3, 4))
        assert parse_scalar("-2") == FieldScalar(-2)
        x = parse_scalar("1/2+3/2*sqrt(5)")
        assert x == s5(Fraction(1, 2), Fraction(3, 2))
        y = parse_scalar("0-1*sqrt(2)")
        assert y == FieldScalar(0, -1, Q2)

    def test_rejects_garbage(self):
        with pytest.raises(ValueError):
            parse_scalar("1.5")
        with pytest.raises(ValueError):
            parse_scalar("")
        with pytest.raises(ValueError):
            parse_scalar("sqrt(4)")

    def test_rejects_non_square_free(self):
        with pytest.raises(ValueError):
            FieldCtx.get(4)
        with pytest.raises(ValueError):
            FieldCtx.get(1)
        with pytest.raises(ValueError):
            FieldCtx.get(12)


class TestCtx:
    def test_ctx_identity_cached(self):
        assert FieldCtx.get(5) is Q5

    def test_rational_mixes_with_any_field(self):
        x = FieldScalar(2)
        y = s5(1, 1)
        assert (x + y) == s5(3, 1)

    def test_incompatible_fields_raise(self):
        with pytest.raises(ValueError):
            _ = s5(1, 1) + FieldScalar(1, 1, Q2)

    def test_d_zero_with_irrational_part_raises(self):
        with pytest.raises(ValueError):
            FieldScalar(1, 1, QQ)


class TestVecMat:
    def test_cross_and_dot(self):
        u = Vec2(1, 2)
        v = Vec2(3, 4)
        assert u.cross(v) == FieldScalar(-2)
        assert u.dot(v) == FieldScalar(11)

    def test_direction_normalizer(self):
        v = Vec2(1, 2)
        g = Mat2.direction_normalizer(v)
        assert g.apply(v) == Vec2(5, 0)
        assert g.det() == FieldScalar(5)

    def test_matrix_inverse(self):
        g = Mat2(1, 2, -2, 1)
        gi = g.inverse()
        assert (g @ gi) == Mat2.identity()

    def test_shear(self):
        u = Mat2.shear(Fraction(1, 3))
        assert u.apply(Vec2(0, 1)) == Vec2(Fraction(1, 3), 1)
