from fractions import Fraction

import pytest

from flatdef.field import FieldCtx, FieldScalar, Vec2
from flatdef.surface import TranslationSurface, l_shape, square_tiled

Q5 = FieldCtx.get(5)
PHI = FieldScalar(Fraction(1, 2), Fraction(1, 2), Q5)


@pytest.fixture(scope="session")
def torus():
    return square_tiled([], [], n=1, label="torus")


@pytest.fixture(scope="session")
def l_origami():
    return square_tiled([(1, 2)], [(1, 3)], n=3, label="l-origami")


@pytest.fixture(scope="session")
def golden_l():
    return l_shape(PHI, 1, 1, PHI - 1, label="golden-l")


@pytest.fixture(scope="session")
def marked_torus():
    """Unit torus with two marked points on one horizontal leaf."""
    a = Fraction(1, 2)
    polys = [
        [Vec2(a, 0), Vec2(0, 1), Vec2(-a, 0), Vec2(0, -1)],
        [Vec2(1 - a, 0), Vec2(0, 1), Vec2(a - 1, 0), Vec2(0, -1)],
    ]
    gluing = [((0, 1), (1, 3)), ((1, 1), (0, 3)),
              ((0, 2), (0, 0)), ((1, 2), (1, 0))]
    return TranslationSurface(polys, gluing, "marked-torus")
