"""Exact arithmetic in Q and in real quadratic fields Q(sqrt(d)).

A scalar is a + b*sqrt(d) with a, b rational and d a square-free
non-negative integer (d = 0 encodes the base field Q, in which case b
is forced to 0).  All comparisons are decided exactly by
square-and-compare; there is no floating point anywhere.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache

__all__ = [
    "FieldCtx",
    "FieldScalar",
    "Vec2",
    "Mat2",
    "QQ",
    "parse_scalar",
    "scalar_sign",
    "unify_ctx",
]

_Rat = int | Fraction


def _is_square_free(n: int) -> bool:
    if n < 0:
        return False
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


@lru_cache(maxsize=None)
def _ctx(d: int) -> "FieldCtx":
    return FieldCtx.__new_raw__(d)


class FieldCtx:
    """The coefficient field Q(sqrt(d)); d = 0 means Q itself."""

    __slots__ = ("d",)

    def __init__(self, d: int):
        raise TypeError("use FieldCtx.get(d)")

    @classmethod
    def __new_raw__(cls, d: int) -> "FieldCtx":
        if d == 1 or not _is_square_free(d):
            raise ValueError(f"d must be square-free and != 1, got {d}")
        self = object.__new__(cls)
        object.__setattr__(self, "d", d)
        return self

    @staticmethod
    def get(d: int) -> "FieldCtx":
        return _ctx(int(d))

    def __setattr__(self, *a):  # contexts are immutable
        raise AttributeError("FieldCtx is immutable")

    def __repr__(self) -> str:
        return f"FieldCtx(d={self.d})"

    def scalar(self, a: _Rat | str, b: _Rat = 0) -> "FieldScalar":
        if isinstance(a, str):
            s = parse_scalar(a, self)
            if b:
                raise ValueError("b must be omitted when parsing a string")
            return s
        return FieldScalar(a, b, self)

    def zero(self) -> "FieldScalar":
        return FieldScalar(0, 0, self)

    def one(self) -> "FieldScalar":
        return FieldScalar(1, 0, self)

    def sqrt_gen(self) -> "FieldScalar":
        """The generator sqrt(d); requires d > 0."""
        if self.d == 0:
            raise ValueError("Q has no irrational generator")
        return FieldScalar(0, 1, self)


QQ = FieldCtx.get(0)


class FieldScalar:
    """An exact element a + b*sqrt(d) of Q(sqrt(d))."""

    __slots__ = ("a", "b", "ctx", "_hash")

    def __init__(self, a: _Rat, b: _Rat = 0, ctx: FieldCtx = QQ):
        a = Fraction(a)
        b = Fraction(b)
        if ctx.d == 0 and b != 0:
            raise ValueError("irrational part requires d > 0")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, *a):
        raise AttributeError("FieldScalar is immutable")

    # -- coercion -----------------------------------------------------

    def _lift(self, other) -> "FieldScalar | None":
        if isinstance(other, FieldScalar):
            if other.ctx is self.ctx:
                return other
            if other.b == 0:
                return FieldScalar(other.a, 0, self.ctx)
            if self.b == 0:
                return other  # the caller re-lifts self
            raise ValueError(
                f"incompatible fields Q(sqrt({self.ctx.d})) and Q(sqrt({other.ctx.d}))"
            )
        if isinstance(other, (int, Fraction)):
            return FieldScalar(other, 0, self.ctx)
        return None

    def _pair(self, other):
        o = self._lift(other)
        if o is None:
            return None, None
        if o.ctx is self.ctx:
            return self, o
        return FieldScalar(self.a, 0, o.ctx), o

    # -- ring/field operations ---------------------------------------

    def __add__(self, other):
        s, o = self._pair(other)
        if s is None:
            return NotImplemented
        return FieldScalar(s.a + o.a, s.b + o.b, s.ctx)

    __radd__ = __add__

    def __sub__(self, other):
        s, o = self._pair(other)
        if s is None:
            return NotImplemented
        return FieldScalar(s.a - o.a, s.b - o.b, s.ctx)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return FieldScalar(-self.a, -self.b, self.ctx)

    def __mul__(self, other):
        s, o = self._pair(other)
        if s is None:
            return NotImplemented
        d = s.ctx.d
        return FieldScalar(s.a * o.a + d * s.b * o.b, s.a * o.b + s.b * o.a, s.ctx)

    __rmul__ = __mul__

    def inverse(self) -> "FieldScalar":
        if self.is_zero():
            raise ZeroDivisionError("division by zero field scalar")
        d = self.ctx.d
        n = self.a * self.a - d * self.b * self.b
        # n = 0 with (a, b) != 0 would make sqrt(d) rational; impossible
        return FieldScalar(self.a / n, -self.b / n, self.ctx)

    def __truediv__(self, other):
        s, o = self._pair(other)
        if s is None:
            return NotImplemented
        return s * o.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = FieldScalar(1, 0, self.ctx)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self) -> "FieldScalar":
        return FieldScalar(self.a, -self.b, self.ctx)

    # -- predicates ----------------------------------------------------

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    def as_fraction(self) -> Fraction:
        if self.b != 0:
            raise ValueError(f"{self} is irrational")
        return self.a

    def sign(self) -> int:
        """Exact sign of the real number a + b*sqrt(d)."""
        a, b, d = self.a, self.b, self.ctx.d
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return (b > 0) - (b < 0)
        sa = 1 if a > 0 else -1
        sb = 1 if b > 0 else -1
        if sa == sb:
            return sa
        # opposite signs: |a| vs |b| sqrt(d), square-free d so never equal
        return sa if a * a > d * b * b else sb

    def __eq__(self, other) -> bool:
        try:
            s, o = self._pair(other)
        except ValueError:
            return False
        if s is None:
            return NotImplemented
        return s.a == o.a and s.b == o.b

    def __lt__(self, other):
        s, o = self._pair(other)
        if s is None:
            return NotImplemented
        return (s - o).sign() < 0

    def __le__(self, other):
        s, o = self._pair(other)
        if s is None:
            return NotImplemented
        return (s - o).sign() <= 0

    def __gt__(self, other):
        return not self <= other

    def __ge__(self, other):
        return not self < other

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.a, self.b, self.ctx.d if self.b else 0))
            object.__setattr__(self, "_hash", h)
        return h

    def __bool__(self):
        return not self.is_zero()

    # -- text form -------------------------------------------------------

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        sign = "-" if self.b < 0 else "+"
        return f"{self.a}{sign}{abs(self.b)}*sqrt({self.ctx.d})"

    def __repr__(self) -> str:
        return f"FieldScalar({self})"

    def __float__(self) -> float:
        # display/rendering only; never used in predicates
        return float(self.a) + float(self.b) * (self.ctx.d ** 0.5)


_SCALAR_RE = re.compile(
    r"""^\s*
    (?P<a>[+-]?\d+(?:/\d+)?)?
    \s*
    (?:(?P<sign>[+-])?\s*(?P<b>\d+(?:/\d+)?)\s*\*\s*sqrt\(\s*(?P<d>\d+)\s*\))?
    \s*$""",
    re.VERBOSE,
)


def parse_scalar(text: str, ctx: FieldCtx | None = None) -> FieldScalar:
    """Parse "p/q" or "p/q+r/s*sqrt(d)" back into a FieldScalar.

    parse_scalar(str(x)) == x for every scalar x.
    """
    m = _SCALAR_RE.match(text)
    if not m or (m.group("a") is None and m.group("b") is None):
        raise ValueError(f"cannot parse scalar {text!r}")
    a = Fraction(m.group("a")) if m.group("a") is not None else Fraction(0)
    if m.group("b") is None:
        return FieldScalar(a, 0, ctx if ctx is not None else QQ)
    b = Fraction(m.group("b"))
    if m.group("sign") == "-":
        b = -b
    d = int(m.group("d"))
    parsed_ctx = FieldCtx.get(d)
    if ctx is not None and ctx.d != d:
        raise ValueError(f"scalar {text!r} lives in Q(sqrt({d})), expected d={ctx.d}")
    return FieldScalar(a, b, parsed_ctx)


def scalar_sign(s: FieldScalar) -> int:
    """Exact sign in {-1, 0, +1} of a + b*sqrt(d)."""
    if not isinstance(s, FieldScalar):
        s = FieldScalar(s)
    return s.sign()


def unify_ctx(*scalars: FieldScalar) -> FieldCtx:
    """The common field context; rational scalars are compatible with anything."""
    ctx = QQ
    for s in scalars:
        if s.b != 0:
            if ctx.d not in (0, s.ctx.d):
                raise ValueError(
                    f"incompatible fields Q(sqrt({ctx.d})) and Q(sqrt({s.ctx.d}))"
                )
            ctx = s.ctx
    return ctx


class Vec2:
    """A holonomy/displacement vector; x horizontal, y vertical."""

    __slots__ = ("x", "y")

    def __init__(self, x: FieldScalar | _Rat, y: FieldScalar | _Rat):
        if not isinstance(x, FieldScalar):
            x = FieldScalar(x)
        if not isinstance(y, FieldScalar):
            y = FieldScalar(y)
        ctx = unify_ctx(x, y)
        if x.ctx is not ctx:
            x = FieldScalar(x.a, x.b, ctx)
        if y.ctx is not ctx:
            y = FieldScalar(y.a, y.b, ctx)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __setattr__(self, *a):
        raise AttributeError("Vec2 is immutable")

    @property
    def ctx(self) -> FieldCtx:
        return self.x.ctx

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)

    def __neg__(self) -> "Vec2":
        return Vec2(-self.x, -self.y)

    def scale(self, s) -> "Vec2":
        return Vec2(self.x * s, self.y * s)

    def cross(self, other: "Vec2") -> FieldScalar:
        return self.x * other.y - self.y * other.x

    def dot(self, other: "Vec2") -> FieldScalar:
        return self.x * other.x + self.y * other.y

    def norm_sq(self) -> FieldScalar:
        return self.x * self.x + self.y * self.y

    def is_zero(self) -> bool:
        return self.x.is_zero() and self.y.is_zero()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Vec2):
            return NotImplemented
        return self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash((self.x, self.y))

    def __iter__(self):
        return iter((self.x, self.y))

    def __repr__(self) -> str:
        return f"Vec2({self.x}, {self.y})"


class Mat2:
    """A 2x2 matrix with field entries, acting on Vec2 by left multiplication."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        for name, v in zip("abcd", (a, b, c, d)):
            if not isinstance(v, FieldScalar):
                v = FieldScalar(v)
            object.__setattr__(self, name, v)

    def __setattr__(self, *a):
        raise AttributeError("Mat2 is immutable")

    @staticmethod
    def identity() -> "Mat2":
        return Mat2(1, 0, 0, 1)

    @staticmethod
    def shear(t) -> "Mat2":
        """The horizontal shear [[1, t], [0, 1]]."""
        return Mat2(1, t, 0, 1)

    @staticmethod
    def vertical_scale(s) -> "Mat2":
        """The stretch [[1, 0], [0, s]]."""
        return Mat2(1, 0, 0, s)

    @staticmethod
    def direction_normalizer(v: Vec2) -> "Mat2":
        """Rotation-scaling [[vx, vy], [-vy, vx]] sending v to (|v|^2, 0)."""
        if v.is_zero():
            raise ValueError("cannot normalize the zero direction")
        return Mat2(v.x, v.y, -v.y, v.x)

    def det(self) -> FieldScalar:
        return self.a * self.d - self.b * self.c

    def apply(self, v: Vec2) -> Vec2:
        return Vec2(self.a * v.x + self.b * v.y, self.c * v.x + self.d * v.y)

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "Mat2":
        det = self.det()
        if det.is_zero():
            raise ZeroDivisionError("singular matrix")
        return Mat2(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def __eq__(self, other):
        if not isinstance(other, Mat2):
            return NotImplemented
        return (self.a, self.b, self.c, self.d) == (other.a, other.b, other.c, other.d)

    def __hash__(self):
        return hash((self.a, self.b, self.c, self.d))

    def __repr__(self):
        return f"Mat2([[{self.a}, {self.b}], [{self.c}, {self.d}]])"
