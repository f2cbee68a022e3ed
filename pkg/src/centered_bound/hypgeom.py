"""Closed-form hyperbolic triangle measurements.

Every length is carried as ``s = sinh(length / 2)``.  In that parametrization
cosh(length/2) = sqrt(1 + s^2) and tanh(length/2) = s / sqrt(1 + s^2), so
all formulas below are algebraic in ``s`` up to a final inverse trig call.
"""

import math

from .errors import DomainError

#: inverse-trig arguments this far outside [-1, 1] are treated as roundoff
CLAMP_EPS = 1e-9


class HalfSinhLength(float):
    """A positive hyperbolic length stored as ``sinh(length / 2)``."""

    __slots__ = ()

    def __new__(cls, s):
        s = float(s)
        if not s > 0.0 or math.isinf(s):
            raise ValueError(f"half-sinh length must be positive and finite, got {s!r}")
        return super().__new__(cls, s)

    @classmethod
    def from_length(cls, length):
        return cls(math.sinh(float(length) / 2.0))

    @property
    def s(self):
        return float(self)

    @property
    def length(self):
        return 2.0 * math.asinh(float(self))

    def __repr__(self):
        return f"HalfSinhLength({float(self)!r})"


def _positive(*values):
    for v in values:
        if not v > 0.0 or math.isinf(v):
            raise DomainError(f"side parameters must be positive and finite: {values!r}", values)


def clamped(x, what, args):
    """Pull ``x`` into [-1, 1] if it is only roundoff away, else raise."""
    if x > 1.0:
        if x - 1.0 > CLAMP_EPS:
            raise DomainError(f"{what} argument {x!r} > 1 for sides {args!r}", args)
        return 1.0
    if x < -1.0:
        if -1.0 - x > CLAMP_EPS:
            raise DomainError(f"{what} argument {x!r} < -1 for sides {args!r}", args)
        return -1.0
    return x


def heron_area_sq(a2, b2, c2, args=None):
    """Triangle area from squared half-sinh sides.

    The area D satisfies cos(D/2) = N / M with N = a2 + b2 + c2 + 2 and
    M = 2 sqrt((1 + a2)(1 + b2)(1 + c2)).  Expanding M^2 - N^2 gives the
    polynomial below, which stays accurate for small triangles where the
    cosine rounds to 1.
    """
    num = a2 + b2 + c2 + 2.0
    den = 2.0 * math.sqrt((1.0 + a2) * (1.0 + b2) * (1.0 + c2))
    clamped(num / den, "acos", args if args is not None else (a2, b2, c2))
    disc = 2.0 * (a2 * b2 + b2 * c2 + c2 * a2) - (a2 * a2 + b2 * b2 + c2 * c2) + 4.0 * a2 * b2 * c2
    return 2.0 * math.atan2(math.sqrt(max(disc, 0.0)), num)


def triangle_area(a, b, c):
    """Area of the compact hyperbolic triangle with half-sinh sides a, b, c.

    Raises DomainError when the sides violate the triangle inequality by
    more than roundoff.
    """
    _positive(a, b, c)
    return heron_area_sq(a * a, b * b, c * c, (a, b, c))


def semicyclic_radius(a, b):
    """Longest side of the semicyclic triangle with shorter sides a, b.

    That side is a circumdiameter, so this is also twice the circumradius.
    """
    _positive(a, b)
    return HalfSinhLength(math.sqrt(a * a + b * b))


def semicyclic_area(a, b):
    """Area of the semicyclic triangle with shorter sides a, b."""
    _positive(a, b)
    x = a * b / math.sqrt((1.0 + a * a) * (1.0 + b * b))
    return 2.0 * math.asin(x)


def a_m(d):
    """Area of the semicyclic triangle with both shorter sides equal to d."""
    return semicyclic_area(d, d)
