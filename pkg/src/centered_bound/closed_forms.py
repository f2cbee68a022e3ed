"""Piecewise closed forms for four bounds (1, 1, 1, X) in half-sinh units.

There is one tree with four slots.  Up to symmetry only two assignments
matter: X on a slot of the non-root vertex ("identity") or X on a root slot
("sigma").  The bound is the identity branch for X <= 1 and the sigma branch
beyond, and it stops changing once X passes sqrt(3).
"""

import math

SQRT3 = math.sqrt(3.0)
_UNIT_PAIR_AREA = 2.0 * math.asin(0.5)  # pi/3, the semicyclic (1, 1) triangle


def _leaf_with_x(x):
    return 2.0 * math.asin(x / math.sqrt(2.0 * (x * x + 1.0)))


def identity_low(x):
    return _leaf_with_x(x) + 2.0 * math.acos((5.0 + x * x) / (4.0 * math.sqrt(x * x + 2.0)))


def identity_high(x):
    return _leaf_with_x(x) + _UNIT_PAIR_AREA


def sigma_low(x):
    return _UNIT_PAIR_AREA + _leaf_with_x(x)


def sigma_mid(x):
    return _UNIT_PAIR_AREA + 2.0 * math.acos((5.0 + x * x) / (2.0 * math.sqrt(6.0 * (x * x + 1.0))))


def sigma_high(x=None):
    return _UNIT_PAIR_AREA + 2.0 * math.asin(1.0 / SQRT3)


def identity_case(x):
    return identity_low(x) if x <= 1.0 else identity_high(x)


def sigma_case(x):
    if x <= 1.0:
        return sigma_low(x)
    if x <= SQRT3:
        return sigma_mid(x)
    return sigma_high()


def bound(x):
    """The minimum of the two cases."""
    return identity_case(x) if x <= 1.0 else sigma_case(x)


PLATEAU = sigma_high()
