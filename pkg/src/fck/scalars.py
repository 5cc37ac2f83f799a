"""Scalar backends: exact rationals and high-precision binary floats.

Everything in this package is generic over one of two scalar backends.
EXACT computes with `fractions.Fraction`; equality is literal and results
are reproducible bit for bit.  A FloatBackend wraps an independent mpmath
context with a fixed decimal precision (default 100 significant digits)
and a comparison tolerance (default 1e-40).  Values from different
backends never mix: container types carry their backend and reject
cross-backend operands.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath

from .errors import BackendError


class ExactBackend:
    """Arbitrary-precision rational arithmetic over fractions.Fraction."""

    name = "exact"
    exact = True

    def convert(self, value):
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, str):
            return Fraction(value)
        raise BackendError(f"cannot convert {value!r} to an exact rational")

    def owns(self, value):
        return isinstance(value, (Fraction, int))

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def eq(self, a, b, tol=None):
        return a == b

    def is_zero(self, a, tol=None):
        return a == 0

    def abs_delta(self, a, b):
        return abs(a - b)

    def format(self, a):
        return str(Fraction(a))

    def to_float(self, a):
        return float(a)

    def __repr__(self):
        return "ExactBackend()"


class FloatBackend:
    """Binary floating point on a private mpmath context.

    Each instance clones the mpmath context, so two backends with different
    precisions coexist without touching global state.  `tolerance` is the
    default threshold for eq/is_zero; operations that certify their own
    error pass an explicit one.
    """

    name = "float"
    exact = False

    def __init__(self, dps=100, tolerance=None):
        self.ctx = mpmath.mp.clone()
        self.ctx.dps = dps
        self.dps = dps
        if tolerance is None:
            self.tolerance = self.ctx.mpf(10) ** (-40)
        else:
            self.tolerance = self.convert(tolerance)

    def convert(self, value):
        ctx = self.ctx
        if isinstance(value, ctx.mpf):
            return value
        if isinstance(value, int):
            return ctx.mpf(value)
        if isinstance(value, Fraction):
            return ctx.mpf(value.numerator) / value.denominator
        if isinstance(value, str):
            if "/" in value:
                fr = Fraction(value)
                return ctx.mpf(fr.numerator) / fr.denominator
            return ctx.mpf(value)
        if isinstance(value, float):
            return ctx.mpf(value)
        if isinstance(value, mpmath.mpf):
            # value from another context: re-round into this one
            return ctx.mpf(value)
        raise BackendError(f"cannot convert {value!r} to a float scalar")

    def owns(self, value):
        return isinstance(value, (self.ctx.mpf, int))

    @property
    def zero(self):
        return self.ctx.mpf(0)

    @property
    def one(self):
        return self.ctx.mpf(1)

    def eq(self, a, b, tol=None):
        t = self.tolerance if tol is None else self.convert(tol)
        return abs(a - b) <= t

    def is_zero(self, a, tol=None):
        t = self.tolerance if tol is None else self.convert(tol)
        return abs(a) <= t

    def abs_delta(self, a, b):
        return abs(a - b)

    def format(self, a):
        return self.ctx.nstr(a, self.dps, strip_zeros=True)

    def to_float(self, a):
        return float(a)

    def __repr__(self):
        return f"FloatBackend(dps={self.dps})"


EXACT = ExactBackend()
FLOAT = FloatBackend()


def get_backend(name, precision=100, tolerance=None):
    """Resolve a backend from its CLI name."""
    if name == "exact":
        return EXACT
    if name == "float":
        if precision == FLOAT.dps and tolerance is None:
            return FLOAT
        return FloatBackend(dps=precision, tolerance=tolerance)
    raise BackendError(f"unknown backend {name!r} (expected 'exact' or 'float')")


def same_backend(*backends):
    first = backends[0]
    for b in backends[1:]:
        if b is not first:
            raise BackendError(f"mixed scalar backends: {first!r} vs {b!r}")
    return first
