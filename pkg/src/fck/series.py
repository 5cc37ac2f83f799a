"""Truncated formal power series over a scalar backend.

A TruncatedSeries stores coefficients 0..order; the order IS the valid
order, so operations that lose tail information (backward_shift) return a
shorter series rather than padding with fabricated zeros.  Binary
operations demand equal orders and backends; callers align orders
explicitly with truncate().  tail_sum_series implements
(h(z) - h(1)) / (z - 1) and requires the true value h(1) from the caller,
never a partial coefficient sum.
"""

from __future__ import annotations

from .errors import (
    BackendError,
    CompositionDomainError,
    DimensionError,
    ReversionDomainError,
    SeriesDivisionError,
)


class TruncatedSeries:
    __slots__ = ("backend", "coeffs")

    def __init__(self, backend, coeffs):
        self.backend = backend
        self.coeffs = tuple(backend.convert(c) for c in coeffs)
        if not self.coeffs:
            raise DimensionError("a series needs at least the constant coefficient")

    # -- constructors ---------------------------------------------------

    @staticmethod
    def from_coeffs(backend, coeffs):
        return TruncatedSeries(backend, coeffs)

    @staticmethod
    def zero(backend, order):
        return TruncatedSeries(backend, [0] * (order + 1))

    @staticmethod
    def one(backend, order):
        return TruncatedSeries(backend, [1] + [0] * order)

    @staticmethod
    def constant(backend, value, order):
        return TruncatedSeries(backend, [value] + [0] * order)

    @staticmethod
    def identity(backend, order):
        """The series z."""
        if order < 1:
            raise DimensionError("identity series needs order >= 1")
        return TruncatedSeries(backend, [0, 1] + [0] * (order - 1))

    # -- basic accessors ------------------------------------------------

    @property
    def order(self):
        return len(self.coeffs) - 1

    def coefficient(self, k):
        if not 0 <= k <= self.order:
            raise DimensionError(f"coefficient {k} outside valid order {self.order}")
        return self.coeffs[k]

    def truncate(self, order):
        if order > self.order:
            raise DimensionError(
                f"cannot extend a series of order {self.order} to {order}"
            )
        return TruncatedSeries(self.backend, self.coeffs[: order + 1])

    def __repr__(self):
        shown = ", ".join(self.backend.format(c) for c in self.coeffs[:6])
        tail = ", ..." if self.order > 5 else ""
        return f"TruncatedSeries[{self.backend.name}, order={self.order}]({shown}{tail})"

    # -- arithmetic -----------------------------------------------------

    def _check(self, other):
        if not isinstance(other, TruncatedSeries):
            raise BackendError(f"expected a series, got {other!r}")
        if other.backend is not self.backend:
            raise BackendError("series from different scalar backends")
        if other.order != self.order:
            raise DimensionError(
                f"series orders differ: {self.order} vs {other.order}"
            )
        return other

    def __add__(self, other):
        other = self._check(other)
        return TruncatedSeries(
            self.backend, [a + b for a, b in zip(self.coeffs, other.coeffs)]
        )

    def __sub__(self, other):
        other = self._check(other)
        return TruncatedSeries(
            self.backend, [a - b for a, b in zip(self.coeffs, other.coeffs)]
        )

    def __neg__(self):
        return TruncatedSeries(self.backend, [-a for a in self.coeffs])

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            c = self.backend.convert(other)
            return TruncatedSeries(self.backend, [a * c for a in self.coeffs])
        other = self._check(other)
        n = self.order
        a, b = self.coeffs, other.coeffs
        out = [self.backend.zero] * (n + 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j in range(0, n + 1 - i):
                bj = b[j]
                if bj != 0:
                    out[i + j] += ai * bj
        return TruncatedSeries(self.backend, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, TruncatedSeries):
            c = self.backend.convert(other)
            if c == 0:
                raise SeriesDivisionError("division of series by scalar zero")
            return TruncatedSeries(self.backend, [a / c for a in self.coeffs])
        other = self._check(other)
        if other.coeffs[0] == 0:
            raise SeriesDivisionError(
                "series division needs a divisor with nonzero constant term"
            )
        n = self.order
        b0 = other.coeffs[0]
        out = [self.backend.zero] * (n + 1)
        for k in range(n + 1):
            acc = self.coeffs[k]
            for j in range(1, k + 1):
                bj = other.coeffs[j]
                if bj != 0:
                    acc -= bj * out[k - j]
            out[k] = acc / b0
        return TruncatedSeries(self.backend, out)

    def add_constant(self, value):
        c = self.backend.convert(value)
        return TruncatedSeries(self.backend, (self.coeffs[0] + c,) + self.coeffs[1:])

    def shift_up(self, k=1):
        """Multiply by z^k.  All shifted coefficients stay valid, so the order grows."""
        if k < 0:
            raise DimensionError("shift_up needs k >= 0")
        return TruncatedSeries(
            self.backend, (self.backend.zero,) * k + self.coeffs
        )

    # -- comparisons ----------------------------------------------------

    def agrees(self, other, tol=None, through=None):
        """Coefficientwise agreement up to the common valid order."""
        if other.backend is not self.backend:
            raise BackendError("series from different scalar backends")
        upto = min(self.order, other.order)
        if through is not None:
            if through > upto:
                raise DimensionError(
                    f"cannot compare through order {through}: only {upto} valid"
                )
            upto = through
        return all(
            self.backend.eq(self.coeffs[k], other.coeffs[k], tol)
            for k in range(upto + 1)
        )

    def max_delta(self, other, through=None):
        upto = min(self.order, other.order)
        if through is not None:
            upto = min(upto, through)
        return max(
            self.backend.abs_delta(self.coeffs[k], other.coeffs[k])
            for k in range(upto + 1)
        )


def compose(f, g):
    """f(g(z)) through the common order; g must have zero constant term."""
    if f.backend is not g.backend:
        raise BackendError("series from different scalar backends")
    if g.coeffs[0] != 0:
        raise CompositionDomainError(
            "composition needs an inner series with zero constant term"
        )
    n = min(f.order, g.order)
    f, g = f.truncate(n), g.truncate(n)
    result = TruncatedSeries.constant(f.backend, f.coeffs[n], n)
    for k in range(n - 1, -1, -1):
        result = (result * g).add_constant(f.coeffs[k])
    return result


def revert(f):
    """Compositional inverse g with f(g(z)) = z through f's order.

    Needs f(0) = 0 and f'(0) != 0.  Solved coefficient by coefficient: the
    error of the current truncation at order m is corrected through the
    linear coefficient.
    """
    if f.coeffs[0] != 0:
        raise ReversionDomainError("reversion needs a series vanishing at 0")
    if f.order < 1 or f.coeffs[1] == 0:
        raise ReversionDomainError("reversion needs a nonzero linear coefficient")
    n = f.order
    backend = f.backend
    f1 = f.coeffs[1]
    g = [backend.zero] * (n + 1)
    g[1] = backend.one / f1
    for m in range(2, n + 1):
        trial = TruncatedSeries(backend, g[: m + 1])
        err = compose(f.truncate(m), trial).coeffs[m]
        g[m] -= err / f1
    return TruncatedSeries(backend, g)


def backward_shift(h, k=1):
    """Drop the k lowest coefficients: coefficient j of the result is h_{j+k}.

    Coefficients beyond the input's order are unknown, so the result's
    order shrinks to order - k.
    """
    if k < 0:
        raise DimensionError("backward_shift needs k >= 0")
    if k == 0:
        return h
    if k > h.order:
        raise DimensionError(
            f"cannot shift a series of order {h.order} down by {k}"
        )
    return TruncatedSeries(h.backend, h.coeffs[k:])


def tail_sum_series(h, h_at_one):
    """The series with j-th coefficient sum_{k>j} h_k, i.e. (h(z) - h(1)) / (z - 1).

    `h_at_one` must be the full sum of h's coefficients, supplied from a
    closed form or a tail-bounded evaluation; partial sums of a truncation
    are not accepted as a substitute.
    """
    total = h.backend.convert(h_at_one)
    out = []
    partial = h.backend.zero
    for c in h.coeffs:
        partial += c
        out.append(total - partial)
    return TruncatedSeries(h.backend, out)


def geometric(backend, order):
    """z / (1 - z): coefficients 0, 1, 1, 1, ..."""
    return TruncatedSeries(backend, [0] + [1] * order)


def series_to_json(s):
    return {
        "order": s.order,
        "backend": s.backend.name,
        "coeffs": [s.backend.format(c) for c in s.coeffs],
    }


def series_from_json(obj, backend):
    if obj.get("backend") != backend.name:
        raise BackendError(
            f"series file is {obj.get('backend')!r} but the session backend is {backend.name!r}"
        )
    coeffs = [backend.convert(c) for c in obj["coeffs"]]
    if len(coeffs) != obj["order"] + 1:
        raise DimensionError("series file order does not match coefficient count")
    return TruncatedSeries(backend, coeffs)
