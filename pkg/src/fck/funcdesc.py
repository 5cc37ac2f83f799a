"""Descriptors for functions applied to a single positive element.

Polynomials are exact-backend friendly.  The named rational forms
x/(1-x), 1/(1-x), x/(1-x)^2 and 1/x are float-only: before evaluation
they are replaced by truncated expansions whose remainder carries a
certified operator-norm bound derived from a declared spectral interval.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import CapabilityError, DimensionError, DomainError

POLY = "poly"
PSI = "psi"            # x / (1 - x)
INV1M = "inv1m"        # 1 / (1 - x)
XINV1MSQ = "xinv1msq"  # x / (1 - x)^2
INV = "inv"            # 1 / x


@dataclass(frozen=True)
class FunctionDescriptor:
    kind: str
    coeffs: tuple = ()

    # -- constructors ---------------------------------------------------

    @staticmethod
    def poly(coeffs):
        cs = tuple(coeffs)
        while len(cs) > 1 and cs[-1] == 0:
            cs = cs[:-1]
        return FunctionDescriptor(POLY, cs)

    @staticmethod
    def monomial(r):
        if r < 0:
            raise DomainError("monomial power must be nonnegative")
        return FunctionDescriptor.poly((0,) * r + (1,))

    @staticmethod
    def identity():
        return FunctionDescriptor.poly((0, 1))

    @staticmethod
    def constant(c):
        return FunctionDescriptor.poly((c,))

    @staticmethod
    def psi():
        return FunctionDescriptor(PSI)

    @staticmethod
    def inv1m():
        return FunctionDescriptor(INV1M)

    @staticmethod
    def xinv1msq():
        return FunctionDescriptor(XINV1MSQ)

    @staticmethod
    def inv():
        return FunctionDescriptor(INV)

    # -- inspection -----------------------------------------------------

    @property
    def is_polynomial(self):
        return self.kind == POLY

    @property
    def degree(self):
        if self.kind != POLY:
            raise CapabilityError(f"{self.kind} has no polynomial degree")
        return len(self.coeffs) - 1

    def series_coefficient(self, k):
        """Power-series coefficient of x^k around 0 (geometric family only)."""
        if self.kind == POLY:
            return self.coeffs[k] if k < len(self.coeffs) else 0
        if self.kind == PSI:
            return 1 if k >= 1 else 0
        if self.kind == INV1M:
            return 1
        if self.kind == XINV1MSQ:
            return k
        raise CapabilityError(f"{self.kind} has no expansion around 0")

    def tail_bound(self, K, rho, backend):
        """Certified bound on sum_{k>K} |a_k| rho^k for spectrum in [0, rho]."""
        rho = backend.convert(rho)
        one = backend.one
        if self.kind == POLY:
            return backend.zero
        if not rho < one:
            raise CapabilityError(
                f"{self.kind} needs a spectral bound rho < 1, got {backend.format(rho)}"
            )
        if self.kind in (PSI, INV1M):
            return rho ** (K + 1) / (one - rho)
        if self.kind == XINV1MSQ:
            return rho ** (K + 1) * ((K + 1) * (one - rho) + rho) / (one - rho) ** 2
        raise CapabilityError(f"{self.kind} has no expansion around 0")

    def evaluate(self, x, backend):
        """Pointwise value at a scalar x from the backend."""
        x = backend.convert(x)
        if self.kind == POLY:
            acc = backend.zero
            for c in reversed(self.coeffs):
                acc = acc * x + backend.convert(c)
            return acc
        if self.kind == PSI:
            return x / (backend.one - x)
        if self.kind == INV1M:
            return backend.one / (backend.one - x)
        if self.kind == XINV1MSQ:
            return x / (backend.one - x) ** 2
        if self.kind == INV:
            return backend.one / x
        raise CapabilityError(f"cannot evaluate descriptor kind {self.kind}")

    def label(self):
        if self.kind == POLY:
            return "poly:" + ",".join(str(c) for c in self.coeffs)
        return self.kind

    def __str__(self):
        return self.label()


def parse_descriptor(text):
    """Parse CLI descriptors like poly:0,1 | id | mono:3 | const:2 | psi | inv1m."""
    text = text.strip()
    if text.startswith("poly:"):
        return FunctionDescriptor.poly([Fraction(t) for t in text[5:].split(",")])
    if text.startswith("mono:"):
        return FunctionDescriptor.monomial(int(text[5:]))
    if text.startswith("const:"):
        return FunctionDescriptor.constant(Fraction(text[6:]))
    if text == "id":
        return FunctionDescriptor.identity()
    if text in (PSI, INV1M, XINV1MSQ, INV):
        return FunctionDescriptor(text)
    raise DomainError(f"unrecognized function descriptor {text!r}")


def poly_mul(a, b):
    """Coefficient tuples of the product of two polynomials."""
    if not a or not b:
        raise DimensionError("polynomial factors must be nonempty")
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            if bj != 0:
                out[i + j] += ai * bj
    return tuple(out)


def poly_norm_bound(coeffs, hi, backend):
    """sum_k |c_k| hi^k bounds the operator norm of the polynomial on [0, hi]."""
    hi = backend.convert(hi)
    acc = backend.zero
    p = backend.one
    for c in coeffs:
        acc += abs(backend.convert(c)) * p
        p = p * hi
    return acc


def geometric_truncation(desc, degree, support_hi, backend):
    """Replace a geometric-family descriptor by a degree-`degree` polynomial.

    Returns (coefficient tuple, certified remainder norm) for spectrum in
    [0, support_hi] with support_hi < 1.
    """
    if desc.kind == POLY:
        return desc.coeffs, backend.zero
    coeffs = tuple(
        backend.convert(desc.series_coefficient(k)) for k in range(degree + 1)
    )
    rem = desc.tail_bound(degree, support_hi, backend)
    return coeffs, rem


def reciprocal_truncation(degree, lo, hi, backend):
    """Monomial coefficients of the degree-`degree` expansion of 1/x around
    the midpoint of [lo, hi], with a certified remainder norm.

    The expansion sum_d (-1)^d (x-c)^d / c^{d+1} is assembled with exact
    rational arithmetic around a rational center, then converted to the
    backend.  The alternating monomial coefficients cancel heavily, so the
    caller must evaluate at a working precision covering
    `reciprocal_extra_digits(degree, lo, hi)` digits of amplification.
    """
    if not 0 < lo < hi:
        raise CapabilityError("reciprocal expansion needs a spectrum in (0, inf)")
    c = Fraction((lo + hi) / 2).limit_denominator(1_000_000)
    if not (lo < c < hi):
        c = (Fraction(lo) + Fraction(hi)) / 2
    acc = [Fraction(0)] * (degree + 1)
    shifted = [Fraction(1)]  # coefficients of (x - c)^d
    sign = Fraction(1)
    cpow = Fraction(1) / c
    for d in range(degree + 1):
        for j, s in enumerate(shifted):
            acc[j] += sign * cpow * s
        if d < degree:
            nxt = [Fraction(0)] * (d + 2)
            for j, s in enumerate(shifted):
                nxt[j + 1] += s
                nxt[j] -= c * s
            shifted = nxt
            sign = -sign
            cpow = cpow / c
    cb = backend.convert
    r = max(cb(hi) - cb(c), cb(c) - cb(lo)) / cb(c)
    if not r < backend.one:
        raise CapabilityError("spectral interval too wide for midpoint expansion")
    rem = (backend.one / cb(c)) * r ** (degree + 1) / (backend.one - r)
    return tuple(cb(q) for q in acc), rem


def reciprocal_extra_digits(degree, lo, hi):
    """Decimal digits of cancellation in the monomial form of the 1/x expansion."""
    import math

    c = (lo + hi) / 2.0
    return int(math.ceil(degree * math.log10((hi + c) / c))) + 10
