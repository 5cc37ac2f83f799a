"""Concrete compactly supported laws and their transform calculus.

A SpectralDistribution stores a moment sequence and the matching free
cumulant sequence to a fixed order, an optional certified spectral
interval with atoms, and (for float laws with a known density) a density
callable.  The classical constructors solve the algebraic relation that
the law's multiplicative transform imposes on the moment generating
series, which is the same computation as reverting the inverse moment
series but runs in quadratic time; an `extender` hook lets engines pull
far more moments than the constructed order when certified tail sums
need them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    BackendError,
    CapabilityError,
    DimensionError,
    DomainError,
    ReversionDomainError,
)
from .funcdesc import (
    INV,
    POLY,
    FunctionDescriptor,
    reciprocal_truncation,
)
from .series import TruncatedSeries, backward_shift, revert

EXACT_POLY = "exact-poly"
NEUMANN = "neumann"
QUADRATURE = "quadrature"

_OUTWARD = 1e-9  # relative inflation for certified float support endpoints


@dataclass(frozen=True)
class Support:
    """Conservative spectral data: [lo, hi] plus (location, mass) atoms."""

    lo: float
    hi: float
    atoms: tuple = ()


@dataclass(frozen=True)
class Expectation:
    value: object
    error_bound: object


@dataclass(frozen=True)
class DensityInfo:
    """Continuous-part density and its exact interval (atoms excluded)."""

    fn: object
    lo: float
    hi: float


class SpectralDistribution:
    """A law given by mutually consistent moment and free-cumulant sequences."""

    def __init__(self, backend, moments, free_cumulants=None, support=None,
                 label="", extender=None, density=None):
        self.backend = backend
        self.moments = tuple(backend.convert(m) for m in moments)
        self._kappas = (
            None
            if free_cumulants is None
            else tuple(backend.convert(k) for k in free_cumulants)
        )
        if self._kappas is not None and len(self._kappas) != len(self.moments):
            raise DimensionError("moment and cumulant sequences must share one order")
        self.support = support
        self.label = label
        self._extender = extender
        self.density = density
        self._deep = None  # cached extended moment list [1, m1, m2, ...]

    @property
    def order(self):
        return len(self.moments)

    @property
    def free_cumulants(self):
        if self._kappas is None:
            self._kappas = free_cumulants_from_moments(self.backend, self.moments)
        return self._kappas

    def moment(self, k):
        if k == 0:
            return self.backend.one
        if k <= self.order:
            return self.moments[k - 1]
        return self.moments_to(k)[k]

    def free_cumulant(self, k):
        if not 1 <= k <= self.order:
            raise DimensionError(
                f"cumulant {k} beyond stored order {self.order} of {self.label or 'law'}"
            )
        return self.free_cumulants[k - 1]

    def moments_to(self, k):
        """List [1, m_1, ..., m_k]; uses the extender past the stored order."""
        if k <= self.order:
            return [self.backend.one, *self.moments[:k]]
        if self._deep is not None and len(self._deep) > k:
            return self._deep[: k + 1]
        if self._extender is None:
            raise DimensionError(
                f"law {self.label or ''} holds {self.order} moments, {k} requested;"
                " rebuild it at a higher order"
            )
        self._deep = [self.backend.one, *self._extender(k)]
        return self._deep[: k + 1]

    def moment_series(self, order=None):
        """M(z) = sum_{k>=1} m_k z^k."""
        order = self.order if order is None else order
        coeffs = self.moments_to(order)
        return TruncatedSeries(self.backend, [self.backend.zero, *coeffs[1:]])

    def __repr__(self):
        return f"SpectralDistribution({self.label or 'anonymous'}, order={self.order})"


# -- univariate conversions ---------------------------------------------------


def _conv_prefix(a, b_full, upto, zero):
    out = [zero] * (upto + 1)
    for i, ai in enumerate(a):
        if i > upto or ai == 0:
            continue
        for t in range(i, upto + 1):
            bj = b_full[t - i]
            if bj != 0:
                out[t] += ai * bj
    return out


def moments_from_free_cumulants(backend, kappas):
    """Rebuild moments from free cumulants through the non-crossing sum,
    organized by the block containing the first position."""
    kappas = [backend.convert(k) for k in kappas]
    n_max = len(kappas)
    m = [backend.one] + [backend.zero] * n_max
    for n in range(1, n_max + 1):
        acc = backend.zero
        power = [backend.one]  # (1 + M)^s truncated as needed
        for s in range(1, n + 1):
            power = _conv_prefix(power, m, n - s, backend.zero)
            if kappas[s - 1] != 0 and n - s < len(power):
                acc += kappas[s - 1] * power[n - s]
        m[n] = acc
    return tuple(m[1:])


def free_cumulants_from_moments(backend, moments):
    """Inverse of moments_from_free_cumulants, solved triangularly."""
    moments = [backend.convert(v) for v in moments]
    n_max = len(moments)
    m = [backend.one] + moments
    kappas = []
    for n in range(1, n_max + 1):
        acc = m[n]
        power = [backend.one]
        for s in range(1, n + 1):
            power = _conv_prefix(power, m, n - s, backend.zero)
            if s < n and n - s < len(power):
                acc -= kappas[s - 1] * power[n - s]
        kappas.append(acc)
    return tuple(kappas)


# -- constructors -------------------------------------------------------------


def _require_positive(backend, name, value):
    if not value > 0:
        raise DomainError(f"{name} must be positive, got {backend.format(value)}")


def free_poisson(alpha, lam, order, backend):
    """Law with multiplicative transform 1 / (alpha*lam + alpha*z).

    Free cumulant sequence lam * alpha^k (confirmed against the reversion
    oracle in the test suite); moments solve
    z*(1+M)*(lam+M)*alpha = M.
    """
    alpha = backend.convert(alpha)
    lam = backend.convert(lam)
    _require_positive(backend, "alpha", alpha)
    _require_positive(backend, "lambda", lam)

    def moments(upto):
        m = [backend.zero] * (upto + 1)
        sq = [backend.zero] * (upto + 1)  # M^2
        for n in range(1, upto + 1):
            base = lam if n == 1 else backend.zero
            m[n] = alpha * (base + (1 + lam) * m[n - 1] + sq[n - 1])
            sq[n] = sum((m[i] * m[n - i] for i in range(1, n)), backend.zero)
        return m[1:]

    kappas = []
    p = backend.one
    for _ in range(order):
        p = p * alpha
        kappas.append(lam * p)

    af, lf = backend.to_float(alpha), backend.to_float(lam)
    lo = af * (1 - math.sqrt(lf)) ** 2
    hi = af * (1 + math.sqrt(lf)) ** 2
    atoms = ((0.0, 1.0 - lf),) if lf < 1 else ()
    support = Support(
        lo=0.0 if atoms else lo * (1 - _OUTWARD),
        hi=hi * (1 + _OUTWARD),
        atoms=atoms,
    )
    density = _mp_density(backend, af, lf)
    return SpectralDistribution(
        backend,
        moments(order),
        free_cumulants=kappas,
        support=support,
        label=f"free-poisson(alpha={backend.format(alpha)}, shape={backend.format(lam)})",
        extender=moments,
        density=density,
    )


def _mp_density(backend, alpha, lam):
    if backend.exact:
        return None
    ctx = backend.ctx
    a, l = backend.convert(alpha), backend.convert(lam)

    def dens(x):
        disc = 4 * l * a**2 - (x - a * (1 + l)) ** 2
        if disc <= 0:
            return ctx.mpf(0)
        return ctx.sqrt(disc) / (2 * ctx.pi * a * x)

    # edges at working precision: a double-precision interval would leak
    # slivers of the order of the square-rooted rounding error
    lo = a * (1 - ctx.sqrt(l)) ** 2
    hi = a * (1 + ctx.sqrt(l)) ** 2
    return DensityInfo(dens, lo, hi)


def free_binomial(sigma, theta, order, backend):
    """Law with multiplicative transform 1 + theta / (sigma + z).

    Admissible exactly when (sigma+theta)/(sigma+theta-1) > 0 and
    sigma*theta/(sigma+theta-1) > 0.  Moments solve
    z*(1+M)*(sigma+M) = M*(sigma+theta+M).
    """
    sigma = backend.convert(sigma)
    theta = backend.convert(theta)
    s = sigma + theta
    if s == 1:
        raise DomainError("inadmissible parameters: sigma + theta = 1")
    if not (s / (s - 1) > 0):
        raise DomainError(
            "inadmissible parameters: (sigma+theta)/(sigma+theta-1) > 0 fails"
        )
    if not (sigma * theta / (s - 1) > 0):
        raise DomainError(
            "inadmissible parameters: sigma*theta/(sigma+theta-1) > 0 fails"
        )

    def moments(upto):
        m = [backend.zero] * (upto + 1)
        sq = [backend.zero] * (upto + 1)
        for n in range(1, upto + 1):
            sq[n] = sum((m[i] * m[n - i] for i in range(1, n)), backend.zero)
            base = sigma if n == 1 else backend.zero
            m[n] = (base + (1 + sigma) * m[n - 1] + sq[n - 1] - sq[n]) / s
        return m[1:]

    sf, tf = backend.to_float(sigma), backend.to_float(theta)
    ssum = sf + tf
    a = math.sqrt(sf / ssum * (1 - 1 / ssum))
    b = math.sqrt(1 / ssum * (1 - sf / ssum))
    x_lo, x_hi = (a - b) ** 2, (a + b) ** 2
    atoms = []
    if 0 < sf < 1:
        atoms.append((0.0, 1.0 - sf))
    if 0 < tf < 1:
        atoms.append((1.0, 1.0 - tf))
    lo = 0.0 if any(loc == 0.0 for loc, _ in atoms) else x_lo * (1 - _OUTWARD)
    hi = 1.0 if any(loc == 1.0 for loc, _ in atoms) else x_hi * (1 + _OUTWARD)
    support = Support(lo=lo, hi=hi, atoms=tuple(atoms))
    density = _fb_density(backend, sigma, theta)
    return SpectralDistribution(
        backend,
        moments(order),
        support=support,
        label=f"free-binomial(sigma={backend.format(sigma)}, theta={backend.format(theta)})",
        extender=moments,
        density=density,
    )


def _fb_density(backend, sigma, theta):
    if backend.exact:
        return None
    ctx = backend.ctx
    sg, th = backend.convert(sigma), backend.convert(theta)
    s = sg + th
    a = ctx.sqrt(sg / s * (1 - 1 / s))
    b = ctx.sqrt(1 / s * (1 - sg / s))
    lo, hi = (a - b) ** 2, (a + b) ** 2

    def dens(x):
        disc = (x - lo) * (hi - x)
        if disc <= 0:
            return ctx.mpf(0)
        return s * ctx.sqrt(disc) / (2 * ctx.pi * x * (1 - x))

    return DensityInfo(dens, lo, hi)


def point_mass(c, order, backend):
    c = backend.convert(c)

    def moments(upto):
        out, p = [], backend.one
        for _ in range(upto):
            p = p * c
            out.append(p)
        return out

    cf = backend.to_float(c)
    return SpectralDistribution(
        backend,
        moments(order),
        support=Support(lo=min(cf, 0.0), hi=max(cf, 0.0), atoms=((cf, 1.0),)),
        label=f"point({backend.format(c)})",
        extender=moments,
    )


def bernoulli(p, jump, order, backend):
    """p * delta_0 + (1 - p) * delta_jump."""
    p = backend.convert(p)
    jump = backend.convert(jump)
    if not (0 <= p <= 1):
        raise DomainError(f"mass p must lie in [0, 1], got {backend.format(p)}")
    w = 1 - p

    def moments(upto):
        out, power = [], backend.one
        for _ in range(upto):
            power = power * jump
            out.append(w * power)
        return out

    jf, pf = backend.to_float(jump), backend.to_float(p)
    return SpectralDistribution(
        backend,
        moments(order),
        support=Support(lo=min(0.0, jf), hi=max(0.0, jf),
                        atoms=((0.0, pf), (jf, 1 - pf))),
        label=f"bernoulli(p={backend.format(p)}, jump={backend.format(jump)})",
        extender=moments,
    )


# -- transforms ---------------------------------------------------------------

M_TRANSFORM = "m"
ETA_TRANSFORM = "eta"
S_TRANSFORM = "s"


def transform_series(dist, which, order=None):
    """Moment series M, its Boolean form eta = M/(1+M), or the multiplicative
    transform (1+z)/z * M^{<-1>}(z) as a power series of order N-1."""
    order = dist.order if order is None else order
    backend = dist.backend
    mseries = TruncatedSeries(backend, dist.moments_to(order))
    mseries = TruncatedSeries(backend, (backend.zero,) + mseries.coeffs[1:])
    if which == M_TRANSFORM:
        return mseries
    if which == ETA_TRANSFORM:
        return mseries / mseries.add_constant(1)
    if which == S_TRANSFORM:
        if mseries.order < 1 or mseries.coeffs[1] == 0:
            raise ReversionDomainError(
                "multiplicative transform needs a nonzero first moment"
            )
        minv = revert(mseries)
        ratio = backward_shift(minv, 1)  # M^{<-1>}(z) / z, order N-1
        one_plus_z = TruncatedSeries(
            backend, [1, 1] + [0] * (ratio.order - 1)
        ) if ratio.order >= 1 else TruncatedSeries(backend, [1])
        return ratio * one_plus_z
    raise ValueError(f"unknown transform {which!r}")


def free_convolve(d1, d2):
    """Additive free convolution: cumulants add, moments regenerate."""
    if d1.backend is not d2.backend:
        raise BackendError("cannot convolve laws from different backends")
    if d1.order != d2.order:
        raise DimensionError(
            f"cannot convolve laws of orders {d1.order} and {d2.order}"
        )
    backend = d1.backend
    kappas = [a + b for a, b in zip(d1.free_cumulants, d2.free_cumulants)]
    moments = moments_from_free_cumulants(backend, kappas)
    support = None
    if d1.support and d2.support:
        support = Support(
            lo=d1.support.lo + d2.support.lo,
            hi=d1.support.hi + d2.support.hi,
            atoms=(),
        )
    return SpectralDistribution(
        backend,
        moments,
        free_cumulants=kappas,
        support=support,
        label=f"convolve({d1.label}, {d2.label})",
    )


# -- expectations of functions ------------------------------------------------


def expect_function(dist, fn, method, tail_degree=60):
    """phi(fn(X)) by exact polynomial pairing, certified truncated expansion,
    or density quadrature.  Returns an Expectation(value, error_bound)."""
    backend = dist.backend
    if method == EXACT_POLY:
        if fn.kind != POLY:
            raise CapabilityError("exact-poly expectation needs a polynomial")
        mom = dist.moments_to(len(fn.coeffs) - 1)
        value = sum(
            (backend.convert(c) * mom[k] for k, c in enumerate(fn.coeffs) if c != 0),
            backend.zero,
        )
        return Expectation(value, backend.zero)
    if method == NEUMANN:
        if dist.support is None:
            raise CapabilityError(
                "certified expansion needs a declared spectral interval"
            )
        if fn.kind == POLY:
            return expect_function(dist, fn, EXACT_POLY)
        if fn.kind == INV:
            lo, hi = dist.support.lo, dist.support.hi
            coeffs, rem = reciprocal_truncation(tail_degree, lo, hi, backend)
            mom = dist.moments_to(tail_degree)
            value = sum(
                (c * mom[k] for k, c in enumerate(coeffs) if c != 0), backend.zero
            )
            return Expectation(value, rem)
        rho = backend.convert(dist.support.hi)
        if not rho < backend.one:
            raise CapabilityError(
                f"expansion of {fn.kind} needs spectrum in [0, rho] with rho < 1,"
                f" got rho = {backend.format(rho)}"
            )
        mom = dist.moments_to(tail_degree)
        value = backend.zero
        for k in range(tail_degree + 1):
            a = fn.series_coefficient(k)
            if a != 0:
                value += backend.convert(a) * mom[k]
        return Expectation(value, fn.tail_bound(tail_degree, rho, backend))
    if method == QUADRATURE:
        return _quadrature_expectation(dist, fn)
    raise ValueError(f"unknown expectation method {method!r}")


def _quadrature_expectation(dist, fn):
    backend = dist.backend
    if backend.exact or dist.support is None or dist.density is None:
        raise CapabilityError("quadrature needs a float law with density data")
    ctx = backend.ctx
    info = dist.density
    atom_total = ctx.mpf(0)
    for loc, mass in dist.support.atoms:
        atom_total += ctx.mpf(mass) * fn.evaluate(ctx.mpf(loc), backend)
    lo, hi = ctx.mpf(info.lo), ctx.mpf(info.hi)
    width = hi - lo
    if width <= 0:
        return Expectation(atom_total, backend.tolerance)

    # x = lo + width*sin(t)^2 absorbs square-root edge factors of the density
    # and an inverse-square-root left edge (binomial laws touching zero)
    def integrand(t):
        st, ct = ctx.sin(t), ctx.cos(t)
        x = lo + width * st**2
        return info.fn(x) * fn.evaluate(x, backend) * 2 * width * st * ct

    value, err = ctx.quad(
        integrand, [ctx.mpf(0), ctx.pi / 2], error=True, maxdegree=10
    )
    return Expectation(atom_total + value, err)
