"""Closed-form conditional expectations onto the second factor's algebra.

The projection of f(U) U^{-1/2} Psi_{U^{1/2} V U^{1/2}}(z) U^{-1/2} g(U)
onto the algebra of V splits into a scalar series plus a series multiple
of V(1 + Psi_V(omega1(z))).  Both pieces are built from two generating
series: one collects Boolean cumulants with f(U) and g(U) at both ends
and U's between, the other the one-sided variant.  Each series is
computed two ways: from its defining mixed Boolean cumulants over the
commutative marginal (DEFINITION), or by applying weighted coefficient
shifts to the marginal's eta series (CLOSED_FORM); the weight of the
k-fold shift is the expectation of the k-fold shift of the function.

Results are exposed as pairing functions m -> series of phi(result * V^m),
because equality of conditional expectations is testable exactly as
equality of pairings against the V-algebra; powers of V up to m_max form
a complete test family at fixed truncation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .cumulants import CumulantCalculator, MomentOracle
from .distributions import NEUMANN, expect_function
from .errors import CapabilityError, DimensionError, OracleError
from .freeprod import LEFT, RIGHT, FreeProduct, Letter
from .funcdesc import POLY, PSI, FunctionDescriptor
from .series import TruncatedSeries, backward_shift, compose, tail_sum_series
from .subordination import omega_pair

DEFINITION = "definition"
CLOSED_FORM = "closed-form"


# -- marginal machinery --------------------------------------------------------


class MarginalOracle(MomentOracle):
    """Moments of products of polynomial functions of one law's generator."""

    def __init__(self, dist):
        super().__init__(dist.backend)
        self.dist = dist

    def _moment(self, word):
        total_degree = 0
        for fn in word:
            if fn.kind != POLY:
                raise OracleError(
                    f"marginal oracle needs polynomial letters, got {fn.kind}",
                    word=word,
                )
            total_degree += len(fn.coeffs) - 1
        vec = self.dist.moments_to(total_degree)
        for fn in sorted(word, key=lambda f: -len(f.coeffs)):
            deg = len(fn.coeffs) - 1
            vec = [
                sum(
                    (fn.coeffs[k] * vec[s + k] for k in range(deg + 1)
                     if fn.coeffs[k] != 0),
                    self.backend.zero,
                )
                for s in range(len(vec) - deg)
            ]
        return vec[0]


def eta_series(dist, order):
    """eta = M / (1 + M); its coefficients are the univariate Boolean cumulants."""
    m = dist.moment_series(order)
    return m / m.add_constant(1)


def shift_weights(fn, dist):
    """Expectations of the coefficient shifts of fn: weight k is
    phi(fn shifted down k times, applied to the law's generator)."""
    if fn.kind != POLY:
        raise CapabilityError("shift weights need a polynomial descriptor")
    deg = len(fn.coeffs) - 1
    mom = dist.moments_to(deg)
    backend = dist.backend
    weights = []
    for k in range(deg + 1):
        acc = backend.zero
        for i in range(k, deg + 1):
            c = fn.coeffs[i]
            if c != 0:
                acc += backend.convert(c) * mom[i - k]
        weights.append(acc)
    return weights


def neumann_degree(rho, tol):
    """Smallest K with rho^(K+1)/(1-rho) <= tol (rho, tol as floats)."""
    if not 0 < rho < 1:
        raise CapabilityError(f"need a spectral bound rho < 1, got {rho}")
    K = int(math.ceil(math.log(tol * (1 - rho)) / math.log(rho))) + 1
    return max(K, 4)


@dataclass(frozen=True)
class TailConstants:
    """Certified scalar data of a law supported in [0, rho], rho < 1."""

    alpha: object            # phi(U (1-U)^{-1}) = M(1)
    one_plus_alpha: object   # phi((1-U)^{-1})
    eta_at_one: object       # alpha / (1 + alpha)
    m_prime_at_one: object   # sum_k k m_k
    eta_prime_at_one: object  # m_prime / (1 + alpha)^2
    error_bound: object


def tail_constants(dist, tail_tol=None):
    backend = dist.backend
    if backend.exact:
        raise CapabilityError("tail constants need the float backend")
    if dist.support is None or not dist.support.hi < 1:
        raise CapabilityError(
            "tail constants need a law with spectrum in [0, rho], rho < 1"
        )
    tol = backend.to_float(backend.tolerance) if tail_tol is None else tail_tol
    K = neumann_degree(dist.support.hi, tol)
    a = expect_function(dist, FunctionDescriptor.psi(), NEUMANN, K)
    mp = expect_function(dist, FunctionDescriptor.xinv1msq(), NEUMANN, K)
    one_plus = backend.one + a.value
    return TailConstants(
        alpha=a.value,
        one_plus_alpha=one_plus,
        eta_at_one=a.value / one_plus,
        m_prime_at_one=mp.value,
        eta_prime_at_one=mp.value / one_plus**2,
        error_bound=a.error_bound + mp.error_bound,
    )


# -- weighted-shift operator ----------------------------------------------------


def phi_d_apply(h, fn, dist, target, target_at_one=None, tail_tol=None):
    """Apply the weighted-shift operator of (h, fn) over `dist` to `target`.

    `h` is a TruncatedSeries of weights h_k, or a PSI descriptor meaning
    h_k = 1 for every k >= 1.  For fn = PSI with h = PSI the operator
    collapses to phi((1-U)^{-1}) times the tail-sum transform, which needs
    the true value target(1).
    """
    backend = dist.backend
    h_is_psi = isinstance(h, FunctionDescriptor) and h.kind == PSI
    if not h_is_psi and not isinstance(h, TruncatedSeries):
        raise CapabilityError("h must be a TruncatedSeries or the PSI descriptor")
    if fn.kind == POLY:
        weights = shift_weights(fn, dist)
        parts = []
        for k in range(1, len(weights)):
            hk = backend.one if h_is_psi else (
                h.coeffs[k] if k <= h.order else backend.zero
            )
            w = hk * weights[k]
            if w == 0:
                continue
            parts.append(backward_shift(target, k) * w)
        if not h_is_psi:
            h0 = h.coeffs[0]
            if h0 != 0:
                parts.append(target * (h0 * weights[0]))
        if not parts:
            return TruncatedSeries.zero(backend, max(target.order - (len(weights) - 1), 0))
        low = min(p.order for p in parts)
        acc = parts[0].truncate(low)
        for p in parts[1:]:
            acc = acc + p.truncate(low)
        return acc
    if fn.kind == PSI:
        if not h_is_psi:
            raise CapabilityError(
                "rational fn is only combined with the PSI weight series"
            )
        if target_at_one is None:
            raise CapabilityError(
                "the tail-sum closed form needs the true value target(1)"
            )
        consts = tail_constants(dist, tail_tol)
        return tail_sum_series(target, target_at_one) * consts.one_plus_alpha
    raise CapabilityError(f"unsupported descriptor {fn.kind} in shift operator")


# -- the two generating series --------------------------------------------------


def _definition_series(descriptors, dist, order):
    """Coefficients are Boolean cumulants of (first, U, ..., U, last)."""
    oracle = MarginalOracle(dist)
    calc = CumulantCalculator(oracle, word_cap=order + len(descriptors))
    unit = FunctionDescriptor.identity()
    coeffs = []
    for ell in range(order + 1):
        word = (descriptors[0],) + (unit,) * ell
        if len(descriptors) > 1:
            word = word + (descriptors[1],)
        coeffs.append(calc.boolean_cumulant(word))
    return TruncatedSeries(dist.backend, coeffs)


def eta_fg_series(f, g, dist, order, path=CLOSED_FORM, tail_tol=None):
    """Series of Boolean cumulants with f(U) and g(U) at the ends.

    CLOSED_FORM composes the two weighted-shift operators on eta;
    DEFINITION inverts the interval lattice over the commutative marginal.
    Polynomial descriptors run exactly; the PSI/PSI case uses the double
    tail-sum closed form with certified constants.
    """
    backend = dist.backend
    if path == DEFINITION:
        if f.kind != POLY or g.kind != POLY:
            raise CapabilityError("the definition path needs polynomial descriptors")
        return _definition_series((f, g), dist, order)
    if path != CLOSED_FORM:
        raise ValueError(f"unknown path {path!r}")
    if f.kind == POLY and g.kind == POLY:
        eta = eta_series(dist, order + f.degree + g.degree)
        psi = FunctionDescriptor.psi()
        inner = phi_d_apply(psi, g, dist, eta)
        return phi_d_apply(psi, f, dist, inner).truncate(order)
    if f.kind == PSI and g.kind == PSI:
        consts = tail_constants(dist, tail_tol)
        eta = eta_series(dist, order)
        inner = tail_sum_series(eta, consts.eta_at_one)
        outer = tail_sum_series(inner, consts.eta_prime_at_one)
        return outer * consts.one_plus_alpha**2
    if g.kind == PSI and f.kind == POLY:
        consts = tail_constants(dist, tail_tol)
        eta = eta_series(dist, order + f.degree)
        inner = tail_sum_series(eta, consts.eta_at_one) * consts.one_plus_alpha
        return phi_d_apply(FunctionDescriptor.psi(), f, dist, inner).truncate(order)
    if f.kind == PSI and g.kind == POLY:
        consts = tail_constants(dist, tail_tol)
        eta = eta_series(dist, order + g.degree)
        inner = phi_d_apply(FunctionDescriptor.psi(), g, dist, eta)
        inner_at_one = _value_at_one_of_shift_sum(g, dist, eta, consts)
        return tail_sum_series(inner, inner_at_one) * consts.one_plus_alpha
    raise CapabilityError(f"unsupported descriptor pair ({f.kind}, {g.kind})")


def _value_at_one_of_shift_sum(fn, dist, eta, consts):
    """Value at 1 of sum_k w_k (shift^k eta): each shifted series sums to
    eta(1) minus the dropped head coefficients."""
    backend = dist.backend
    weights = shift_weights(fn, dist)
    total = backend.zero
    head = backend.zero
    for k in range(1, len(weights)):
        head += eta.coeffs[k - 1]  # eta_0, ..., eta_{k-1}
        total += weights[k] * (consts.eta_at_one - head)
    return total


def eta_f_series(f, dist, order, path=CLOSED_FORM, tail_tol=None):
    """One-sided series: Boolean cumulants of (f(U), U, ..., U).

    The closed form is z * [shift-op . shift] eta + (shift-op eta)(0),
    plus the constant part of f, which the shift operator cannot see.
    """
    backend = dist.backend
    if path == DEFINITION:
        if f.kind != POLY:
            raise CapabilityError("the definition path needs polynomial descriptors")
        return _definition_series((f,), dist, order)
    if path != CLOSED_FORM:
        raise ValueError(f"unknown path {path!r}")
    if f.kind == POLY:
        eta = eta_series(dist, order + f.degree + 1)
        weights = shift_weights(f, dist)
        parts = []
        for k in range(1, len(weights)):
            if weights[k] == 0:
                continue
            parts.append(backward_shift(eta, k + 1) * weights[k])
        if parts:
            low = min(p.order for p in parts)
            acc = parts[0].truncate(low)
            for p in parts[1:]:
                acc = acc + p.truncate(low)
            main = acc.shift_up(1).truncate(order)
        else:
            main = TruncatedSeries.zero(backend, order)
        at_zero = sum(
            (weights[k] * eta.coeffs[k] for k in range(1, len(weights))),
            backend.zero,
        )
        return main.add_constant(at_zero + backend.convert(f.coeffs[0]))
    if f.kind == PSI:
        consts = tail_constants(dist, tail_tol)
        eta = eta_series(dist, order)
        return tail_sum_series(eta, consts.eta_at_one) * consts.one_plus_alpha
    raise CapabilityError(f"unsupported descriptor {f.kind}")


# -- pairing functions -----------------------------------------------------------


@dataclass(frozen=True)
class PairingFunction:
    """Conditional expectation in structured form.

    The projected element is  scalar_part + v_coefficient * V * (1 +
    Psi_V(omega1)); evaluate(m) pairs it with V^m and returns the z-series
    of phi(result * V^m)."""

    scalar_part: TruncatedSeries
    v_coefficient: TruncatedSeries
    omega1: TruncatedSeries
    dist_v: object
    order: int

    def evaluate(self, m):
        backend = self.scalar_part.backend
        mom = self.dist_v.moments_to(self.order + m + 1)
        n = self.order
        weighted = TruncatedSeries.constant(backend, mom[m + 1], n)
        power = TruncatedSeries.one(backend, n)
        for k in range(1, n + 1):
            power = power * self.omega1
            if k + m + 1 < len(mom):
                weighted = weighted + power * mom[k + m + 1]
        return self.scalar_part * mom[m] + self.v_coefficient * weighted


def condexp_pairing(f, g, dist_u, dist_v, order, path=CLOSED_FORM, tail_tol=None):
    """Structured conditional expectation of f(U) . (product chain) . g(U)."""
    etafg = eta_fg_series(f, g, dist_u, order, path, tail_tol)
    etaf = eta_f_series(f, dist_u, order, path, tail_tol)
    etag = eta_f_series(g, dist_u, order, path, tail_tol)
    sub = omega_pair(dist_u, dist_v, order)
    w1, w2 = sub.omega1, sub.omega2
    scalar_part = w2 * compose(etafg.truncate(order), w2)
    v_coeff = (
        compose(etaf.truncate(order), w2) * compose(etag.truncate(order), w2)
    ).shift_up(1).truncate(order)
    return PairingFunction(scalar_part, v_coeff, w1, dist_v, order)


def pairing_oracle(f, g, dist_u, dist_v, order, m, degree=None):
    """Direct evaluation of the pairing series: coefficient n is
    phi(f(U) V (UV)^(n-1) g(U) V^m) from the joint-moment engine.

    Returns (series, per-coefficient certified error bounds)."""
    engine = FreeProduct(dist_u, dist_v, word_cap=2 * order + 6)
    backend = engine.backend
    exact_letters = f.kind == POLY and g.kind == POLY
    coeffs = [backend.zero]
    bounds = [backend.zero]
    unit = FunctionDescriptor.identity()
    for n in range(1, order + 1):
        word = [Letter(LEFT, f), Letter(RIGHT, unit)]
        for _ in range(n - 1):
            word.append(Letter(LEFT, unit))
            word.append(Letter(RIGHT, unit))
        word.append(Letter(LEFT, g))
        if m > 0:
            word.append(Letter(RIGHT, FunctionDescriptor.monomial(m)))
        if exact_letters:
            coeffs.append(engine.joint_moment(word))
            bounds.append(backend.zero)
        else:
            if degree is None:
                raise CapabilityError(
                    "rational letters need an explicit expansion degree"
                )
            ex = engine.joint_moment_certified(word, degree)
            coeffs.append(ex.value)
            bounds.append(ex.error_bound)
    return TruncatedSeries(backend, coeffs), bounds


@dataclass(frozen=True)
class PairingCheckRow:
    m: int
    power: int
    formula: object
    oracle: object
    delta: object
    bound: object
    ok: bool


def verify_pairing(f, g, dist_u, dist_v, order, m_max, degree=None, tol=None,
                   path=CLOSED_FORM, tail_tol=None):
    """Compare the structured form against the direct oracle for all powers
    of V up to m_max, coefficient by coefficient in z."""
    backend = dist_u.backend
    pairing = condexp_pairing(f, g, dist_u, dist_v, order, path, tail_tol)
    rows = []
    for m in range(m_max + 1):
        formula = pairing.evaluate(m)
        oracle, bounds = pairing_oracle(f, g, dist_u, dist_v, order, m, degree)
        for n in range(order + 1):
            delta = backend.abs_delta(formula.coeffs[n], oracle.coeffs[n])
            if backend.exact:
                ok = delta == 0
            else:
                budget = bounds[n] + (backend.tolerance if tol is None
                                      else backend.convert(tol))
                ok = delta <= budget
            rows.append(
                PairingCheckRow(m, n, formula.coeffs[n], oracle.coeffs[n],
                                delta, bounds[n], ok)
            )
    return rows


# -- the inverse-weighted special case -------------------------------------------


@dataclass(frozen=True)
class InverseWeightedForm:
    a_series: TruncatedSeries
    b_series: TruncatedSeries
    pairing: PairingFunction
    constants: TailConstants


def inverse_weighted_pairing(dist_u, dist_v, order, tail_tol=None):
    """Conditional expectation with (1-U)^{-1} weights on both sides.

    A(z) = [eta(omega2) - eta(1)] / (omega2 - 1) * phi((1-U)^{-1}) and
    B(z) = omega2 * [eta(omega2) - eta(1) - (omega2 - 1) eta'(1)]
           / (omega2 - 1)^2 * phi((1-U)^{-1})^2;
    the projected element is B + z A^2 V (1 + Psi_V(omega1)).
    """
    backend = dist_u.backend
    if backend.exact:
        raise CapabilityError(
            "the inverse-weighted form needs the float backend (true tail values)"
        )
    consts = tail_constants(dist_u, tail_tol)
    sub = omega_pair(dist_u, dist_v, order)
    w1, w2 = sub.omega1, sub.omega2
    eta = eta_series(dist_u, order)
    e = compose(eta, w2)
    denom = w2.add_constant(-1)
    a_series = (e.add_constant(-consts.eta_at_one) / denom) * consts.one_plus_alpha
    b_num = e.add_constant(-consts.eta_at_one) - denom * consts.eta_prime_at_one
    b_series = (w2 * (b_num / (denom * denom))) * consts.one_plus_alpha**2
    pairing = PairingFunction(
        b_series, (a_series * a_series).shift_up(1).truncate(order), w1, dist_v, order
    )
    return InverseWeightedForm(a_series, b_series, pairing, consts)


def verify_inverse_weighted(dist_u, dist_v, order, m_max, degree, tol,
                            tail_tol=None):
    """Check the closed-form A/B pairing against the certified direct oracle
    with (1-U)^{-1}-weighted words (as psi letters after traciality)."""
    backend = dist_u.backend
    form = inverse_weighted_pairing(dist_u, dist_v, order, tail_tol)
    psi = FunctionDescriptor.psi()
    rows = []
    for m in range(m_max + 1):
        formula = form.pairing.evaluate(m)
        oracle, bounds = pairing_oracle(psi, psi, dist_u, dist_v, order, m, degree)
        for n in range(order + 1):
            delta = backend.abs_delta(formula.coeffs[n], oracle.coeffs[n])
            budget = bounds[n] + backend.convert(tol)
            rows.append(
                PairingCheckRow(m, n, formula.coeffs[n], oracle.coeffs[n],
                                delta, bounds[n], delta <= budget)
            )
    return form, rows
