"""Regression characterizations of free Poisson and free binomial laws.

Four pipelines:

* solve_regression_system: turn the two conditional-moment constants into
  the multiplicative transforms of both factors by solving a linear
  system for the inverse moment series, and read off the law parameters.
* verify_regression_forward: start from admissible law parameters, derive
  the constants, and check the conditional-moment identities directly --
  exactly for the polynomial identity, with certified truncated
  expansions for the two inverse-weighted ones.
* dual_lukacs_check: for free U (binomial) and V (Poisson), the pair
  X1 = V^{1/2} U V^{1/2}, Y1 = V - X1 is free with Poisson marginals;
  verified exactly by reducing every trace to integer words in U, V.
* direct_lukacs_check: for free Poisson X, Y the pair
  U = (X+Y)^{-1/2} X (X+Y)^{-1/2}, V = X+Y is free; verified in float by
  reducing traces to words in X and integer powers of V, expanding V^{-1}
  as a certified midpoint polynomial, and evaluating {X, V}-words through
  a first-block recursion with the pair's explicit block weights
  alpha^|B| (lam + kap * [block all V]).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product

from .distributions import free_binomial, free_poisson
from .errors import CapabilityError, DimensionError, DivergenceError, DomainError
from .freeprod import LEFT, RIGHT, FreeProduct, Letter, freeness_report
from .cumulants import MomentOracle
from .funcdesc import (
    FunctionDescriptor,
    reciprocal_extra_digits,
    reciprocal_truncation,
)
from .scalars import EXACT, FloatBackend
from .series import TruncatedSeries, backward_shift
from .subordination import omega_pair

TH1 = "th1"
TH2 = "th2"


@dataclass(frozen=True)
class RegressionConstants:
    """Scalar constants of the conditional-moment conditions."""

    alpha: object
    b: object = None
    c: object = None
    d: object = None

    def validated(self, mode, backend):
        alpha = backend.convert(self.alpha)
        if not alpha > 0:
            raise DomainError(f"need alpha > 0, got {backend.format(alpha)}")
        if mode == TH1:
            if self.b is None or self.c is None:
                raise DomainError("mode th1 needs constants b and c")
            b, c = backend.convert(self.b), backend.convert(self.c)
            if not (b > 0 and c > 0):
                raise DomainError("need b > 0 and c > 0")
            if not b * c > 1:
                raise DomainError(
                    f"need b*c > 1, got b*c = {backend.format(b * c)}"
                )
            return alpha, b, c
        if mode == TH2:
            if self.c is None or self.d is None:
                raise DomainError("mode th2 needs constants c and d")
            c, d = backend.convert(self.c), backend.convert(self.d)
            if not c > 0:
                raise DomainError("need c > 0")
            if not d > c**2:
                raise DomainError(
                    f"need d > c^2, got d = {backend.format(d)},"
                    f" c^2 = {backend.format(c ** 2)}"
                )
            return alpha, d / c**3, c
        raise DomainError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class CharacterizationResult:
    s_u: TruncatedSeries
    s_uv: TruncatedSeries
    s_v: TruncatedSeries
    binomial_params: tuple
    poisson_params: tuple


def _linear_series(backend, order, c0, c1):
    return TruncatedSeries(backend, [c0, c1] + [0] * (order - 1))


def solve_regression_system(constants, order, backend=EXACT, mode=TH1):
    """Solve the linear system for the inverse moment series of the product
    and of the first factor, then assemble the three multiplicative
    transforms as series of order `order` - 1."""
    alpha, b, c = constants.validated(mode, backend)
    bc = b * c
    n = order
    # inverse series of the factor: s*((1-bc)s - alpha - bc) / ((1+s)((1-bc)s - alpha))
    num = _linear_series(backend, n, -(alpha + bc), 1 - bc).shift_up(1).truncate(n)
    den = _linear_series(backend, n, 1, 1) * _linear_series(backend, n, -alpha, 1 - bc)
    mu_inv = num / den
    one_plus = _linear_series(backend, n, 1, 1)
    muv_inv = (one_plus * mu_inv - TruncatedSeries.identity(backend, n)) / (one_plus * b)
    s_u = backward_shift(mu_inv, 1) * _linear_series(backend, n - 1, 1, 1)
    s_uv = backward_shift(muv_inv, 1) * _linear_series(backend, n - 1, 1, 1)
    s_v = s_uv / s_u
    binom, poisson = params_from_constants(constants, mode, backend)
    return CharacterizationResult(s_u, s_uv, s_v, binom, poisson)


def closed_form_transforms(constants, order, backend=EXACT, mode=TH1):
    """The expected closed forms: S_U = 1 + bc/(alpha + (bc-1)s),
    S_UV = c/(alpha + (bc-1)s), S_V = c/(bc + alpha + (bc-1)s)."""
    alpha, b, c = constants.validated(mode, backend)
    bc = b * c
    n = order - 1
    one = TruncatedSeries.one(backend, n)
    s_u = one + (one * bc) / _linear_series(backend, n, alpha, bc - 1)
    s_uv = (one * c) / _linear_series(backend, n, alpha, bc - 1)
    s_v = (one * c) / _linear_series(backend, n, bc + alpha, bc - 1)
    return s_u, s_uv, s_v


def params_from_constants(constants, mode=TH1, backend=EXACT):
    """Map the regression constants to ((sigma, theta), (alpha_V, lambda_V))."""
    alpha, b, c = constants.validated(mode, backend)
    bc = b * c
    sigma = alpha / (bc - 1)
    theta = bc / (bc - 1)
    alpha_v = (bc - 1) / c
    lambda_v = (bc + alpha) / (bc - 1)
    return (sigma, theta), (alpha_v, lambda_v)


def constants_from_params(sigma, theta, alpha_v, backend=EXACT):
    """Inverse map: from (sigma, theta, alpha_V) with lambda_V = sigma+theta
    to (alpha, b, c, d)."""
    sigma, theta = backend.convert(sigma), backend.convert(theta)
    alpha_v = backend.convert(alpha_v)
    if not theta > 1:
        raise DomainError(
            f"forward verification needs theta > 1 (inverse moments converge),"
            f" got {backend.format(theta)}"
        )
    alpha = sigma / (theta - 1)
    b = theta * alpha_v
    c = 1 / ((theta - 1) * alpha_v)
    d = b * c**3
    return alpha, b, c, d


# -- forward verification -------------------------------------------------------


@dataclass(frozen=True)
class CheckRow:
    check: str
    params: str
    lhs: object
    rhs: object
    delta: object
    bound: object
    ok: bool


def _row(check, params, lhs, rhs, backend, bound=None, tol=None):
    delta = backend.abs_delta(lhs, rhs)
    if backend.exact:
        ok = delta == 0
        bound = backend.zero if bound is None else bound
    else:
        bound = backend.zero if bound is None else bound
        budget = bound + (backend.tolerance if tol is None else backend.convert(tol))
        ok = delta <= budget
    return CheckRow(check, params, lhs, rhs, delta, bound, ok)


def verify_regression_forward(sigma, theta, alpha_v, n_max=6, tol=Fraction(1, 10**20),
                              geom_degree=None, inv_degree=None, float_dps=None,
                              inverse_n_max=3):
    """Drive the conditional-moment identities from admissible parameters.

    The polynomial identity is checked exactly for n <= n_max.  The two
    inverse-weighted identities run on a float backend sized for the
    midpoint expansion of 1/V, with certified replacement bounds; each row
    must agree within its bound plus `tol`.
    """
    sigma, theta, alpha_v = Fraction(sigma), Fraction(theta), Fraction(alpha_v)
    alpha, b, c, d = constants_from_params(sigma, theta, alpha_v, EXACT)
    lam_v = sigma + theta
    rows = []

    # polynomial identity, exact backend
    order = 2 * (n_max + 1) + 4
    u_law = free_binomial(sigma, theta, order, EXACT)
    v_law = free_poisson(alpha_v, lam_v, order, EXACT)
    engine = FreeProduct(u_law, v_law, word_cap=2 * n_max + 6)
    one_minus = Letter(LEFT, FunctionDescriptor.poly((1, -1)))
    uv = [Letter(LEFT, FunctionDescriptor.identity()),
          Letter(RIGHT, FunctionDescriptor.identity())]
    for n in range(n_max + 1):
        lhs = engine.joint_moment([one_minus, uv[1]] + uv * n)
        rhs = b * engine.joint_moment(uv * n)
        rows.append(_row("mean-condition", f"n={n}", lhs, rhs, EXACT))

    # inverse-weighted identities, float backend with certified expansions
    lo_v = float(alpha_v) * (1 - math.sqrt(float(lam_v))) ** 2
    hi_v = float(alpha_v) * (1 + math.sqrt(float(lam_v))) ** 2
    rho_u = _binomial_upper_edge(float(sigma), float(theta))
    if inv_degree is None:
        inv_degree = _pick_degree(
            lambda D: _midpoint_tail(lo_v, hi_v, D), float(tol) * 1e-3
        )
    if geom_degree is None:
        geom_degree = _pick_degree(
            lambda K: rho_u ** (K + 1) / (1 - rho_u), float(tol) * 1e-3
        )
    if float_dps is None:
        float_dps = 60 + 2 * reciprocal_extra_digits(inv_degree, lo_v, hi_v) + \
            int(-math.log10(float(tol))) + 20
    fb = FloatBackend(dps=float_dps)
    u_f = free_binomial(sigma, theta, 16, fb)
    v_f = free_poisson(alpha_v, lam_v, 16, fb)
    fengine = FreeProduct(u_f, v_f, word_cap=2 * inverse_n_max + 10)
    degrees = {"inv": inv_degree, "geom": geom_degree}

    from .distributions import NEUMANN, expect_function

    inv1m_u = expect_function(u_f, FunctionDescriptor.inv1m(), NEUMANN, geom_degree)
    inv_v = expect_function(v_f, FunctionDescriptor.inv(), NEUMANN, inv_degree)
    alpha_f = expect_function(u_f, FunctionDescriptor.psi(), NEUMANN, geom_degree)
    rows.append(_row("alpha-consistency", "tail-sum vs parameter map",
                     alpha_f.value, fb.convert(alpha), fb,
                     bound=alpha_f.error_bound, tol=tol))
    lhs0 = inv1m_u.value * inv_v.value
    bound0 = (
        inv1m_u.error_bound * abs(inv_v.value)
        + abs(inv1m_u.value) * inv_v.error_bound
        + inv1m_u.error_bound * inv_v.error_bound
    )
    rows.append(_row("inverse-condition", "n=0", lhs0, fb.convert(c), fb,
                     bound=bound0, tol=tol))

    unit = FunctionDescriptor.identity()
    inv1m = FunctionDescriptor.inv1m()
    invv = FunctionDescriptor.inv()
    for n in range(1, inverse_n_max + 1):
        word = [Letter(LEFT, inv1m)]
        for _ in range(n - 1):
            word.append(Letter(LEFT, unit))
            word.append(Letter(RIGHT, unit))
        word.append(Letter(LEFT, unit))
        ex = _certified(fengine, word, degrees)
        rhs = fb.convert(c) * fengine.joint_moment(
            [Letter(LEFT, unit), Letter(RIGHT, unit)] * n
        )
        rows.append(_row("inverse-condition", f"n={n}", ex.value, rhs, fb,
                         bound=ex.error_bound, tol=tol))

    word0 = [Letter(LEFT, inv1m), Letter(RIGHT, invv),
             Letter(LEFT, inv1m), Letter(RIGHT, invv)]
    ex0 = _certified(fengine, word0, degrees)
    rows.append(_row("inverse-square-condition", "n=0", ex0.value,
                     fb.convert(d), fb, bound=ex0.error_bound, tol=tol))
    for n in range(1, inverse_n_max + 1):
        # the word inv1m(U) V^{-1} inv1m(U) (UV)^{n-1} U from the traciality reduction
        word = [Letter(LEFT, inv1m), Letter(RIGHT, invv), Letter(LEFT, inv1m)]
        for _ in range(n - 1):
            word.append(Letter(LEFT, unit))
            word.append(Letter(RIGHT, unit))
        word.append(Letter(LEFT, unit))
        ex = _certified(fengine, word, degrees)
        rhs = fb.convert(d) * fengine.joint_moment(
            [Letter(LEFT, unit), Letter(RIGHT, unit)] * n
        )
        rows.append(_row("inverse-square-condition", f"n={n}", ex.value, rhs,
                         fb, bound=ex.error_bound, tol=tol))
    return rows


def _certified(engine, word, degrees):
    """joint_moment_certified with per-kind expansion degrees."""
    deg = max(degrees.values())
    poly_letters = []
    norms, rems = [], []
    for letter in word:
        kind_deg = degrees["inv"] if letter.fn.kind == "inv" else degrees["geom"]
        coeffs, func_norm, rem = engine._polynomialize(letter, kind_deg)
        poly_letters.append(Letter(letter.side, FunctionDescriptor.poly(coeffs)))
        norms.append(func_norm + rem)
        rems.append(rem)
    value = engine.joint_moment(poly_letters)
    clean = engine.backend.one
    padded = engine.backend.one
    for g, r in zip(norms, rems):
        clean = clean * g
        padded = padded * (g + r)
    from .distributions import Expectation

    return Expectation(value, padded - clean)


def _binomial_upper_edge(sigma, theta):
    s = sigma + theta
    a = math.sqrt(sigma / s * (1 - 1 / s))
    b = math.sqrt(1 / s * (1 - sigma / s))
    edge = (a + b) ** 2
    if 0 < theta < 1:
        edge = 1.0
    return edge * (1 + 1e-9)


def _midpoint_tail(lo, hi, degree):
    c = (lo + hi) / 2
    r = max(hi - c, c - lo) / c
    return (1 / c) * r ** (degree + 1) / (1 - r)


def _pick_degree(tail_fn, target):
    degree = 8
    while tail_fn(degree) > target:
        degree *= 2
        if degree > 1 << 16:
            raise DivergenceError(
                "cannot certify the requested tolerance; spectrum too wide"
            )
    low, high = degree // 2, degree
    while low + 1 < high:
        mid = (low + high) // 2
        if tail_fn(mid) > target:
            low = mid
        else:
            high = mid
    return high


# -- dual property ---------------------------------------------------------------


class TransformedPairOracle(MomentOracle):
    """Moments of words in X1 = V^{1/2} U V^{1/2} and Y1 = V - X1.

    Words expand multilinearly in Y1; every term is a trace of a product
    of V-powers and X1's, which reduces to an integer word in U and V by
    cyclic rotation (the half powers always pair up under the trace).
    """

    def __init__(self, engine):
        super().__init__(engine.backend)
        self.engine = engine
        self._trace_cache = {}

    def _moment(self, word):
        total = self.backend.zero
        y_positions = [i for i, l in enumerate(word) if l == "Y"]
        base = list(word)
        for choice in product((0, 1), repeat=len(y_positions)):
            seq = base[:]
            sign = 1
            for pos, pick_x in zip(y_positions, choice):
                if pick_x:
                    seq[pos] = "X"
                    sign = -sign
                else:
                    seq[pos] = "V"
            total += sign * self._x1v_trace(tuple(seq))
        return total

    def _x1v_trace(self, seq):
        try:
            return self._trace_cache[seq]
        except KeyError:
            pass
        # items: ("U",) or ["V", half-power count]
        items = []

        def add_v(halves):
            if halves == 0:
                return
            if items and items[-1][0] == "V":
                items[-1][1] += halves
            else:
                items.append(["V", halves])

        for token in seq:
            if token == "V":
                add_v(2)
            else:
                add_v(1)
                items.append(["U"])
                add_v(1)
        if len(items) > 1 and items[0][0] == "V" and items[-1][0] == "V":
            items[0][1] += items.pop()[1]
        if all(it[0] == "V" for it in items):
            halves = items[0][1] if items else 0
            if halves % 2:
                raise CapabilityError("unreduced half power in a pure V word")
            value = self.engine.right_moment(halves // 2)
        else:
            while items[0][0] != "U":
                items.append(items.pop(0))
            letters = []
            for it in items:
                if it[0] == "U":
                    letters.append(Letter(LEFT, FunctionDescriptor.identity()))
                else:
                    if it[1] % 2:
                        raise CapabilityError(
                            "unreduced half power of V in a mixed word"
                        )
                    p = it[1] // 2
                    if p:
                        letters.append(
                            Letter(RIGHT, FunctionDescriptor.monomial(p))
                        )
            value = self.engine.joint_moment(letters)
        self._trace_cache[seq] = value
        return value


def dual_lukacs_check(lam, kap, alpha, max_order=6, moment_order=8, backend=EXACT):
    """Exact verification that the transformed pair is free with the two
    Poisson marginals of shapes lam and kap and common scale alpha."""
    lam = backend.convert(lam)
    kap = backend.convert(kap)
    alpha = backend.convert(alpha)
    order = 2 * max(max_order, moment_order) + 6
    u_law = free_binomial(lam, kap, order, backend)
    v_law = free_poisson(alpha, lam + kap, order, backend)
    engine = FreeProduct(u_law, v_law, word_cap=4 * max(max_order, moment_order) + 8)
    oracle = TransformedPairOracle(engine)
    x_target = free_poisson(alpha, lam, moment_order, backend)
    y_target = free_poisson(alpha, kap, moment_order, backend)
    rows = []
    for n in range(1, moment_order + 1):
        rows.append(_row("x1-marginal", f"n={n}", oracle.moment(("X",) * n),
                         x_target.moment(n), backend))
    for n in range(1, moment_order + 1):
        rows.append(_row("y1-marginal", f"n={n}", oracle.moment(("Y",) * n),
                         y_target.moment(n), backend))
    report = freeness_report(oracle, {"X": "X", "Y": "Y"}, max_order)
    for row in report.rows:
        rows.append(CheckRow("mixed-cumulant", "".join(row.tags), row.value,
                             backend.zero, abs(row.value), backend.zero, row.ok))
    return rows, report


# -- direct property --------------------------------------------------------------


class SumPairEvaluator:
    """phi of words in a free-Poisson generator X (shape lam, scale alpha)
    and the sum V = X + Y (Y free of X, shape kap, same scale).

    Every block weight of the pair is alpha^|B| * (lam + kap * [B all V]),
    because mixed free cumulants of X and Y vanish; the first-block
    recursion then runs as a quadratic dynamic program per word.
    """

    def __init__(self, lam, kap, alpha, backend):
        self.lam = backend.convert(lam)
        self.kap = backend.convert(kap)
        self.alpha = backend.convert(alpha)
        self.backend = backend
        self._memo = {}

    @staticmethod
    def _trace_key(word):
        runs = []
        for letter in word:
            if runs and runs[-1][0] == letter:
                runs[-1][1] += 1
            else:
                runs.append([letter, 1])
        if len(runs) > 1 and runs[0][0] == runs[-1][0]:
            runs[0][1] += runs.pop()[1]
        runs = [tuple(r) for r in runs]
        best = None
        for candidate in (runs, list(reversed(runs))):
            for i in range(len(candidate)):
                rot = tuple(candidate[i:] + candidate[:i])
                if best is None or rot < best:
                    best = rot
        return best

    def phi(self, word):
        if not word:
            return self.backend.one
        key = self._trace_key(word)
        try:
            return self._memo[key]
        except KeyError:
            pass
        n = len(word)
        alpha = self.alpha
        seg = {}

        def segment(i, j):
            if j <= i:
                return self.backend.one
            value = seg.get((i, j))
            if value is None:
                value = self.phi(word[i:j])
                seg[(i, j)] = value
            return value

        h_all = [None] * n
        h_v = [None] * n
        for i in range(n - 1, -1, -1):
            acc_all = segment(i + 1, n)
            acc_v = acc_all
            for j in range(i + 1, n):
                mid = segment(i + 1, j)
                acc_all += mid * h_all[j]
                if word[j] == "V":
                    acc_v += mid * h_v[j]
            h_all[i] = alpha * acc_all
            h_v[i] = alpha * acc_v
        total = self.lam * h_all[0]
        if word[0] == "V":
            total += self.kap * h_v[0]
        self._memo[key] = total
        return total


class DirectPairMoments:
    """Certified joint moments of (U, V) = ((X+Y)^{-1/2} X (X+Y)^{-1/2}, X+Y)
    over free Poisson X, Y: traces reduce to {X, V-power} words, V^{-1} is
    replaced by its certified midpoint polynomial, and every moment carries
    a propagated error bound."""

    def __init__(self, lam, kap, alpha, approx_degree, backend):
        self.backend = backend
        self.evaluator = SumPairEvaluator(lam, kap, alpha, backend)
        lam_f = backend.to_float(backend.convert(lam))
        kap_f = backend.to_float(backend.convert(kap))
        alpha_f = backend.to_float(backend.convert(alpha))
        shape_v = lam_f + kap_f
        self.lo_v = alpha_f * (1 - math.sqrt(shape_v)) ** 2 * (1 - 1e-9)
        self.hi_v = alpha_f * (1 + math.sqrt(shape_v)) ** 2 * (1 + 1e-9)
        self.hi_x = alpha_f * (1 + math.sqrt(lam_f)) ** 2 * (1 + 1e-9)
        self.qcoeffs, self.qrem = reciprocal_truncation(
            approx_degree, self.lo_v, self.hi_v, backend
        )
        self._memo = {}

    def uv_moment(self, word):
        """(value, error bound) of phi of a word over letters 'u', 'v'."""
        word = tuple(word)
        key = SumPairEvaluator._trace_key(word)
        try:
            return self._memo[key]
        except KeyError:
            pass
        runs = list(key)
        backend = self.backend
        if all(l == "v" for l, _ in runs):
            count = sum(c for _, c in runs)
            result = (self.evaluator.phi(("V",) * count), backend.zero)
        else:
            while runs[0][0] != "u":
                runs.append(runs.pop(0))
            template = []
            slots = 0
            for letter, count in runs:
                if letter == "u":
                    for i in range(count):
                        template.append("X")
                        if i < count - 1:
                            template.append(None)
                            slots += 1
                else:
                    template.extend(["V"] * (count - 1))
            if runs[-1][0] == "u":  # pure-u word: the wrap contributes one more inverse
                template.append(None)
                slots += 1
            value = self._expand_slots(template, slots)
            bound = self._replacement_bound(template, slots)
            result = (value, bound)
        self._memo[key] = result
        return result

    def _expand_slots(self, template, slots):
        backend = self.backend
        slot_positions = [i for i, t in enumerate(template) if t is None]
        if not slots:
            return self.evaluator.phi(tuple(template))
        total = backend.zero
        degree = len(self.qcoeffs) - 1
        for fill in product(range(degree + 1), repeat=slots):
            coeff = backend.one
            for d in fill:
                coeff = coeff * self.qcoeffs[d]
            if coeff == 0:
                continue
            flat = []
            it = iter(fill)
            for t in template:
                if t is None:
                    flat.extend(["V"] * next(it))
                else:
                    flat.append(t)
            total += coeff * self.evaluator.phi(tuple(flat))
        return total

    def _replacement_bound(self, template, slots):
        backend = self.backend
        g_clean = backend.one
        g_padded = backend.one
        hi_x = backend.convert(self.hi_x)
        hi_v = backend.convert(self.hi_v)
        g_slot = backend.one / backend.convert(self.lo_v) + self.qrem
        for t in template:
            if t == "X":
                g_clean, g_padded = g_clean * hi_x, g_padded * hi_x
            elif t == "V":
                g_clean, g_padded = g_clean * hi_v, g_padded * hi_v
            else:
                g_clean = g_clean * g_slot
                g_padded = g_padded * (g_slot + self.qrem)
        return g_padded - g_clean


def _pair_add(a, b):
    return (a[0] + b[0], a[1] + b[1])


def _pair_sub(a, b):
    return (a[0] - b[0], a[1] + b[1])


def _pair_mul(a, b):
    return (a[0] * b[0], abs(a[0]) * b[1] + abs(b[0]) * a[1] + a[1] * b[1])


class _CertifiedCumulants:
    """Free-cumulant recursion over (value, bound) pairs."""

    def __init__(self, moments, backend):
        self.moments = moments  # word -> (value, bound)
        self.backend = backend
        self._cache = {}

    def kappa(self, word):
        word = tuple(word)
        if len(word) == 1:
            return self.moments(word)
        try:
            return self._cache[word]
        except KeyError:
            pass
        n = len(word)
        total = self.moments(word)
        for size in range(0, n - 1):
            for chosen in combinations(range(1, n), size):
                block = (0,) + chosen
                term = self.kappa(tuple(word[i] for i in block))
                bounds = block + (n,)
                for a, b in zip(bounds, bounds[1:]):
                    gap = word[a + 1 : b]
                    if gap:
                        term = _pair_mul(term, self.moments(gap))
                total = _pair_sub(total, term)
        self._cache[word] = total
        return total


def direct_lukacs_check(lam, kap, alpha, max_order=4, approx_degree=40,
                        tol=1e-6, dps=None):
    """Float verification that (U, V) built from two free Poissons is free:
    all non-constant mixed free cumulants up to `max_order` vanish within
    `tol`, with certified replacement error below it."""
    lam_q, kap_q, alpha_q = Fraction(lam), Fraction(kap), Fraction(alpha)
    if not lam_q + kap_q > 1:
        raise DomainError(
            "need lam + kap > 1 (the sum's spectrum stays away from zero),"
            f" got {lam_q + kap_q}"
        )
    lo = float(alpha_q) * (1 - math.sqrt(float(lam_q + kap_q))) ** 2
    hi = float(alpha_q) * (1 + math.sqrt(float(lam_q + kap_q))) ** 2
    if dps is None:
        dps = 40 + reciprocal_extra_digits(approx_degree, lo, hi) + 15
    backend = FloatBackend(dps=dps)
    moments = DirectPairMoments(lam_q, kap_q, alpha_q, approx_degree, backend)
    calc = _CertifiedCumulants(moments.uv_moment, backend)
    rows = []
    worst_bound = backend.zero
    for order in range(2, max_order + 1):
        for pattern in product("uv", repeat=order):
            if len(set(pattern)) < 2:
                continue
            value, bound = calc.kappa(pattern)
            worst_bound = max(worst_bound, bound)
            ok = abs(value) <= backend.convert(tol)
            rows.append(CheckRow("mixed-cumulant", "".join(pattern), value,
                                 backend.zero, abs(value), bound, ok))
    if worst_bound > backend.convert(tol):
        raise DivergenceError(
            f"certified replacement error {backend.format(worst_bound)} exceeds"
            f" the tolerance {tol}; increase approx_degree"
        )
    # exact check of the sum's marginal against the convolved Poisson law
    exact_eval = SumPairEvaluator(lam_q, kap_q, alpha_q, EXACT)
    v_target = free_poisson(alpha_q, lam_q + kap_q, max_order + 2, EXACT)
    for n in range(1, max_order + 3):
        rows.append(_row("sum-marginal", f"n={n}",
                         exact_eval.phi(("V",) * n), v_target.moment(n), EXACT))
    return rows


# -- scalar and series identities --------------------------------------------------


def scalar_identity_rows(grid=None):
    """Exact check of the rational identity
    x/(1-x) * (t x/(1-t x) + 1) == (t x/(1-t x) - x/(1-x)) / (t - 1)."""
    if grid is None:
        xs = [Fraction(1, 5), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3)]
        ts = [Fraction(1, 7), Fraction(1, 3), Fraction(3), Fraction(-2)]
        grid = [(x, t) for x in xs for t in ts]
    rows = []
    for x, t in grid:
        if t == 1 or t * x == 1 or x == 1:
            continue
        lhs = x / (1 - x) * (t * x / (1 - t * x) + 1)
        rhs = (t * x / (1 - t * x) - x / (1 - x)) / (t - 1)
        rows.append(_row("resolvent-difference-identity", f"x={x}, t={t}",
                         lhs, rhs, EXACT))
    return rows


def word_identity_rows(dist_u, dist_v, order, m_max=2):
    """Check the sandwich-word reduction through the engine: for each n the
    trace of U(VU)^{n-1} V^m equals the trace of its cyclic rearrangement
    (UV)^{n-1} U V^m, evaluated as different letter sequences."""
    engine = FreeProduct(dist_u, dist_v, word_cap=2 * order + m_max + 4)
    unit = FunctionDescriptor.identity()
    rows = []
    for n in range(1, order + 1):
        for m in range(m_max + 1):
            lhs_word = [Letter(LEFT, unit)]
            for _ in range(n - 1):
                lhs_word.append(Letter(RIGHT, unit))
                lhs_word.append(Letter(LEFT, unit))
            if m:
                lhs_word.append(Letter(RIGHT, FunctionDescriptor.monomial(m)))
            rhs_word = []
            for _ in range(n - 1):
                rhs_word.append(Letter(LEFT, unit))
                rhs_word.append(Letter(RIGHT, unit))
            rhs_word.append(Letter(LEFT, unit))
            if m:
                rhs_word.append(Letter(RIGHT, FunctionDescriptor.monomial(m)))
            rows.append(_row("sandwich-word-reduction", f"n={n}, m={m}",
                             engine.joint_moment(lhs_word),
                             engine.joint_moment(rhs_word),
                             engine.backend))
    return rows


def regression_series_identities(alpha, b, c, order, backend=EXACT, d=None):
    """Series identities tying the subordination of the characterized pair
    to the regression constants:
      z (M_U(w2) - alpha) == c (w2 - 1) M_U(w2)
      w2 + (w2 - 1) M_U(w2) == b z (M_U(w2) + 1)
    and the same with b replaced by d/c^3 when d is supplied."""
    constants = RegressionConstants(alpha=alpha, b=b, c=c)
    (sigma, theta), (alpha_v, lambda_v) = params_from_constants(constants, TH1, backend)
    law_order = 2 * order + 6
    u_law = free_binomial(sigma, theta, law_order, backend)
    v_law = free_poisson(alpha_v, lambda_v, law_order, backend)
    pair = omega_pair(u_law, v_law, order)
    w2 = pair.omega2
    from .series import compose

    m_u = compose(u_law.moment_series(order), w2)
    alpha = backend.convert(alpha)
    b = backend.convert(b)
    c = backend.convert(c)
    rows = []
    lhs12 = m_u.add_constant(-alpha).shift_up(1).truncate(order)
    rhs12 = (w2.add_constant(-1) * m_u * c).truncate(order)
    rows.append(_series_row("inverse-condition-series", lhs12, rhs12, backend))
    lhs11 = w2 + w2.add_constant(-1) * m_u
    rhs11 = (m_u.add_constant(1) * b).shift_up(1).truncate(order)
    rows.append(_series_row("mean-condition-series", lhs11, rhs11, backend))
    if d is not None:
        d = backend.convert(d)
        rhs_d = (m_u.add_constant(1) * (d / c**3)).shift_up(1).truncate(order)
        rows.append(_series_row("second-inverse-series", lhs11, rhs_d, backend))
    return rows


def _series_row(name, lhs, rhs, backend):
    upto = min(lhs.order, rhs.order)
    delta = lhs.max_delta(rhs, through=upto)
    ok = delta == 0 if backend.exact else delta <= backend.tolerance
    return CheckRow(name, f"through order {upto}",
                    lhs.coeffs[: upto + 1], rhs.coeffs[: upto + 1], delta,
                    backend.zero, ok)
