"""One-shot verification battery: every module's identities as report rows.

Each check emits rows (id, params, lhs, rhs, delta, verdict); the suite
runs modules in dependency order and is byte-reproducible on the exact
backend for a fixed (config, seed).  Randomized sweeps draw parameters
through the documented integer-to-rational scheme in
cumulants.seeded_rational.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from . import condexp, cumulants, distributions, freeprod, lukacs, partitions
from . import subordination as subord
from .errors import FckError
from .funcdesc import FunctionDescriptor
from .scalars import EXACT, FloatBackend, get_backend
from .series import TruncatedSeries, backward_shift, compose, revert, tail_sum_series

MODULE_ORDER = [
    "partitions", "series", "cumulants", "distributions",
    "freeprod", "subordination", "condexp", "lukacs",
]


@dataclass
class RunConfig:
    order: int = 12
    backend: str = "exact"
    precision: int = 100
    tolerance: str = None
    seed: int = 0
    fmt: str = "plain"

    def resolve_backend(self):
        return get_backend(self.backend, self.precision, self.tolerance)


@dataclass(frozen=True)
class Row:
    check: str
    params: str
    lhs: str
    rhs: str
    delta: str
    ok: bool


@dataclass
class Report:
    rows: list = field(default_factory=list)

    @property
    def ok(self):
        return all(r.ok for r in self.rows)

    def failures(self):
        return [r for r in self.rows if not r.ok]


def _fmt(backend, value):
    if isinstance(value, (tuple, list)):
        return "[" + ", ".join(_fmt(backend, v) for v in value) + "]"
    if isinstance(value, (bool, int, str)):
        return str(value)
    try:
        return backend.format(value)
    except Exception:
        return str(value)


def _value_row(check, params, lhs, rhs, backend, tol=None):
    if isinstance(lhs, (tuple, list)):
        ok = list(lhs) == list(rhs)
        delta = "0" if ok else "mismatch"
    else:
        delta_v = backend.abs_delta(lhs, rhs)
        ok = (delta_v == 0) if backend.exact else backend.is_zero(delta_v, tol)
        delta = _fmt(backend, delta_v)
    return Row(check, params, _fmt(backend, lhs), _fmt(backend, rhs), delta, ok)


def _bool_row(check, params, condition):
    return Row(check, params, str(bool(condition)), "True",
               "0" if condition else "1", bool(condition))


def _series_row(check, params, lhs, rhs, backend, tol=None):
    upto = min(lhs.order, rhs.order)
    ok = lhs.agrees(rhs, tol=tol, through=upto)
    delta = lhs.max_delta(rhs, through=upto)
    return Row(check, params,
               _fmt(backend, lhs.coeffs[: upto + 1]),
               _fmt(backend, rhs.coeffs[: upto + 1]),
               _fmt(backend, delta), ok)


# -- module batteries ------------------------------------------------------------


def check_partitions(config):
    rows = []
    nc_direct, nc_filter, int_direct, int_filter = [], [], [], []
    for n in range(1, 9):
        full = partitions.enumerate_partitions(n, partitions.Family.ALL)
        nc_filter.append(sum(1 for p in full if partitions.is_noncrossing(p)))
        int_filter.append(sum(1 for p in full if partitions.is_interval(p)))
        nc_direct.append(len(partitions.enumerate_partitions(n, "nc")))
        int_direct.append(len(partitions.enumerate_partitions(n, "int")))
    rows.append(_value_row("partitions/noncrossing-counts-vs-filter", "n=1..8",
                           nc_direct, nc_filter, EXACT))
    rows.append(_value_row("partitions/interval-counts-vs-power", "n=1..8",
                           int_direct, [2 ** (n - 1) for n in range(1, 9)], EXACT))
    n = 5
    family = partitions.enumerate_partitions(n, "all")
    leq = partitions.leq
    reflexive = all(leq(p, p) for p in family)
    antisym = all(
        not (leq(p, q) and leq(q, p)) or p == q
        for p in family for q in family
    )
    transitive = all(
        not (leq(p, q) and leq(q, r)) or leq(p, r)
        for p in family for q in family for r in family
        if leq(p, q) and leq(q, r)
    )
    rows.append(_bool_row("partitions/reversed-refinement-is-partial-order",
                          f"n={n}", reflexive and antisym and transitive))
    join_ok = True
    for p in family:
        for q in family:
            j = partitions.join(p, q)
            if not (leq(p, j) and leq(q, j)):
                join_ok = False
            for r in family:
                if leq(p, r) and leq(q, r) and not leq(j, r):
                    join_ok = False
    rows.append(_bool_row("partitions/join-is-least-upper-bound", f"n={n}", join_ok))
    ints = partitions.enumerate_partitions(7, "int")
    closed = all(
        partitions.is_interval(partitions.join(p, q)) for p in ints for q in ints
    )
    rows.append(_bool_row("partitions/interval-join-closed", "n=7", closed))
    n = 6
    full = set(partitions.enumerate_partitions(n, "all"))
    nc = set(partitions.enumerate_partitions(n, "nc"))
    iv = set(partitions.enumerate_partitions(n, "int"))
    rows.append(_bool_row("partitions/family-containments", f"n={n}",
                          iv <= nc <= full))
    return rows


def _random_series(backend, rng, order, nonzero_const=False, vanishing=False):
    coeffs = [cumulants.seeded_rational(rng) for _ in range(order + 1)]
    if vanishing:
        coeffs[0] = Fraction(0)
        if coeffs[1] == 0:
            coeffs[1] = Fraction(1, 2)
    elif nonzero_const and coeffs[0] == 0:
        coeffs[0] = Fraction(1, 3)
    return TruncatedSeries(backend, coeffs)


def check_series(config):
    rng = random.Random(config.seed)
    order = min(config.order, 12)
    rows = []
    a = _random_series(EXACT, rng, order)
    b = _random_series(EXACT, rng, order)
    c = _random_series(EXACT, rng, order)
    rows.append(_series_row("series/product-associativity", f"order={order}",
                            (a * b) * c, a * (b * c), EXACT))
    rows.append(_series_row("series/distributivity", f"order={order}",
                            a * (b + c), a * b + a * c, EXACT))
    d = _random_series(EXACT, rng, order, nonzero_const=True)
    rows.append(_series_row("series/division-roundtrip", f"order={order}",
                            (a / d) * d, a, EXACT))
    ok = True
    for _ in range(5):
        f = _random_series(EXACT, rng, order, vanishing=True)
        if not compose(f, revert(f)).agrees(TruncatedSeries.identity(EXACT, order)):
            ok = False
    rows.append(_bool_row("series/reversion-roundtrip", "5 random series", ok))
    h = _random_series(EXACT, rng, order)
    shifted = backward_shift(h, 1).shift_up(1).add_constant(h.coeffs[0])
    rows.append(_series_row("series/shift-reconstruction", f"order={order}",
                            shifted, h, EXACT))
    h1 = sum(h.coeffs, Fraction(0))  # finite polynomial: the full value at 1
    ts = tail_sum_series(h, h1)
    recon = ts.shift_up(1).truncate(order) - ts + TruncatedSeries.constant(EXACT, h1, order)
    rows.append(_series_row("series/tail-sum-reconstruction", f"order={order}",
                            recon, h, EXACT))
    return rows


def check_cumulants(config):
    rng = random.Random(config.seed + 1)
    rows = []
    word = tuple("abcdef")
    for kind in (cumulants.FREE, cumulants.BOOLEAN):
        ok = True
        for trial in range(3):
            oracle = cumulants.seeded_dict_oracle(EXACT, rng.randint(0, 10**6), word, kind)
            table = cumulants.build_cumulant_table(oracle, word, kind)
            if cumulants.moments_from_cumulants(table, word) != oracle.moment(word):
                ok = False
        rows.append(_bool_row(f"cumulants/{kind}-roundtrip", "3 seeds, n=6", ok))
    word = tuple("abcde")
    oracle = cumulants.seeded_dict_oracle(EXACT, config.seed + 2, word, cumulants.BOOLEAN)
    ok = True
    for grouping in partitions.enumerate_partitions(5, "int"):
        lhs = cumulants.grouped_boolean_cumulant(oracle, word, grouping)
        rhs = cumulants.grouped_boolean_direct(oracle, word, grouping)
        if lhs != rhs:
            ok = False
    rows.append(_bool_row("cumulants/grouped-products-vs-join-sum",
                          "n=5, all interval groupings", ok))
    xs = cumulants.seeded_moment_sequence(config.seed + 3, 12)
    ys = cumulants.seeded_moment_sequence(config.seed + 4, 12)
    engine = freeprod.FreeProduct.from_moment_sequences(xs, ys, EXACT, 12)
    calc = engine.calculator()
    u, v = engine.left_unit(), engine.right_unit()
    mixed_ok = all(
        calc.free_cumulant(tuple(u if t == "u" else v for t in pattern)) == 0
        for r in range(2, 6)
        for pattern in product("uv", repeat=r)
        if len(set(pattern)) > 1
    )
    rows.append(_bool_row("cumulants/mixed-free-cumulants-vanish",
                          "free pair, order<=5", mixed_ok))
    ok1 = ok2 = ok3 = True
    for n in range(1, 5):
        direct = engine.joint_moment([u, v] * n)
        p1 = cumulants.alternating_moment_mixed(xs, ys, n, cumulants.BOCU1, EXACT)
        p2 = cumulants.alternating_moment_mixed(xs, ys, n, cumulants.REFORMULATED, EXACT)
        ok1 = ok1 and p1 == direct
        ok2 = ok2 and p2 == direct
        if n <= 3:
            left, right = cumulants.odd_alternating_boolean(xs, ys, n, EXACT)
            ok3 = ok3 and left == right
    rows.append(_bool_row("cumulants/alternating-moment-outer-cut-sum",
                          "n<=4 vs engine", ok1))
    rows.append(_bool_row("cumulants/alternating-moment-gap-composition-sum",
                          "n<=4 vs engine", ok2))
    rows.append(_bool_row("cumulants/odd-boolean-nested-sum", "n<=3", ok3))
    return rows


def check_distributions(config):
    rows = []
    a, lam = Fraction(2, 3), Fraction(5, 2)
    d = distributions.free_poisson(a, lam, 10, EXACT)
    s = distributions.transform_series(d, "s")
    closed = TruncatedSeries.one(EXACT, s.order) / TruncatedSeries(
        EXACT, [a * lam, a] + [0] * (s.order - 1)
    )
    rows.append(_series_row("distributions/poisson-multiplicative-transform",
                            f"alpha={a}, shape={lam}", s, closed, EXACT))
    kk = distributions.free_cumulants_from_moments(EXACT, d.moments)
    rows.append(_value_row("distributions/poisson-cumulant-sequence",
                           "lam*alpha^k vs generic inversion",
                           list(kk), [lam * a**k for k in range(1, 11)], EXACT))
    sg, th = Fraction(1), Fraction(2)
    db = distributions.free_binomial(sg, th, 10, EXACT)
    sb = distributions.transform_series(db, "s")
    n = sb.order
    closed_b = TruncatedSeries.one(EXACT, n) + (
        TruncatedSeries.constant(EXACT, th, n)
        / TruncatedSeries(EXACT, [sg, 1] + [0] * (n - 1))
    )
    rows.append(_series_row("distributions/binomial-multiplicative-transform",
                            f"sigma={sg}, theta={th}", sb, closed_b, EXACT))
    base = distributions.bernoulli(Fraction(1, 3), Fraction(1, 4), 8, EXACT)
    conv = base
    for _ in range(3):
        conv = distributions.free_convolve(conv, base)
    target = distributions.free_binomial(4 * Fraction(2, 3), 4 * Fraction(1, 3), 8, EXACT)
    rows.append(_value_row("distributions/two-point-convolution-power",
                           "4-fold, p=1/3, jump=1/4",
                           list(conv.moments), list(target.moments), EXACT))
    p1 = distributions.free_poisson(a, Fraction(1, 2), 8, EXACT)
    p2 = distributions.free_poisson(a, Fraction(3), 8, EXACT)
    p12 = distributions.free_poisson(a, Fraction(7, 2), 8, EXACT)
    rows.append(_value_row("distributions/poisson-convolution-adds-shapes",
                           "1/2 + 3", list(distributions.free_convolve(p1, p2).moments),
                           list(p12.moments), EXACT))
    rho = db.support.hi
    ok = all(
        db.moments[n - 1] <= Fraction(rho) ** n for n in range(1, db.order + 1)
    )
    rows.append(_bool_row("distributions/support-bound-dominates-moments",
                          f"rho={rho:.6f}", ok))
    fb = FloatBackend(dps=60)
    dp = distributions.free_poisson(1, 3, 12, fb)
    quad = distributions.expect_function(
        dp, FunctionDescriptor.identity(), distributions.QUADRATURE
    )
    rows.append(_value_row("distributions/quadrature-first-moment",
                           "poisson(1,3)", quad.value, dp.moments[0], fb, tol="1e-30"))
    dbf = distributions.free_binomial(1, 3, 12, fb)
    neu = distributions.expect_function(
        dbf, FunctionDescriptor.inv1m(), distributions.NEUMANN, 260
    )
    qdr = distributions.expect_function(
        dbf, FunctionDescriptor.inv1m(), distributions.QUADRATURE
    )
    budget = neu.error_bound + fb.convert("1e-25")
    rows.append(Row("distributions/certified-sum-vs-quadrature", "binomial(1,3)",
                    _fmt(fb, neu.value), _fmt(fb, qdr.value),
                    _fmt(fb, fb.abs_delta(neu.value, qdr.value)),
                    fb.abs_delta(neu.value, qdr.value) <= budget))
    return rows


def check_freeprod(config):
    rng = random.Random(config.seed + 5)
    rows = []
    xs = cumulants.seeded_moment_sequence(config.seed + 6, 14)
    ys = cumulants.seeded_moment_sequence(config.seed + 7, 14)
    engine = freeprod.FreeProduct.from_moment_sequences(xs, ys, EXACT, 14)
    u, v = engine.left_unit(), engine.right_unit()
    rows.append(_value_row("freeprod/singleton-factorization", "phi(UV)",
                           engine.joint_moment([u, v]), xs[0] * ys[0], EXACT))
    ok_center = ok_nc = ok_trace = True
    for _ in range(6):
        length = rng.randint(2, 6)
        word = []
        for i in range(length):
            side = freeprod.LEFT if (i + rng.randint(0, 1)) % 2 == 0 else freeprod.RIGHT
            power = rng.randint(1, 3)
            word.append(freeprod.Letter(side, FunctionDescriptor.monomial(power)))
        val = engine.joint_moment(word)
        if val != freeprod.joint_moment_by_centering(engine, word):
            ok_center = False
        if val != freeprod.joint_moment_by_nc_sum(engine, word):
            ok_nc = False
        for r in range(1, len(word)):
            if engine.joint_moment(word[r:] + word[:r]) != val:
                ok_trace = False
    rows.append(_bool_row("freeprod/recursion-vs-centering-definition",
                          "6 random words", ok_center))
    rows.append(_bool_row("freeprod/recursion-vs-lattice-enumeration",
                          "6 random words", ok_nc))
    rows.append(_bool_row("freeprod/tracial-rotation-invariance",
                          "6 random words", ok_trace))
    cu = freeprod.Letter(freeprod.LEFT, FunctionDescriptor.poly([-xs[0], 1]))
    cv = freeprod.Letter(freeprod.RIGHT, FunctionDescriptor.poly([-ys[0], 1]))
    alt_zero = all(
        engine.joint_moment([cu, cv] * k) == 0
        and engine.joint_moment([cv, cu] * k) == 0
        for k in range(1, 4)
    )
    rows.append(_bool_row("freeprod/centered-alternating-vanishes", "length<=6",
                          alt_zero))
    ys_bad = list(ys)
    ys_bad[1] += Fraction(1, 7)
    bad_engine = freeprod.FreeProduct.from_moment_sequences(xs, ys_bad, EXACT, 14)
    bad_oracle_value = bad_engine.joint_moment([u, v, u, v])
    honest = engine.joint_moment([u, v, u, v])
    rows.append(_bool_row("freeprod/perturbed-marginal-detected",
                          "second moment bumped", bad_oracle_value != honest))
    return rows


def check_subordination(config):
    rows = []
    pairs = [
        (Fraction(1), Fraction(2), Fraction(1), Fraction(3)),
        (Fraction(1, 2), Fraction(5, 2), Fraction(2), Fraction(3, 2)),
    ]
    order = min(config.order, 10)
    ok_routes = ok_ids = ok_first = True
    for sg, th, av, lv in pairs:
        u_law = distributions.free_binomial(sg, th, 2 * order + 4, EXACT)
        v_law = distributions.free_poisson(av, lv, 2 * order + 4, EXACT)
        boolean = subord.omega_pair(u_law, v_law, order, subord.BOOLEAN_ROUTE)
        reverted = subord.omega_pair(u_law, v_law, order, subord.REVERSION_ROUTE)
        ok_routes = ok_routes and boolean.omega1.agrees(reverted.omega1) \
            and boolean.omega2.agrees(reverted.omega2)
        muv, via_v, via_u = subord.subordination_identities(u_law, v_law, order)
        ok_ids = ok_ids and muv.agrees(via_v) and muv.agrees(via_u)
        ok_first = ok_first and boolean.omega1.coeffs[1] == u_law.moments[0] \
            and boolean.omega2.coeffs[1] == v_law.moments[0]
    rows.append(_bool_row("subordination/series-routes-agree",
                          f"2 pairs, order={order}", ok_routes))
    rows.append(_bool_row("subordination/product-series-through-either-factor",
                          f"2 pairs, order={order}", ok_ids))
    rows.append(_bool_row("subordination/leading-coefficients-are-means",
                          "2 pairs", ok_first))
    u_law = distributions.free_binomial(Fraction(1), Fraction(2), 20, EXACT)
    delta1 = distributions.point_mass(Fraction(1), 20, EXACT)
    pair = subord.omega_pair(u_law, delta1, 8)
    rows.append(_series_row("subordination/point-mass-gives-identity", "order=8",
                            pair.omega2, TruncatedSeries.identity(EXACT, 8), EXACT))
    return rows


def check_condexp(config):
    rows = []
    u_law = distributions.free_binomial(Fraction(1), Fraction(2), 40, EXACT)
    v_law = distributions.free_poisson(Fraction(1), Fraction(3), 40, EXACT)
    fid = FunctionDescriptor.identity()
    eta_long = condexp.eta_series(u_law, 10)
    rows.append(_series_row("condexp/double-shift-closed-form", "order=8",
                            condexp.eta_fg_series(fid, fid, u_law, 8),
                            backward_shift(eta_long, 2), EXACT))
    r = 3
    mom = u_law.moments_to(r)
    eta_r = condexp.eta_series(u_law, 8 + r)
    expected = None
    for j in range(1, r + 1):
        part = (backward_shift(eta_r, j) * mom[r - j]).truncate(8)
        expected = part if expected is None else expected + part
    rows.append(_series_row("condexp/monomial-weight-closed-form", f"r={r}",
                            condexp.eta_f_series(FunctionDescriptor.monomial(r), u_law, 8),
                            expected, EXACT))
    ok = True
    for fc, gc in product([(0, 1), (1, 2), (0, 0, 1)], repeat=2):
        f, g = FunctionDescriptor.poly(fc), FunctionDescriptor.poly(gc)
        lhs = condexp.eta_fg_series(f, g, u_law, 6, condexp.CLOSED_FORM)
        rhs = condexp.eta_fg_series(f, g, u_law, 6, condexp.DEFINITION)
        ok = ok and lhs.agrees(rhs)
        ok = ok and condexp.eta_f_series(f, u_law, 6, condexp.CLOSED_FORM).agrees(
            condexp.eta_f_series(f, u_law, 6, condexp.DEFINITION)
        )
    rows.append(_bool_row("condexp/definition-vs-closed-form", "poly degree<=2", ok))
    oracle = condexp.MarginalOracle(u_law)
    calc = cumulants.CumulantCalculator(oracle)
    g_fn = FunctionDescriptor.poly((1, 2))
    unit = FunctionDescriptor.identity()
    ok = True
    for r in range(1, 4):
        for i in range(1, 5):
            lhs = calc.boolean_cumulant(
                (g_fn,) + (unit,) * (r - 1) + (FunctionDescriptor.monomial(i),)
            )
            rhs = EXACT.zero
            for m in range(1, i + 1):
                rhs += calc.boolean_cumulant((g_fn,) + (unit,) * (r + m - 1)) * \
                    u_law.moment(i - m)
            if lhs != rhs:
                ok = False
    rows.append(_bool_row("condexp/power-entry-expansion", "r<=3, i<=4", ok))
    pair_rows = condexp.verify_pairing(fid, FunctionDescriptor.monomial(2),
                                       u_law, v_law, order=6, m_max=2)
    rows.append(_bool_row("condexp/pairing-vs-engine", "f=id, g=square, m<=2",
                          all(r.ok for r in pair_rows)))
    fb = FloatBackend(dps=60)
    u_f = distributions.free_binomial(1, 2, 12, fb)
    v_f = distributions.free_poisson(1, 3, 12, fb)
    form, vrows = condexp.verify_inverse_weighted(
        u_f, v_f, order=3, m_max=1, degree=260, tol="1e-8", tail_tol=1e-20
    )
    rows.append(_bool_row("condexp/inverse-weighted-pairing",
                          "order=3, m<=1, certified", all(r.ok for r in vrows)))
    rows.append(_value_row("condexp/inverse-weighted-at-zero", "A(0) = mean of drift",
                           form.a_series.coeffs[0], form.constants.alpha, fb,
                           tol="1e-20"))
    return rows


def check_lukacs(config):
    rng = random.Random(config.seed + 8)
    rows = []
    ok_solve = ok_th2 = ok_params = True
    for _ in range(2):
        alpha = abs(cumulants.seeded_rational(rng)) + Fraction(1, 4)
        b = abs(cumulants.seeded_rational(rng)) + 1
        c = abs(cumulants.seeded_rational(rng)) + Fraction(3, 2)
        constants = lukacs.RegressionConstants(alpha=alpha, b=b, c=c)
        res = lukacs.solve_regression_system(constants, 12)
        su, suv, sv = lukacs.closed_form_transforms(constants, 12)
        ok_solve = ok_solve and res.s_u.agrees(su) and res.s_uv.agrees(suv) \
            and res.s_v.agrees(sv)
        th2 = lukacs.RegressionConstants(alpha=alpha, c=c, d=b * c**3)
        res2 = lukacs.solve_regression_system(th2, 12, mode=lukacs.TH2)
        ok_th2 = ok_th2 and res2.s_u.agrees(res.s_u) and res2.s_v.agrees(res.s_v)
        (sg, th), (av, lv) = lukacs.params_from_constants(constants)
        ok_params = ok_params and sg + th == lv
    rows.append(_bool_row("lukacs/linear-system-vs-closed-forms",
                          "2 seeded triples, order 12", ok_solve))
    rows.append(_bool_row("lukacs/second-mode-reduces-to-first",
                          "d = b c^3", ok_th2))
    rows.append(_bool_row("lukacs/parameter-maps-consistent",
                          "sigma+theta = shape of V", ok_params))
    srows = lukacs.regression_series_identities(
        Fraction(1), Fraction(2), Fraction(1), min(config.order, 10), d=Fraction(2)
    )
    rows.append(_bool_row("lukacs/subordination-series-identities",
                          "alpha=1, b=2, c=1", all(r.ok for r in srows)))
    frows = lukacs.verify_regression_forward(
        Fraction(1), Fraction(3), Fraction(1), n_max=4,
        inverse_n_max=2, tol=Fraction(1, 10**18),
    )
    rows.append(_bool_row("lukacs/forward-regression-conditions",
                          "sigma=1, theta=3, mean-scale=1",
                          all(r.ok for r in frows)))
    drows, report = lukacs.dual_lukacs_check(
        Fraction(1), Fraction(2), Fraction(1), max_order=4, moment_order=5
    )
    rows.append(_bool_row("lukacs/transformed-pair-free-with-poisson-marginals",
                          "shape pair (1,2), scale 1, order<=4",
                          all(r.ok for r in drows) and report.free))
    direct_rows = lukacs.direct_lukacs_check(6, 6, 1, max_order=2, approx_degree=40)
    rows.append(_bool_row("lukacs/sum-and-compression-free",
                          "shapes (6,6), scale 1, order<=2",
                          all(r.ok for r in direct_rows)))
    for r in lukacs.scalar_identity_rows()[:3]:
        rows.append(_value_row("lukacs/resolvent-difference-identity", r.params,
                               r.lhs, r.rhs, EXACT))
    u_law = distributions.free_binomial(Fraction(1), Fraction(2), 20, EXACT)
    v_law = distributions.free_poisson(Fraction(1), Fraction(3), 20, EXACT)
    wrows = lukacs.word_identity_rows(u_law, v_law, 4)
    rows.append(_bool_row("lukacs/sandwich-word-reduction", "n<=4, m<=2",
                          all(r.ok for r in wrows)))
    return rows


CHECKS = {
    "partitions": check_partitions,
    "series": check_series,
    "cumulants": check_cumulants,
    "distributions": check_distributions,
    "freeprod": check_freeprod,
    "subordination": check_subordination,
    "condexp": check_condexp,
    "lukacs": check_lukacs,
}


def run_suite(config, scope="all"):
    report = Report()
    modules = MODULE_ORDER if scope == "all" else [scope]
    for name in modules:
        if name not in CHECKS:
            raise FckError(
                f"unknown scope {name!r}; expected one of {MODULE_ORDER} or 'all'"
            )
        try:
            report.rows.extend(CHECKS[name](config))
        except FckError as exc:
            report.rows.append(Row(f"{name}/errored", "", str(exc), "", "", False))
    return report
