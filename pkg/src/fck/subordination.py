"""Subordination series of a free product, by two independent routes.

The product's moment series M_{UV} is matched through either factor:
M_{UV} = M_V(omega1) = M_U(omega2).  The Boolean route fills omega's
coefficients with odd alternating Boolean cumulants of the pair and needs
no reversion precondition; the reversion route inverts a marginal moment
series and composes it with M_{UV}.  Both must agree coefficientwise.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cumulants import CumulantCalculator
from .errors import ReversionDomainError
from .freeprod import FreeProduct
from .series import TruncatedSeries, compose, revert

BOOLEAN_ROUTE = "boolean"
REVERSION_ROUTE = "reversion"


@dataclass(frozen=True)
class SubordinationPair:
    omega1: TruncatedSeries
    omega2: TruncatedSeries
    source: str


def product_moment_series(dist_u, dist_v, order, engine=None):
    """M_{UV}(z) = sum_n phi((UV)^n) z^n via the joint-moment engine."""
    engine = engine or FreeProduct(dist_u, dist_v)
    backend = engine.backend
    u, v = engine.left_unit(), engine.right_unit()
    coeffs = [backend.zero]
    for n in range(1, order + 1):
        coeffs.append(engine.joint_moment([u, v] * n))
    return TruncatedSeries(backend, coeffs)


def omega_pair(dist_u, dist_v, order, route=BOOLEAN_ROUTE):
    """Subordination pair (omega1, omega2) at the given order."""
    engine = FreeProduct(dist_u, dist_v, word_cap=max(2 * order + 2, 16))
    backend = engine.backend
    if route == BOOLEAN_ROUTE:
        calc = CumulantCalculator(engine.oracle(), word_cap=2 * order + 1)
        u, v = engine.left_unit(), engine.right_unit()

        def omega(first, second):
            coeffs = [backend.zero]
            for k in range(1, order + 1):
                word = []
                for i in range(k):
                    word.append(first)
                    if i < k - 1:
                        word.append(second)
                coeffs.append(calc.boolean_cumulant(tuple(word)))
            return TruncatedSeries(backend, coeffs)

        return SubordinationPair(omega(u, v), omega(v, u), BOOLEAN_ROUTE)
    if route == REVERSION_ROUTE:
        if dist_u.moment(1) == 0 or dist_v.moment(1) == 0:
            raise ReversionDomainError(
                "the reversion route needs both first moments nonzero"
            )
        muv = product_moment_series(dist_u, dist_v, order, engine)
        m_u = dist_u.moment_series(order)
        m_v = dist_v.moment_series(order)
        omega1 = compose(revert(m_v), muv)
        omega2 = compose(revert(m_u), muv)
        return SubordinationPair(omega1, omega2, REVERSION_ROUTE)
    raise ValueError(f"unknown subordination route {route!r}")


def subordination_identities(dist_u, dist_v, order):
    """Return (M_UV, M_V(omega1), M_U(omega2)) for identity checking."""
    pair = omega_pair(dist_u, dist_v, order)
    muv = product_moment_series(dist_u, dist_v, order)
    via_v = compose(dist_v.moment_series(order), pair.omega1)
    via_u = compose(dist_u.moment_series(order), pair.omega2)
    return muv, via_v, via_u
