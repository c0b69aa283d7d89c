"""Cash-or-nothing power digital under the one-sided tempered stable model.

Tempering the stable density by exp(lambda x) turns the cash digital into an
exponential incomplete moment of the stable law. Its residue series has two
families of poles: the double series in (n, m) and, where the two Gamma
factors' poles coincide, a single series that sums to an entire function of
``lambda * Y**(1/alpha)`` (a Mittag-Leffler function). The latter reduces to
the constant 1 when lambda = 0.
"""

from __future__ import annotations

import math

from .levy import Moneyness, TemperedModel
from .pricing import (
    DEFAULT_CONFIG,
    OptionKind,
    Scenario,
    _combine,
    _leg,
    incomplete_moment_grid,
    mittag_leffler_grid,
)
from .series import PriceResult, SeriesConfig
from .special import rgamma

__all__ = ["price_digital_cn_tempered", "atm_tempered_linear_approx"]


def price_digital_cn_tempered(
    scenario: Scenario,
    model: TemperedModel,
    config: SeriesConfig = DEFAULT_CONFIG,
    diagonal_poles: bool = True,
) -> PriceResult:
    """Tempered cash digital: pays 1 when S_T**u > K.

    With ``X = k_u + rho mu_minus tau`` and ``Y = -mu_minus tau`` the price is

        exp(-(r - lambda^a mu_minus) tau) / a * [E(lambda Y^(1/a)) + P_lambda(X)]

    where ``P_lambda`` is :func:`incomplete_moment_grid` and
    ``E(z) = sum z^m / Gamma(1 + m/a)``. Passing ``diagonal_poles=False``
    replaces ``E`` by 1, which is exact only for lambda = 0.
    """
    if scenario.kind is not OptionKind.DIGITAL_CN:
        raise ValueError(f"scenario kind {scenario.kind.value!r} is not a cash digital")
    a, lam, tau = model.alpha_minus, model.lambda_minus, scenario.tau
    mu_m = model.mu_minus
    y = -mu_m * tau
    k_u = Moneyness.of(scenario.spot, scenario.strike, scenario.u, tau, model.r, model.q).k_u
    x = k_u + model.rho_minus * mu_m * tau
    scale = math.exp(-(model.r - lam**a * mu_m) * tau) / a

    moment = _leg(incomplete_moment_grid(x, y, a, lam, config.n_max, config.m_max), scale, config)
    if diagonal_poles:
        constant = _leg(mittag_leffler_grid(lam * y ** (1.0 / a), a, config.m_max), scale, config)
    else:
        constant = _leg(mittag_leffler_grid(0.0, a, 1), scale, config)
    return _combine([constant, moment])


def atm_tempered_linear_approx(model: TemperedModel, tau: float) -> float:
    """First-order expansion of the ATM-forward tempered cash digital in lambda.

    (e^{-r tau}/a) [1 - Y^(1-1/a) / Gamma(1-1/a) - a Y^(1-1/a) lambda / Gamma(1-1/a)],
    with Y = -mu_minus tau. The intercept keeps only the leading small-Y terms
    of the stable price.
    """
    if not tau > 0.0:
        raise ValueError("maturity tau must be positive")
    a, lam = model.alpha_minus, model.lambda_minus
    y = -model.mu_minus * tau
    c = y ** (1.0 - 1.0 / a) * rgamma(1.0 - 1.0 / a)
    return math.exp(-model.r * tau) / a * (1.0 - c - a * c * lam)
