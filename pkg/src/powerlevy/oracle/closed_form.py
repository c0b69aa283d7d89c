"""Black-Scholes closed forms for power payoffs (the alpha = 2 reference).

Everything is written for a payoff on ``S_T**u`` with lognormal volatility
``sigma``; under the FMLS model at alpha = 2 the matching volatility is
``sqrt(2) * gamma``.
"""

from __future__ import annotations

import math

from ..levy import FmlsModel
from ..pricing import OptionKind, Scenario
from ..special import norm_cdf, norm_pdf

__all__ = [
    "bs_log_call",
    "heynen_kat_power_call",
    "bs_call",
    "bs_digital_cn",
    "bs_digital_an",
    "bs_price",
    "gaussian_volatility",
]


def _k_u(S: float, K: float, u: float, r: float, q: float, tau: float) -> float:
    return math.log(S) - math.log(K) / u + (r - q) * tau


def bs_log_call(S: float, K: float, r: float, sigma: float, tau: float, q: float = 0.0, u: float = 1.0) -> float:
    """Log call (log S_T^u - log K)^+: u e^{-r tau} sigma sqrt(tau) [n(d2) + d2 N(d2)]."""
    v = sigma * math.sqrt(tau)
    d2 = (_k_u(S, K, u, r, q, tau) - 0.5 * sigma**2 * tau) / v
    return u * math.exp(-r * tau) * v * (norm_pdf(d2) + d2 * norm_cdf(d2))


def _d1_d2(S, K, u, r, sigma, tau, q):
    v = sigma * math.sqrt(tau)
    d1 = (_k_u(S, K, u, r, q, tau) + (u - 0.5) * sigma**2 * tau) / v
    return d1, d1 - u * v


def bs_digital_an(S: float, K: float, u: float, r: float, sigma: float, tau: float, q: float = 0.0) -> float:
    """Pays S_T^u when S_T^u > K."""
    d1, _ = _d1_d2(S, K, u, r, sigma, tau, q)
    # discounted E[S_T^u]
    forward = math.exp(u * math.log(S) - r * tau + u * (r - q) * tau + 0.5 * u * (u - 1.0) * sigma**2 * tau)
    return forward * norm_cdf(d1)


def bs_digital_cn(S: float, K: float, u: float, r: float, sigma: float, tau: float, q: float = 0.0) -> float:
    """Pays 1 when S_T^u > K."""
    _, d2 = _d1_d2(S, K, u, r, sigma, tau, q)
    return math.exp(-r * tau) * norm_cdf(d2)


def heynen_kat_power_call(S: float, K: float, u: float, r: float, sigma: float, tau: float, q: float = 0.0) -> float:
    """European power call (S_T^u - K)^+."""
    return bs_digital_an(S, K, u, r, sigma, tau, q) - K * bs_digital_cn(S, K, u, r, sigma, tau, q)


def bs_call(S: float, K: float, r: float, sigma: float, tau: float, q: float = 0.0) -> float:
    d1, d2 = _d1_d2(S, K, 1.0, r, sigma, tau, q)
    return S * math.exp(-q * tau) * norm_cdf(d1) - K * math.exp(-r * tau) * norm_cdf(d2)


def gaussian_volatility(model: FmlsModel) -> float:
    """Lognormal volatility of an alpha = 2 FMLS model."""
    if model.alpha != 2.0:
        raise ValueError("closed forms need alpha = 2")
    return math.sqrt(2.0) * model.gamma_scale


def bs_price(scenario: Scenario, model: FmlsModel) -> float:
    """Closed-form price of any supported payoff under an alpha = 2 model."""
    sigma = gaussian_volatility(model)
    S, tau, u, r, q = scenario.spot, scenario.tau, scenario.u, model.r, model.q

    def an(K):
        return bs_digital_an(S, K, u, r, sigma, tau, q)

    def cn(K):
        return bs_digital_cn(S, K, u, r, sigma, tau, q)

    kind, K = scenario.kind, scenario.strike
    if kind is OptionKind.DIGITAL_CN:
        return cn(K)
    if kind is OptionKind.DIGITAL_AN:
        return an(K)
    if kind is OptionKind.LOG:
        return bs_log_call(S, K, r, sigma, tau, q, u)
    if kind is OptionKind.EUROPEAN:
        return an(K) - K * cn(K)
    if kind is OptionKind.GAP:
        return an(scenario.trigger) - K * cn(scenario.trigger)
    Kp = scenario.cap
    if kind is OptionKind.CAPPED_CN:
        return cn(K) - cn(Kp)
    if kind is OptionKind.CAPPED_AN:
        return an(K) - an(Kp)
    return (an(K) - an(Kp)) - K * (cn(K) - cn(Kp))
