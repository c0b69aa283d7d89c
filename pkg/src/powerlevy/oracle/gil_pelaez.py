"""Gil-Pelaez inversion: the call as S Pi_1 - K e^{-r tau} Pi_2 from the characteristic function."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy import integrate

from ..levy import Model, risk_neutral_cf
from ..pricing import OptionKind, Scenario

__all__ = [
    "QuadConfig",
    "QuadratureError",
    "OracleUnavailable",
    "gil_pelaez_pi",
    "gil_pelaez_digital_cn",
    "gil_pelaez_digital_an",
    "gil_pelaez_european",
    "gil_pelaez_price",
]

# below this frequency the integrand is replaced by its w -> 0 limit
_SMALL_W = 1e-10


class QuadratureError(RuntimeError):
    """The adaptive rule hit its subdivision cap before reaching abs_tol."""


class OracleUnavailable(ValueError):
    """No quadrature representation for this payoff."""


@dataclass(frozen=True)
class QuadConfig:
    upper_limit: float = 1000.0
    abs_tol: float = 1e-8
    max_refinements: int = 500

    def __post_init__(self) -> None:
        if not self.upper_limit > 0.0:
            raise ValueError("upper_limit must be positive")
        if not self.abs_tol > 0.0:
            raise ValueError("abs_tol must be positive")
        if self.max_refinements < 1:
            raise ValueError("max_refinements must be at least 1")


def _log_return_mean(model: Model, tau: float, share_measure: bool) -> float:
    # E[mu tau + X_tau] under the pricing (p=0) or share (p=1) measure
    return tau * (model.mu + model.laplace_exponent_derivative(1.0 if share_measure else 0.0))


def gil_pelaez_pi(k: float, tau: float, model: Model, share_measure: bool, config: QuadConfig = QuadConfig()) -> float:
    """Pi_1 (``share_measure=True``) or Pi_2 at log-forward moneyness ``k``."""
    shift = -1j if share_measure else 0.0
    limit = k + _log_return_mean(model, tau, share_measure)

    def integrand(w: float) -> float:
        if w < _SMALL_W:
            return limit
        return ((complex(math.cos(w * k), math.sin(w * k)) * risk_neutral_cf(w + shift, tau, model)) / (1j * w)).real

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, err, *rest = integrate.quad(
            integrand, 0.0, config.upper_limit,
            epsabs=config.abs_tol * math.pi, epsrel=0.0, limit=config.max_refinements, full_output=1,
        )
    if err > config.abs_tol * math.pi:
        raise QuadratureError(f"quadrature error estimate {err / math.pi:.1e} exceeds abs_tol {config.abs_tol:.1e}")
    return 0.5 + value / math.pi


def _k(spot: float, strike: float, tau: float, model: Model) -> float:
    return math.log(spot / strike) + (model.r - model.q) * tau


def gil_pelaez_digital_cn(scenario: Scenario, model: Model, config: QuadConfig = QuadConfig(), strike: float | None = None) -> float:
    """e^{-r tau} Pi_2 with the strike mapped to K^(1/u)."""
    K = (scenario.strike if strike is None else strike) ** (1.0 / scenario.u)
    pi2 = gil_pelaez_pi(_k(scenario.spot, K, scenario.tau, model), scenario.tau, model, False, config)
    return math.exp(-model.r * scenario.tau) * pi2


def gil_pelaez_digital_an(scenario: Scenario, model: Model, config: QuadConfig = QuadConfig(), strike: float | None = None) -> float:
    """S e^{-q tau} Pi_1; u = 1 only."""
    _require_unit_power(scenario)
    K = scenario.strike if strike is None else strike
    pi1 = gil_pelaez_pi(_k(scenario.spot, K, scenario.tau, model), scenario.tau, model, True, config)
    return scenario.spot * math.exp(-model.q * scenario.tau) * pi1


def gil_pelaez_european(scenario: Scenario, model: Model, config: QuadConfig = QuadConfig()) -> float:
    """S Pi_1 - K e^{-r tau} Pi_2; u = 1 only."""
    _require_unit_power(scenario)
    K = scenario.strike
    return gil_pelaez_digital_an(scenario, model, config, K) - K * gil_pelaez_digital_cn(scenario, model, config, K)


def _require_unit_power(scenario: Scenario) -> None:
    if scenario.u != 1.0:
        raise OracleUnavailable("the asset-or-nothing leg has a quadrature form only for u = 1")


def gil_pelaez_price(scenario: Scenario, model: Model, config: QuadConfig = QuadConfig()) -> float:
    """Quadrature price for every payoff built from Pi_1 and Pi_2."""
    kind, K = scenario.kind, scenario.strike

    def cn(strike):
        return gil_pelaez_digital_cn(scenario, model, config, strike)

    if kind is OptionKind.DIGITAL_CN:
        return cn(K)
    if kind is OptionKind.CAPPED_CN:
        return cn(K) - cn(scenario.cap)
    if kind is OptionKind.LOG:
        raise OracleUnavailable("no Gil-Pelaez form for the log payoff")
    _require_unit_power(scenario)

    def an(strike):
        return gil_pelaez_digital_an(scenario, model, config, strike)

    if kind is OptionKind.DIGITAL_AN:
        return an(K)
    if kind is OptionKind.EUROPEAN:
        return an(K) - K * cn(K)
    if kind is OptionKind.GAP:
        return an(scenario.trigger) - K * cn(scenario.trigger)
    if kind is OptionKind.CAPPED_AN:
        return an(K) - an(scenario.cap)
    return (an(K) - an(scenario.cap)) - K * (cn(K) - cn(scenario.cap))
