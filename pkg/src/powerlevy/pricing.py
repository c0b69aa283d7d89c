"""Mellin residue series for power-payoff calls under the FMLS model.

Every series is written in terms of

    X = k_u + mu * tau      (may be negative; only integer powers are taken)
    Y = -mu * tau > 0       (real powers are safe)

and summed by :func:`powerlevy.series.sum_grid`. Composite payoffs (gap,
European, capped European) are assembled from legs that each carry their own
price-unit scale, so the stop rule and the tolerances act on what each leg
actually contributes to the price.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import mpmath
import numpy as np

from .levy import FmlsModel, Moneyness
from .series import (
    PriceResult,
    SeriesConfig,
    SeriesSum,
    TermGrid,
    _Difference,
    log_rgamma_table,
    power_terms,
    sum_grid,
    sum_grid_exact,
)

__all__ = [
    "OptionKind",
    "Scenario",
    "DEFAULT_CONFIG",
    "price",
    "price_digital_cn",
    "price_digital_an",
    "price_log",
    "price_gap",
    "price_european",
    "price_capped_cn",
    "price_capped_an",
    "price_capped_european",
    "atm_european_expansion",
]

DEFAULT_CONFIG = SeriesConfig()


class OptionKind(str, Enum):
    DIGITAL_CN = "digital-cn"
    DIGITAL_AN = "digital-an"
    LOG = "log"
    GAP = "gap"
    EUROPEAN = "european"
    CAPPED_CN = "capped-cn"
    CAPPED_AN = "capped-an"
    CAPPED_EUROPEAN = "capped-european"

    @property
    def capped(self) -> bool:
        return self in (OptionKind.CAPPED_CN, OptionKind.CAPPED_AN, OptionKind.CAPPED_EUROPEAN)


@dataclass(frozen=True)
class Scenario:
    """Market state and payoff of a power call on ``S_T**u``.

    ``strike`` is K for single-strike payoffs, the strike K1 of a gap call and
    the floor K- of a capped one; ``trigger`` is the gap trigger K2 and
    ``cap`` the ceiling K+.
    """

    kind: OptionKind
    spot: float
    tau: float
    strike: float
    u: float = 1.0
    trigger: float | None = None
    cap: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", OptionKind(self.kind))
        if not self.spot > 0.0:
            raise ValueError("spot must be positive")
        if not self.tau > 0.0:
            raise ValueError("maturity tau must be positive")
        if not self.u > 0.0:
            raise ValueError("power u must be positive")
        if self.kind is OptionKind.GAP:
            if not self.strike >= 0.0:
                raise ValueError("gap strike K1 must be nonnegative")
            if self.trigger is None or not self.trigger > 0.0:
                raise ValueError("gap options need a positive trigger K2")
        elif not self.strike > 0.0:
            raise ValueError("strike must be positive")
        if self.kind.capped:
            if self.cap is None:
                raise ValueError("capped options need a cap K+")
            if not self.cap >= self.strike:
                raise ValueError("capped options need K- <= K+")


@dataclass(frozen=True)
class _Market:
    alpha: float
    mu: float
    tau: float
    r: float
    q: float
    spot: float
    u: float

    @classmethod
    def of(cls, scenario: Scenario, model: FmlsModel) -> "_Market":
        return cls(model.alpha, model.mu, scenario.tau, model.r, model.q, scenario.spot, scenario.u)

    @property
    def disc(self) -> float:
        return math.exp(-self.r * self.tau)

    @property
    def y(self) -> float:
        return -self.mu * self.tau

    @property
    def log_forward_power(self) -> float:
        # log of discounted E-scale of S_T**u without the X part
        return -self.r * self.tau + self.u * (math.log(self.spot) + (self.r - self.q + self.mu) * self.tau)

    def x(self, strike: float) -> float:
        k_u = Moneyness.of(self.spot, strike, self.u, self.tau, self.r, self.q).k_u
        return k_u + self.mu * self.tau


# -- term grids ----------------------------------------------------------------


def _mp_alpha(alpha: float):
    # from the decimal text, so that alpha = 1.7 keeps its Gamma poles exactly where
    # the double-precision grid put zeros; the double 1.7 would move them by 1e-16,
    # which the huge neighbouring terms amplify
    return mpmath.mpf(repr(float(alpha)))


def _lfact(k: int) -> np.ndarray:
    return np.array([math.lgamma(i + 1.0) for i in range(k + 1)])


def _an_grid(x: float, y: float, alpha: float, u: float, n_max: int, m_max: int) -> TermGrid:
    """u^m X^n Y^((m-n)/alpha) / (n! Gamma(1 + (m-n)/alpha)); column m=0 is the cash digital."""
    n, m = np.indices((n_max + 1, m_max + 1))
    j = m - n
    sx, lx = power_terms(x, n)
    sg, lg = log_rgamma_table(1.0 + j / alpha)
    ly = (j / alpha) * math.log(y)
    lu = m * math.log(u)
    lf = _lfact(n_max)[:, None]
    log_mag = lu + lx + ly + lg - lf
    weight = np.abs(lu) + np.abs(lx) + np.abs(ly) + np.abs(np.where(sg != 0, lg, 0.0)) + lf

    def exact():
        a, X, Y, U = _mp_alpha(alpha), mpmath.mpf(x), mpmath.mpf(y), mpmath.mpf(u)
        xn = [X**k / mpmath.factorial(k) for k in range(n_max + 1)]
        um = [U**k for k in range(m_max + 1)]
        yj = {k: Y ** (k / a) * mpmath.rgamma(1 + k / a) for k in range(-n_max, m_max + 1)}
        return lambda i, k: um[k] * xn[i] * yj[k - i]

    return TermGrid(sx * sg, log_mag, weight, exact)


def _log_grid(x: float, y: float, alpha: float, n_max: int) -> TermGrid:
    """X^n Y^((1-n)/alpha) / (n! Gamma(1 + (1-n)/alpha))."""
    n = np.arange(n_max + 1)[:, None]
    e = (1 - n) / alpha
    sx, lx = power_terms(x, n)
    sg, lg = log_rgamma_table(1.0 + e)
    ly = e * math.log(y)
    lf = _lfact(n_max)[:, None]
    log_mag = lx + ly + lg - lf
    weight = np.abs(lx) + np.abs(ly) + np.abs(np.where(sg != 0, lg, 0.0)) + lf

    def exact():
        a, X, Y = _mp_alpha(alpha), mpmath.mpf(x), mpmath.mpf(y)

        def term(i, _k):
            ex = (1 - i) / a
            return X**i * Y**ex * mpmath.rgamma(1 + ex) / mpmath.factorial(i)

        return term

    return TermGrid(sx * sg, log_mag, weight, exact)


def incomplete_moment_grid(x: float, y: float, alpha: float, w: float, n_max: int, m_max: int) -> TermGrid:
    """(-w)^m X^(1+n+m) Y^(-(1+n)/alpha) / ((1+n+m) n! m! Gamma(1 - (1+n)/alpha)).

    Up to a factor -1/alpha this is the Taylor expansion of int_0^{-X} e^{w x} g(x) dx
    for the stable density g; it drives the capped asset digital and the
    tempered cash digital.
    """
    if w == 0.0:
        m_max = 0
    n, m = np.indices((n_max + 1, m_max + 1))
    p = 1 + n + m
    sx, lx = power_terms(x, p)
    sg, lg = log_rgamma_table(1.0 - (1 + n) / alpha)
    ly = -((1 + n) / alpha) * math.log(y)
    lw = m * math.log(w) if w > 0.0 else np.zeros(n.shape)
    lfac = _lfact(max(n_max, m_max))
    lden = np.log(p) + lfac[n] + lfac[m]
    sign = sx * sg * np.where(m % 2 == 1, -1.0, 1.0)
    log_mag = lw + lx + ly + lg - lden
    weight = np.abs(lw) + np.abs(lx) + np.abs(ly) + np.abs(np.where(sg != 0, lg, 0.0)) + lden

    def exact():
        a, X, Y, W = _mp_alpha(alpha), mpmath.mpf(x), mpmath.mpf(y), mpmath.mpf(w)
        xp = [X**k for k in range(n_max + m_max + 2)]
        yn = [Y ** (-(1 + k) / a) * mpmath.rgamma(1 - (1 + k) / a) / mpmath.factorial(k)
              for k in range(n_max + 1)]
        wm = [(-W) ** k / mpmath.factorial(k) for k in range(m_max + 1)]
        return lambda i, k: wm[k] * xp[1 + i + k] * yn[i] / (1 + i + k)

    return TermGrid(sign, log_mag, weight, exact)


def mittag_leffler_grid(z: float, alpha: float, m_max: int) -> TermGrid:
    """z^m / Gamma(1 + m/alpha) for z >= 0, i.e. E_{1/alpha}(z) term by term."""
    m = np.arange(m_max + 1)[:, None]
    sz, lz = power_terms(z, m)
    sg, lg = log_rgamma_table(1.0 + m / alpha)

    def exact():
        a, Z = _mp_alpha(alpha), mpmath.mpf(z)
        return lambda i, _k: Z**i * mpmath.rgamma(1 + i / a)

    return TermGrid(sz * sg, lz + lg, np.abs(lz) + np.abs(lg), exact)


# -- legs ----------------------------------------------------------------------


def log_thin_tail_bound(a: float, u: float, y: float, alpha: float) -> float:
    """log of a Chernoff bound on E[exp(u X) 1{X > a}] with E[exp(p X)] = exp(y p^alpha).

    Finite only when ``a`` sits far enough on the light (positive) side.
    """
    if a <= 0.0:
        return math.inf
    theta = (a / (alpha * y)) ** (1.0 / (alpha - 1.0)) - u
    if theta <= 0.0:
        return math.inf
    return y * (u + theta) ** alpha - theta * a


@dataclass(frozen=True)
class _Leg:
    value: float
    partials: tuple[float, ...]
    terms_used: int
    last: float
    rounding: float
    converged: bool
    note: str | None = None


def _from_sum(s: SeriesSum, config: SeriesConfig) -> _Leg:
    note = None
    if not s.stopped:
        note = f"stop rule unmet at cap (last shell {s.last_magnitude:.1e})"
    elif not s.precise(config):
        note = f"series lost precision (rounding error ~{s.rounding_error:.1e})"
    return _Leg(s.value, s.partial_sums, s.terms_used, s.last_magnitude, s.rounding_error,
                s.converged(config), note)


def _leg(
    grid: TermGrid | _Difference,
    scale: float,
    config: SeriesConfig,
    mask: np.ndarray | None = None,
    limit: float | None = None,
    log_bound: float = math.inf,
) -> _Leg:
    """Sum one pricing leg, falling back when double precision is not enough.

    Fallbacks, in order: when the strike is so far on the light-tailed side
    that a Chernoff bound pins the leg to its far-strike ``limit`` within
    ``tol``, the limit is used; otherwise a cancelling series is recomputed in
    multiprecision arithmetic.
    """
    s = sum_grid(grid, config, scale=scale, mask=mask)
    if s.converged(config):
        return _from_sum(s, config)
    if limit is not None:
        bound = math.exp(log_bound) if log_bound < 700.0 else math.inf
        if bound <= config.tol:
            note = f"far strike: series replaced by its limit, Chernoff remainder <= {bound:.1e}"
            return _Leg(limit, (limit,) * len(s.partial_sums), s.terms_used, 0.0, bound, True, note)
    if config.exact_fallback and not s.precise(config):
        e = sum_grid_exact(grid, config, scale=scale, mask=mask)
        if e is not None:
            leg = _from_sum(e, config)
            note = "evaluated in multiprecision" + (f"; {leg.note}" if leg.note else "")
            return replace(leg, note=note)
    return _from_sum(s, config)


def _combine(plus: list[_Leg], minus: list[_Leg] = ()) -> PriceResult:  # type: ignore[assignment]
    legs = [(1.0, leg) for leg in plus] + [(-1.0, leg) for leg in minus]
    value = math.fsum(c * leg.value for c, leg in legs)
    length = max(len(leg.partials) for _, leg in legs)

    def at(leg: _Leg, i: int) -> float:
        return leg.partials[min(i, len(leg.partials) - 1)]

    partials = tuple(math.fsum(c * at(leg, i) for c, leg in legs) for i in range(length))
    return PriceResult(
        price=value,
        terms_used=sum(leg.terms_used for _, leg in legs),
        last_term_magnitude=max(leg.last for _, leg in legs),
        converged=all(leg.converged for _, leg in legs),
        series_partial_sums=partials,
        rounding_error=sum(leg.rounding for _, leg in legs),
        notes=tuple(leg.note for _, leg in legs if leg.note),
    )


def _cash_leg(mk: _Market, strike: float, coef: float, config: SeriesConfig) -> _Leg:
    """coef * cash-or-nothing digital at ``strike``."""
    x = mk.x(strike)
    grid = _an_grid(x, mk.y, mk.alpha, mk.u, config.n_max, 0)
    bound = math.log(coef * mk.disc) + log_thin_tail_bound(-x, 0.0, mk.y, mk.alpha)
    return _leg(grid, coef * mk.disc / mk.alpha, config, limit=0.0, log_bound=bound)


def _asset_leg(mk: _Market, strike: float, config: SeriesConfig, m_start: int = 0) -> _Leg:
    """Asset-or-nothing digital (m_start=0) or European call (m_start=1) at ``strike``."""
    x = mk.x(strike)
    grid = _an_grid(x, mk.y, mk.alpha, mk.u, config.n_max, config.m_max)
    mask = (np.indices(grid.shape)[1] >= m_start) if m_start else None
    bound = mk.log_forward_power + log_thin_tail_bound(-x, mk.u, mk.y, mk.alpha)
    return _leg(grid, strike * mk.disc / mk.alpha, config, mask=mask, limit=0.0, log_bound=bound)


def _corridor_asset_legs(mk: _Market, lower: float, upper: float, config: SeriesConfig) -> tuple[list[_Leg], list[_Leg]]:
    xl, xu = mk.x(lower), mk.x(upper)
    grid_l = incomplete_moment_grid(xl, mk.y, mk.alpha, mk.u, config.n_max, config.m_max)
    grid_u = incomplete_moment_grid(xu, mk.y, mk.alpha, mk.u, config.n_max, config.m_max)
    scale = math.exp(mk.log_forward_power) / mk.alpha
    joint = sum_grid(grid_l - grid_u, config, scale=scale)
    if joint.converged(config) or lower == upper:
        return [_from_sum(joint, config)], []
    ml_grid = mittag_leffler_grid(mk.u * mk.y ** (1.0 / mk.alpha), mk.alpha, config.m_max)
    ml = sum_grid(ml_grid, config, scale=scale)
    legs = []
    for x, grid in ((xl, grid_l), (xu, grid_u)):
        bound = mk.log_forward_power + log_thin_tail_bound(-x, mk.u, mk.y, mk.alpha)
        legs.append(_leg(grid, scale, config, limit=-ml.value, log_bound=bound))
    return [legs[0]], [legs[1]]


def _corridor_cash_legs(mk: _Market, lower: float, upper: float, coef: float, config: SeriesConfig) -> tuple[list[_Leg], list[_Leg]]:
    xl, xu = mk.x(lower), mk.x(upper)
    grid_l = _an_grid(xl, mk.y, mk.alpha, mk.u, config.n_max, 0)
    grid_u = _an_grid(xu, mk.y, mk.alpha, mk.u, config.n_max, 0)
    joint = sum_grid(grid_l - grid_u, config, scale=coef * mk.disc / mk.alpha)
    if joint.converged(config) or lower == upper:
        return [_from_sum(joint, config)], []
    return [_cash_leg(mk, lower, coef, config)], [_cash_leg(mk, upper, coef, config)]


def _check(scenario: Scenario, *kinds: OptionKind) -> None:
    if scenario.kind not in kinds:
        names = ", ".join(k.value for k in kinds)
        raise ValueError(f"scenario kind {scenario.kind.value!r} is not priced here (expects {names})")


# -- public pricers --------------------------------------------------------------


def price_digital_cn(scenario: Scenario, model: FmlsModel, config: SeriesConfig = DEFAULT_CONFIG) -> PriceResult:
    """Cash-or-nothing power digital: pays 1 when S_T**u > K."""
    _check(scenario, OptionKind.DIGITAL_CN)
    mk = _Market.of(scenario, model)
    return _combine([_cash_leg(mk, scenario.strike, 1.0, config)])


def price_log(scenario: Scenario, model: FmlsModel, config: SeriesConfig = DEFAULT_CONFIG) -> PriceResult:
    """Log power call: pays (log(S_T**u / K))^+."""
    _check(scenario, OptionKind.LOG)
    mk = _Market.of(scenario, model)
    grid = _log_grid(mk.x(scenario.strike), mk.y, mk.alpha, config.n_max)
    return _combine([_leg(grid, mk.u * mk.disc / mk.alpha, config)])


def price_capped_cn(scenario: Scenario, model: FmlsModel, config: SeriesConfig = DEFAULT_CONFIG) -> PriceResult:
    """Capped cash digital: pays 1 on K- < S_T**u < K+."""
    _check(scenario, OptionKind.CAPPED_CN)
    mk = _Market.of(scenario, model)
    plus, minus = _corridor_cash_legs(mk, scenario.strike, scenario.cap, 1.0, config)  # type: ignore[arg-type]
    return _combine(plus, minus)


def price_digital_an(scenario: Scenario, model: FmlsModel, config: SeriesConfig = DEFAULT_CONFIG) -> PriceResult:
    """Asset-or-nothing power digital: pays S_T**u when S_T**u > K."""
    _check(scenario, OptionKind.DIGITAL_AN)
    mk = _Market.of(scenario, model)
    return _combine([_asset_leg(mk, scenario.strike, config)])


def price_gap(scenario: Scenario, model: FmlsModel, config: SeriesConfig = DEFAULT_CONFIG) -> PriceResult:
    """Gap power call: pays S_T**u - K1 when S_T**u > K2 (negative values allowed)."""
    _check(scenario, OptionKind.GAP)
    mk = _Market.of(scenario, model)
    trigger = scenario.trigger
    plus = [_asset_leg(mk, trigger, config)]  # type: ignore[arg-type]
    if scenario.strike == 0.0:
        return _combine(plus)
    return _combine(plus, [_cash_leg(mk, trigger, scenario.strike, config)])  # type: ignore[arg-type]


def price_european(scenario: Scenario, model: FmlsModel, config: SeriesConfig = DEFAULT_CONFIG) -> PriceResult:
    """European power call: pays (S_T**u - K)^+; the m >= 1 part of the asset digital series."""
    _check(scenario, OptionKind.EUROPEAN)
    mk = _Market.of(scenario, model)
    return _combine([_asset_leg(mk, scenario.strike, config, m_start=1)])


def price_capped_an(scenario: Scenario, model: FmlsModel, config: SeriesConfig = DEFAULT_CONFIG) -> PriceResult:
    """Capped asset digital: pays S_T**u on K- < S_T**u < K+."""
    _check(scenario, OptionKind.CAPPED_AN)
    mk = _Market.of(scenario, model)
    plus, minus = _corridor_asset_legs(mk, scenario.strike, scenario.cap, config)  # type: ignore[arg-type]
    return _combine(plus, minus)


def price_capped_european(scenario: Scenario, model: FmlsModel, config: SeriesConfig = DEFAULT_CONFIG) -> PriceResult:
    """Capped European power call: (S_T**u - K-) on K- < S_T**u < K+."""
    _check(scenario, OptionKind.CAPPED_EUROPEAN)
    mk = _Market.of(scenario, model)
    lower, upper = scenario.strike, scenario.cap
    a_plus, a_minus = _corridor_asset_legs(mk, lower, upper, config)  # type: ignore[arg-type]
    c_plus, c_minus = _corridor_cash_legs(mk, lower, upper, lower, config)  # type: ignore[arg-type]
    # cash legs enter with the opposite sign
    return _combine(a_plus + c_minus, a_minus + c_plus)


_PRICERS = {
    OptionKind.DIGITAL_CN: price_digital_cn,
    OptionKind.DIGITAL_AN: price_digital_an,
    OptionKind.LOG: price_log,
    OptionKind.GAP: price_gap,
    OptionKind.EUROPEAN: price_european,
    OptionKind.CAPPED_CN: price_capped_cn,
    OptionKind.CAPPED_AN: price_capped_an,
    OptionKind.CAPPED_EUROPEAN: price_capped_european,
}


def price(scenario: Scenario, model: FmlsModel, config: SeriesConfig = DEFAULT_CONFIG) -> PriceResult:
    """Dispatch on ``scenario.kind``."""
    return _PRICERS[scenario.kind](scenario, model, config)


def atm_european_expansion(model: FmlsModel, u: float, K: float, tau: float, order: int = 2) -> float:
    """Short-maturity expansion of the ATM-forward European power call.

    Keeps the terms with n + m <= ``order``; ``order=2`` gives the three-term
    expansion u Y^(1/a)/Gamma(1+1/a) - u Y + u^2 Y^(2/a)/Gamma(1+2/a), and at
    alpha=2, u=1 its leading term is the classic S sigma sqrt(tau) / sqrt(2 pi).
    """
    if order < 1:
        raise ValueError("order must be at least 1")
    if not (tau > 0.0 and K > 0.0 and u > 0.0):
        raise ValueError("tau, K and u must be positive")
    mk = _Market(model.alpha, model.mu, tau, model.r, model.q, 1.0, u)
    grid = _an_grid(model.mu * tau, mk.y, model.alpha, u, order, order)
    values, _ = grid.values(math.log(K * mk.disc / model.alpha))
    n, m = np.indices(values.shape)
    keep = (m >= 1) & (n + m <= order)
    return math.fsum(values[keep])

