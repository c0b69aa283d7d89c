"""Monte Carlo under the FMLS model with Chambers-Mallows-Stuck stable draws."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..levy import FmlsModel
from ..pricing import OptionKind, Scenario

__all__ = ["McConfig", "stable_increments", "mc_price", "mc_discounted_spot"]

_CHUNK = 262_144


@dataclass(frozen=True)
class McConfig:
    paths: int = 1_000_000
    seed: int = 20240101
    antithetic: bool = True

    def __post_init__(self) -> None:
        if self.paths < 1:
            raise ValueError("paths must be at least 1")


def _cms(v: np.ndarray, w: np.ndarray, alpha: float) -> np.ndarray:
    # standard S_alpha(1, beta=-1, 0) variates
    if alpha == 2.0:
        return 2.0 * np.sin(v) * np.sqrt(w)
    t = math.tan(math.pi * alpha / 2.0)
    b = math.atan(-t) / alpha
    s = (1.0 + t * t) ** (1.0 / (2.0 * alpha))
    a_vb = alpha * (v + b)
    return s * np.sin(a_vb) / np.cos(v) ** (1.0 / alpha) * (np.cos(v - a_vb) / w) ** ((1.0 - alpha) / alpha)


def stable_increments(model: FmlsModel, tau: float, size: int, rng: np.random.Generator, antithetic: bool = False) -> np.ndarray:
    """Draws of X_tau with E[exp(i k X_tau)] = exp(-tau Psi(k)), beta = -1.

    With ``antithetic`` the second half mirrors the first (V -> -V, U -> 1-U).
    """
    half = (size + 1) // 2 if antithetic else size
    v = rng.uniform(-math.pi / 2.0, math.pi / 2.0, half)
    uw = rng.uniform(0.0, 1.0, half)
    if antithetic:
        v = np.concatenate([v, -v])[:size]
        uw = np.concatenate([uw, 1.0 - uw])[:size]
    w = -np.log1p(-uw)
    w = np.where(w > 0.0, w, np.finfo(float).tiny)
    scale = model.gamma_scale * tau ** (1.0 / model.alpha)
    return scale * _cms(v, w, model.alpha)


def _payoff(scenario: Scenario, log_st: np.ndarray) -> np.ndarray:
    su = np.exp(scenario.u * log_st)
    kind, K = scenario.kind, scenario.strike
    if kind is OptionKind.DIGITAL_CN:
        return (su > K).astype(float)
    if kind is OptionKind.DIGITAL_AN:
        return np.where(su > K, su, 0.0)
    if kind is OptionKind.LOG:
        return np.maximum(scenario.u * log_st - math.log(K), 0.0)
    if kind is OptionKind.EUROPEAN:
        return np.maximum(su - K, 0.0)
    if kind is OptionKind.GAP:
        return np.where(su > scenario.trigger, su - K, 0.0)
    inside = (su > K) & (su < scenario.cap)
    if kind is OptionKind.CAPPED_CN:
        return inside.astype(float)
    if kind is OptionKind.CAPPED_AN:
        return np.where(inside, su, 0.0)
    return np.where(inside, su - K, 0.0)


def _simulate(model: FmlsModel, tau: float, config: McConfig, fn) -> tuple[float, float]:
    """Mean and standard error of ``fn(X_tau)`` over seeded, chunked streams."""
    if not isinstance(model, FmlsModel):
        raise TypeError("Monte Carlo supports FMLS models only")
    if not tau > 0.0:
        raise ValueError("maturity tau must be positive")
    n_chunks = -(-config.paths // _CHUNK)
    streams = np.random.SeedSequence(config.seed).spawn(n_chunks)
    total = total_sq = 0.0
    count = 0
    for i, ss in enumerate(streams):
        size = min(_CHUNK, config.paths - i * _CHUNK)
        rng = np.random.default_rng(ss)
        x = stable_increments(model, tau, size, rng, config.antithetic)
        y = fn(x)
        if config.antithetic and size > 1:
            # pair averages are the independent samples
            h = size // 2
            y = 0.5 * (y[:h] + y[h : 2 * h])
        total += float(np.sum(y))
        total_sq += float(np.sum(y * y))
        count += y.size
    mean = total / count
    var = max(total_sq / count - mean * mean, 0.0)
    return mean, math.sqrt(var / max(count - 1, 1))


def mc_price(scenario: Scenario, model: FmlsModel, config: McConfig = McConfig()) -> tuple[float, float]:
    """(discounted mean payoff, standard error) with S_T = S exp((r - q + mu) tau + X_tau)."""
    tau = scenario.tau
    drift = math.log(scenario.spot) + (model.r - model.q + model.mu) * tau
    disc = math.exp(-model.r * tau)
    mean, se = _simulate(model, tau, config, lambda x: _payoff(scenario, drift + x))
    return disc * mean, disc * se


def mc_discounted_spot(spot: float, tau: float, model: FmlsModel, config: McConfig = McConfig()) -> tuple[float, float]:
    """(mean, standard error) of exp(-(r - q) tau) S_T; the martingale condition asks for ``spot``."""
    mean, se = _simulate(model, tau, config, lambda x: spot * np.exp(model.mu * tau + x))
    return mean, se
