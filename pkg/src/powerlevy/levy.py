"""Spectrally negative stable (FMLS) and one-sided tempered stable models.

Both families are parametrized so that the log-price obeys

    S_T = S * exp((r - q + mu) * tau + X_tau),

with ``mu`` the martingale adjustment, ``mu = -phi(1)``, and ``phi`` the
Laplace exponent of ``X`` (``E[exp(p X_t)] = exp(t phi(p))``). The location
parameter of the stable law is fixed at zero throughout.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Literal, Union

from scipy import integrate

from .special import gamma, log_abs_rgamma, norm_pdf, rgamma

__all__ = [
    "FmlsModel",
    "TemperedModel",
    "Moneyness",
    "fmls_mu",
    "tempered_mu",
    "stable_char_exponent",
    "risk_neutral_cf",
    "fmls_density",
    "tempered_density",
]

DEFAULT_SCALE_FACTOR = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class FmlsModel:
    """Finite-moment log-stable model: X ~ L(0, gamma_scale**alpha, beta=-1).

    ``gamma_scale = sigma * scale_factor``; the default factor 1/sqrt(2)
    makes ``alpha=2`` coincide with Black-Scholes at volatility ``sigma``.
    """

    alpha: float
    sigma: float
    r: float = 0.0
    q: float = 0.0
    scale_factor: float = DEFAULT_SCALE_FACTOR

    def __post_init__(self) -> None:
        if not 1.0 < self.alpha <= 2.0:
            raise ValueError(f"alpha must lie in (1, 2], got {self.alpha}")
        if not self.sigma > 0.0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not self.scale_factor > 0.0:
            raise ValueError(f"scale_factor must be positive, got {self.scale_factor}")

    @property
    def gamma_scale(self) -> float:
        return self.sigma * self.scale_factor

    @property
    def mu(self) -> float:
        return fmls_mu(self)

    def laplace_exponent(self, p: complex) -> complex:
        """phi(p) = -mu * p**alpha, valid for Re p >= 0."""
        return -self.mu * complex(p) ** self.alpha

    def laplace_exponent_derivative(self, p: float) -> float:
        return -self.mu * self.alpha * p ** (self.alpha - 1.0)

    def char_exponent(self, z: complex) -> complex:
        """Psi(z) = mu * (i z)**alpha, the analytic continuation to Im z <= 0."""
        return self.mu * (1j * complex(z)) ** self.alpha


@dataclass(frozen=True)
class TemperedModel:
    """One-sided tempered stable model on the negative half-line.

    Levy measure ``gamma_minus * exp(-lambda_minus |x|) / |x|**(1+alpha_minus)``
    for ``x < 0``. The ``*_plus`` fields describe the mirror process and are
    only consulted by :func:`tempered_density` with ``side="positive"``.
    """

    alpha_minus: float
    gamma_minus: float
    lambda_minus: float = 0.0
    r: float = 0.0
    q: float = 0.0
    alpha_plus: float | None = None
    gamma_plus: float = 0.0
    lambda_plus: float = 0.0

    def __post_init__(self) -> None:
        if not 1.0 < self.alpha_minus < 2.0:
            raise ValueError(f"alpha_minus must lie in (1, 2), got {self.alpha_minus}")
        if not self.gamma_minus > 0.0:
            raise ValueError(f"gamma_minus must be positive, got {self.gamma_minus}")
        if not self.lambda_minus >= 0.0:
            raise ValueError(f"lambda_minus must be nonnegative, got {self.lambda_minus}")
        if self.alpha_plus is not None and not 1.0 < self.alpha_plus < 2.0:
            raise ValueError(f"alpha_plus must lie in (1, 2), got {self.alpha_plus}")
        if self.gamma_plus < 0.0 or self.lambda_plus < 0.0:
            raise ValueError("gamma_plus and lambda_plus must be nonnegative")

    @classmethod
    def from_sigma(
        cls,
        alpha_minus: float,
        sigma: float,
        lambda_minus: float = 0.0,
        r: float = 0.0,
        q: float = 0.0,
        scale_factor: float = DEFAULT_SCALE_FACTOR,
    ) -> "TemperedModel":
        """Tempered model whose untempered part matches ``FmlsModel(alpha_minus, sigma)``."""
        stable = FmlsModel(alpha_minus, sigma, r, q, scale_factor)
        gamma_minus = -stable.mu / gamma(-alpha_minus)
        return cls(alpha_minus, gamma_minus, lambda_minus, r, q)

    @property
    def mu_minus(self) -> float:
        return -self.gamma_minus * gamma(-self.alpha_minus)

    @property
    def rho_minus(self) -> float:
        lam, a = self.lambda_minus, self.alpha_minus
        return (lam + 1.0) ** a - lam**a

    @property
    def mu(self) -> float:
        return tempered_mu(self)

    @property
    def mu_plus(self) -> float:
        if self.alpha_plus is None:
            raise ValueError("positive-side parameters are not set")
        return -self.gamma_plus * gamma(-self.alpha_plus)

    def matched_stable(self) -> FmlsModel:
        """FMLS model with the same alpha and the same untempered adjustment mu_minus."""
        a = self.alpha_minus
        gamma_scale = (self.mu_minus * math.cos(math.pi * a / 2.0)) ** (1.0 / a)
        return FmlsModel(a, gamma_scale, self.r, self.q, scale_factor=1.0)

    def laplace_exponent(self, p: complex) -> complex:
        lam, a = self.lambda_minus, self.alpha_minus
        return -self.mu_minus * ((lam + complex(p)) ** a - lam**a)

    def laplace_exponent_derivative(self, p: float) -> float:
        lam, a = self.lambda_minus, self.alpha_minus
        return -self.mu_minus * a * (lam + p) ** (a - 1.0)

    def char_exponent(self, z: complex) -> complex:
        lam, a = self.lambda_minus, self.alpha_minus
        return self.mu_minus * ((lam + 1j * complex(z)) ** a - lam**a)


Model = Union[FmlsModel, TemperedModel]


@dataclass(frozen=True)
class Moneyness:
    """Log-forward moneyness ``k_u = log(S / K**(1/u)) + (r - q) tau``."""

    k_u: float
    u: float
    strike: float

    @classmethod
    def of(cls, spot: float, strike: float, u: float, tau: float, r: float, q: float = 0.0) -> "Moneyness":
        if spot <= 0.0 or strike <= 0.0 or u <= 0.0:
            raise ValueError("spot, strike and u must be positive")
        return cls(math.log(spot) - math.log(strike) / u + (r - q) * tau, u, strike)


def fmls_mu(model: FmlsModel) -> float:
    """Martingale adjustment gamma**alpha / cos(pi alpha / 2)."""
    return model.gamma_scale**model.alpha / math.cos(math.pi * model.alpha / 2.0)


def tempered_mu(model: TemperedModel) -> float:
    """Martingale adjustment ((lambda+1)**alpha - lambda**alpha) * mu_minus."""
    return model.rho_minus * model.mu_minus


def stable_char_exponent(k: float, model: FmlsModel) -> complex:
    """Feller form gamma^a |k|^a (1 + i tan(pi a / 2) sgn k) for beta = -1, real k."""
    a = model.alpha
    # tan(pi) is not exactly 0 in floating point
    t = 0.0 if a == 2.0 else math.tan(math.pi * a / 2.0)
    sgn = (k > 0) - (k < 0)
    return model.gamma_scale**a * abs(k) ** a * complex(1.0, t * sgn)


def risk_neutral_cf(k: complex, t: float, model: Model) -> complex:
    """E[exp(i k (mu t + X_t))]; accepts complex ``k`` with Im k <= 0 (e.g. ``w - 1j``)."""
    if not t > 0.0:
        raise ValueError("t must be positive")
    k = complex(k)
    return cmath.exp(1j * model.mu * k * t - t * model.char_exponent(k))


# -- densities ---------------------------------------------------------------

_DENSITY_N_MAX = 200
_DENSITY_RTOL = 1e-16
# beyond this ratio of largest term to result the residue sum has lost too many digits
_CANCELLATION_LIMIT = 1e6


def _stable_series(z: float, alpha: float, n_max: int) -> tuple[float, float] | None:
    """sum_{j>=0} (1/Gamma(1-(j+1)/alpha)) (-z)^j / j!, with the largest |term|.

    Returns None when the cap is hit before the terms decay.
    """
    if z == 0.0:
        value = rgamma(1.0 - 1.0 / alpha)
        return value, abs(value)
    log_z = math.log(abs(z))
    flip = z > 0.0  # (-z)^j alternates for positive z
    terms: list[float] = []
    small = 0
    for j in range(n_max):
        sign, lrg = log_abs_rgamma(1.0 - (j + 1) / alpha)
        term = 0.0
        if sign:
            term = sign * math.exp(lrg - math.lgamma(j + 1.0) + j * log_z)
            if flip and j % 2:
                term = -term
        terms.append(term)
        if term == 0.0 or abs(term) > _DENSITY_RTOL * abs(math.fsum(terms)):
            small = 0
            continue
        small += 1
        if small >= 3:
            return math.fsum(terms), max(map(abs, terms))
    return None


def _inversion_density(x: float, t: float, model: FmlsModel) -> float:
    """(1/pi) int_0^inf Re[exp(-i k x) exp(-t Psi(k))] dk for the stable law."""
    a = model.alpha
    scale = t * model.gamma_scale**a
    drift = 0.0 if a == 2.0 else scale * math.tan(math.pi * a / 2.0)
    k_max = (45.0 / scale) ** (1.0 / a)

    def integrand(k: float) -> float:
        ka = k**a
        return math.exp(-scale * ka) * math.cos(k * x + drift * ka)

    # one subinterval per couple of oscillations keeps QUADPACK comfortable
    pieces = max(1, min(200, int(k_max * abs(x) / (2.0 * math.pi)) + 1))
    edges = [k_max * i / pieces for i in range(pieces + 1)]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(integrand, lo, hi, epsabs=1e-13, epsrel=1e-11, limit=200)
        total += val
    return total / math.pi


def _stable_density(x: float, t: float, alpha: float, gamma_scale: float, mu: float) -> float:
    if alpha == 2.0:
        sd = gamma_scale * math.sqrt(2.0 * t)
        return norm_pdf(x / sd) / sd
    y_scale = (-mu * t) ** (1.0 / alpha)
    if x > 0.0:
        res = _stable_series(x / y_scale, alpha, _DENSITY_N_MAX)
        if res is not None:
            value, biggest = res
            if biggest <= _CANCELLATION_LIMIT * abs(value):
                return max(value / (alpha * y_scale), 0.0)
    model = FmlsModel(alpha, gamma_scale, scale_factor=1.0)
    return max(_inversion_density(x, t, model), 0.0)


def fmls_density(x: float, t: float, model: FmlsModel) -> float:
    """Density of X_t at ``x``.

    For x > 0 the Mellin residue series is summed; the heavy (x <= 0) side,
    and any point where the series would cancel catastrophically, is obtained
    by Fourier inversion of the characteristic function.
    """
    if not t > 0.0:
        raise ValueError("t must be positive")
    return _stable_density(float(x), t, model.alpha, model.gamma_scale, model.mu)


def tempered_density(
    x: float,
    t: float,
    side: Literal["negative", "positive"],
    model: TemperedModel,
) -> float:
    """Density of a one-sided tempered stable process, as an exponential tilt of the stable one."""
    if not t > 0.0:
        raise ValueError("t must be positive")
    x = float(x)
    if side == "negative":
        a, lam, mu_side = model.alpha_minus, model.lambda_minus, model.mu_minus
        arg, sign = x, 1.0
    elif side == "positive":
        if model.alpha_plus is None or model.gamma_plus <= 0.0:
            raise ValueError("positive-side parameters are not set")
        a, lam, mu_side = model.alpha_plus, model.lambda_plus, model.mu_plus
        arg, sign = -x, -1.0
    else:
        raise ValueError(f"side must be 'negative' or 'positive', got {side!r}")
    gamma_scale = (mu_side * math.cos(math.pi * a / 2.0)) ** (1.0 / a)
    base = _stable_density(arg, t, a, gamma_scale, mu_side)
    if base == 0.0:
        return 0.0
    return math.exp(lam**a * mu_side * t + sign * lam * x) * base
