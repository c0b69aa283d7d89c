"""Real special functions: Gamma, its entire reciprocal, and the standard normal law."""

from __future__ import annotations

import math

__all__ = [
    "PoleError",
    "gamma",
    "rgamma",
    "log_abs_rgamma",
    "norm_pdf",
    "norm_cdf",
]

POLE_ATOL = 1e-12
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_LOG_PI = math.log(math.pi)
# math.gamma overflows just above 171.62
_GAMMA_DIRECT_MAX = 171.0


class PoleError(ValueError):
    """Gamma evaluated at (or within POLE_ATOL of) a nonpositive integer."""


def _sinpi(x: float) -> float:
    # sin(pi*x) with an exact zero at integers and no loss near them
    n = round(x)
    s = math.sin(math.pi * (x - n))
    return -s if n % 2 else s


def gamma(x: float) -> float:
    """Gamma function on the real line. Raises PoleError at nonpositive integers."""
    x = float(x)
    if x <= 0.0 and abs(x - round(x)) <= POLE_ATOL:
        raise PoleError(f"Gamma has a pole at {x!r}")
    return math.gamma(x)


def rgamma(x: float) -> float:
    """Reciprocal Gamma 1/Gamma(x), an entire function.

    Exactly zero at 0, -1, -2, ... and continuous through them.
    """
    x = float(x)
    if x >= 0.5:
        if x <= _GAMMA_DIRECT_MAX:
            return 1.0 / math.gamma(x)
        return math.exp(-math.lgamma(x))
    # reflection: 1/Gamma(x) = sin(pi x) Gamma(1-x) / pi
    s = _sinpi(x)
    if s == 0.0:
        return 0.0
    y = 1.0 - x
    if y <= _GAMMA_DIRECT_MAX:
        return s * math.gamma(y) / math.pi
    return math.copysign(math.exp(math.log(abs(s)) + math.lgamma(y) - _LOG_PI), s)


def log_abs_rgamma(x: float) -> tuple[int, float]:
    """Return ``(sign, log|1/Gamma(x)|)``; sign is 0 (and the log -inf) at poles of Gamma.

    Used where 1/Gamma(x) itself would overflow, e.g. x = 1 - n/alpha for large n.
    """
    x = float(x)
    if x > 0.0:
        return 1, -math.lgamma(x)
    s = _sinpi(x)
    if s == 0.0:
        return 0, -math.inf
    return (1 if s > 0.0 else -1), math.log(abs(s)) + math.lgamma(1.0 - x) - _LOG_PI


def norm_pdf(x: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


def norm_cdf(x: float) -> float:
    # erfc keeps full relative accuracy in the lower tail
    return 0.5 * math.erfc(-x / math.sqrt(2.0))
