"""Shell-ordered summation of residue series with a stop rule and error diagnostics.

Terms are carried as (sign, log magnitude) so that factorials and Gamma
factors never overflow. Sums are exact over the float terms (``math.fsum``);
when the terms themselves are too large for the double-precision result to be
trusted, the grid can be re-evaluated in multiprecision arithmetic.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from typing import Any, Callable, Literal

import mpmath
import numpy as np

from .special import log_abs_rgamma

__all__ = ["SeriesConfig", "PriceResult", "SeriesSum", "TermGrid", "sum_grid", "sum_grid_exact"]

_EPS = sys.float_info.epsilon
_LOG_MAX = 700.0
# terms below tol * exp(-_PRUNE) are left out of multiprecision sums
_PRUNE = 40.0

ExactTerms = Callable[[], Callable[[int, int], Any]]


@dataclass(frozen=True)
class SeriesConfig:
    """Truncation and stopping policy.

    ``ordering="diagonal"`` sums anti-diagonals n+m = d and stops once
    ``consecutive_small`` successive complete diagonals each contribute less
    than ``tol`` (sum of absolute terms, price units). ``"rectangular"`` sums
    the full n <= n_max, m <= m_max block in square shells max(n, m) = k,
    which is how published truncation tables are laid out.

    ``precision_tol`` bounds the accepted rounding error (price units); above
    it the grid is recomputed with ``mpmath`` when ``exact_fallback`` is set.
    """

    n_max: int = 50
    m_max: int = 50
    tol: float = 1e-12
    consecutive_small: int = 3
    ordering: Literal["diagonal", "rectangular"] = "diagonal"
    precision_tol: float = 1e-8
    exact_fallback: bool = True
    max_dps: int = 600

    def __post_init__(self) -> None:
        if self.n_max < 1 or self.m_max < 1:
            raise ValueError("n_max and m_max must be at least 1")
        if not self.tol > 0.0:
            raise ValueError("tol must be positive")
        if self.consecutive_small < 2:
            raise ValueError("consecutive_small must be at least 2")
        if self.ordering not in ("diagonal", "rectangular"):
            raise ValueError(f"unknown ordering {self.ordering!r}")
        if not self.precision_tol > 0.0:
            raise ValueError("precision_tol must be positive")

    @classmethod
    def truncated(cls, order: int, **kw) -> "SeriesConfig":
        """Rectangular n_max = m_max = order, the layout of the published tables."""
        return cls(n_max=order, m_max=order, ordering="rectangular", **kw)


@dataclass(frozen=True)
class PriceResult:
    price: float
    terms_used: int
    last_term_magnitude: float
    converged: bool
    series_partial_sums: tuple[float, ...] | None = None
    rounding_error: float = 0.0
    notes: tuple[str, ...] = ()

    def __float__(self) -> float:
        return self.price


@dataclass(frozen=True)
class SeriesSum:
    """Outcome of summing one term grid, already in price units."""

    value: float
    terms_used: int
    last_magnitude: float
    stopped: bool
    rounding_error: float
    partial_sums: tuple[float, ...]
    overflow: bool = False
    exact: bool = False

    def precise(self, config: SeriesConfig) -> bool:
        return not self.overflow and self.rounding_error <= config.precision_tol

    def converged(self, config: SeriesConfig) -> bool:
        return self.stopped and self.precise(config)


@dataclass
class TermGrid:
    """Terms ``sign * exp(log_mag)`` on an (n, m) grid, plus a per-term error proxy.

    ``log_weight`` accumulates the absolute size of every logarithm that went
    into a term; the relative rounding error of ``exp(log_mag)`` is of order
    eps times that. ``exact`` builds an evaluator of single terms in the
    current ``mpmath`` precision.
    """

    sign: np.ndarray
    log_mag: np.ndarray
    log_weight: np.ndarray = field(default=None)  # type: ignore[assignment]
    exact: ExactTerms | None = None

    def __post_init__(self) -> None:
        if self.log_weight is None:
            self.log_weight = np.abs(np.where(np.isfinite(self.log_mag), self.log_mag, 0.0))

    @property
    def shape(self) -> tuple[int, int]:
        return self.sign.shape  # type: ignore[return-value]

    @property
    def live(self) -> np.ndarray:
        return self.sign != 0

    @property
    def envelope(self) -> np.ndarray:
        """log of an upper bound on each term's magnitude (-inf for zero terms)."""
        return np.where(self.live, self.log_mag, -np.inf)

    def values(self, log_scale: float = 0.0) -> tuple[np.ndarray, bool]:
        lm = self.log_mag + log_scale
        live = self.live
        overflow = bool(np.any(lm[live] > _LOG_MAX))
        with np.errstate(over="ignore", invalid="ignore"):
            v = np.where(live, self.sign * np.exp(np.minimum(lm, _LOG_MAX)), 0.0)
        return v, overflow

    def __sub__(self, other: "TermGrid") -> "_Difference":
        return _Difference(self, other)


@dataclass
class _Difference:
    """Termwise difference of two grids (corridor payoffs)."""

    left: TermGrid
    right: TermGrid

    @property
    def shape(self) -> tuple[int, int]:
        return self.left.shape

    @property
    def live(self) -> np.ndarray:
        return self.left.live | self.right.live

    @property
    def envelope(self) -> np.ndarray:
        return np.logaddexp(self.left.envelope, self.right.envelope)

    @property
    def exact(self) -> ExactTerms | None:
        if self.left.exact is None or self.right.exact is None:
            return None
        left, right = self.left.exact, self.right.exact

        def build():
            f, g = left(), right()
            return lambda n, m: f(n, m) - g(n, m)

        return build

    def values(self, log_scale: float = 0.0) -> tuple[np.ndarray, bool]:
        a, oa = self.left.values(log_scale)
        b, ob = self.right.values(log_scale)
        return a - b, oa or ob

    @property
    def log_weight(self) -> np.ndarray:
        return np.maximum(self.left.log_weight, self.right.log_weight)


def log_rgamma_table(args: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`log_abs_rgamma` over an array of arguments."""
    args = np.asarray(args, dtype=float)
    uniq, inverse = np.unique(args, return_inverse=True)
    pairs = [log_abs_rgamma(float(a)) for a in uniq]
    sign = np.array([s for s, _ in pairs], dtype=float)[inverse].reshape(args.shape)
    logv = np.array([v for _, v in pairs], dtype=float)[inverse].reshape(args.shape)
    return sign, logv


def power_terms(x: float, exponents: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(sign, log|x|^e) for integer exponents; 0**0 = 1."""
    exponents = np.asarray(exponents)
    if x == 0.0:
        sign = np.where(exponents == 0, 1.0, 0.0)
        return sign, np.zeros(exponents.shape)
    sign = np.where((x < 0.0) & (exponents % 2 == 1), -1.0, 1.0)
    return sign, exponents * math.log(abs(x))


def _shells(shape: tuple[int, int], ordering: str) -> tuple[np.ndarray, int]:
    """Shell index of every cell and the last shell that lies wholly inside the grid."""
    n, m = np.indices(shape)
    if ordering == "diagonal":
        rows, cols = shape
        complete = rows - 1 if cols == 1 else (cols - 1 if rows == 1 else min(rows, cols) - 1)
        return n + m, complete
    return np.maximum(n, m), int(max(shape)) - 1


@dataclass
class _Accumulator:
    config: SeriesConfig
    complete: int
    early_stop: bool
    partial: list = field(default_factory=list)
    total: Any = 0.0
    used: int = 0
    small: int = 0
    stopped: bool = False
    last: float = math.inf

    def add(self, s: int, shell_sum, abs_sum: float, count: int) -> bool:
        """Record one shell; True when summation may stop."""
        self.total = self.total + shell_sum
        self.partial.append(self.total)
        self.used += count
        self.last = abs_sum
        if s <= self.complete:
            self.small = self.small + 1 if abs_sum < self.config.tol else 0
            if self.small >= self.config.consecutive_small:
                self.stopped = True
                return self.early_stop
        return False


def sum_grid(
    grid: TermGrid | _Difference,
    config: SeriesConfig,
    scale: float = 1.0,
    mask: np.ndarray | None = None,
    ordering: str | None = None,
) -> SeriesSum:
    """Sum ``scale * grid`` shell by shell under ``config`` in double precision.

    A single series is a grid with one column; its shells are just n. Only
    shells lying wholly inside the grid count towards the stop rule.
    """
    ordering = ordering or config.ordering
    if not scale > 0.0:
        raise ValueError("scale must be positive")
    values, overflow = grid.values(math.log(scale))
    counted = grid.live if mask is None else (mask & grid.live)
    values = np.where(counted, values, 0.0)
    err = np.abs(values) * (8.0 + grid.log_weight) * _EPS
    shell, complete = _shells(values.shape, ordering)
    acc = _Accumulator(config, complete, ordering == "diagonal")
    rounding = 0.0
    shell_sums: list[float] = []
    for s in range(int(shell.max()) + 1):
        sel = shell == s
        vals = values[sel]
        shell_sums.append(math.fsum(vals))
        rounding += float(np.sum(err[sel]))
        if acc.add(s, 0.0, float(np.sum(np.abs(vals))), int(np.count_nonzero(counted[sel]))):
            break
    partial = [math.fsum(shell_sums[: i + 1]) for i in range(len(shell_sums))]
    value = partial[-1]
    if overflow or not math.isfinite(value):
        return SeriesSum(math.nan, acc.used, math.inf, False, math.inf, tuple(partial), True)
    rounding += abs(value) * _EPS
    return SeriesSum(value, acc.used, acc.last, acc.stopped, rounding, tuple(partial))


def exact_digits(grid: TermGrid | _Difference, config: SeriesConfig, scale: float, mask: np.ndarray | None = None) -> int:
    """Working precision that keeps cancellation error well below ``tol``."""
    env = grid.envelope + math.log(scale)
    if mask is not None:
        env = np.where(mask, env, -np.inf)
    peak = float(np.max(env)) / math.log(10.0)
    return int(math.ceil(max(peak, 0.0) - math.log10(min(config.tol, config.precision_tol)))) + 20


def sum_grid_exact(
    grid: TermGrid | _Difference,
    config: SeriesConfig,
    scale: float = 1.0,
    mask: np.ndarray | None = None,
    ordering: str | None = None,
) -> SeriesSum | None:
    """Same summation as :func:`sum_grid` with every term evaluated by ``mpmath``.

    Terms whose double-precision envelope is below ``tol * exp(-40)`` are
    dropped and their mass is booked as rounding error. Returns None when the
    grid has no exact evaluator or would need more than ``config.max_dps``
    digits.
    """
    if grid.exact is None or not scale > 0.0:
        return None
    ordering = ordering or config.ordering
    dps = exact_digits(grid, config, scale, mask)
    if dps > config.max_dps:
        return None
    env = grid.envelope + math.log(scale)
    counted = grid.live if mask is None else (mask & grid.live)
    keep = counted & (env >= math.log(config.tol) - _PRUNE)
    with np.errstate(over="ignore"):
        pruned = float(np.sum(np.exp(np.where(counted & ~keep, env, -np.inf))))
    shell, complete = _shells(grid.shape, ordering)
    acc = _Accumulator(config, complete, ordering == "diagonal")
    with mpmath.workdps(dps):
        term = grid.exact()
        acc.total = mpmath.mpf(0)
        sc = mpmath.mpf(scale)
        for s in range(int(shell.max()) + 1):
            cells = np.argwhere((shell == s) & keep)
            vals = [sc * term(int(n), int(m)) for n, m in cells]
            shell_sum = mpmath.fsum(vals)
            abs_sum = float(mpmath.fsum(abs(v) for v in vals))
            count = int(np.count_nonzero(counted[shell == s]))
            if acc.add(s, shell_sum, abs_sum, count):
                break
        value = float(acc.total)
        partial = tuple(float(p) for p in acc.partial)
    rounding = pruned + abs(value) * _EPS
    return SeriesSum(value, acc.used, acc.last, acc.stopped, rounding, partial, exact=True)
