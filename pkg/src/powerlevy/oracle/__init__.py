"""Independent references for the residue series."""

from .closed_form import (
    bs_call,
    bs_digital_an,
    bs_digital_cn,
    bs_log_call,
    bs_price,
    gaussian_volatility,
    heynen_kat_power_call,
)
from .gil_pelaez import (
    OracleUnavailable,
    QuadConfig,
    QuadratureError,
    gil_pelaez_digital_an,
    gil_pelaez_digital_cn,
    gil_pelaez_european,
    gil_pelaez_pi,
    gil_pelaez_price,
)
from .monte_carlo import McConfig, mc_discounted_spot, mc_price, stable_increments

__all__ = [
    "bs_call",
    "bs_digital_an",
    "bs_digital_cn",
    "bs_log_call",
    "bs_price",
    "gaussian_volatility",
    "heynen_kat_power_call",
    "OracleUnavailable",
    "QuadConfig",
    "QuadratureError",
    "gil_pelaez_digital_an",
    "gil_pelaez_digital_cn",
    "gil_pelaez_european",
    "gil_pelaez_pi",
    "gil_pelaez_price",
    "McConfig",
    "mc_discounted_spot",
    "mc_price",
    "stable_increments",
]
