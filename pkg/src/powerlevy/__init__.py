"""Residue-series pricing of power options under stable and tempered stable Levy models."""

from .levy import (
    FmlsModel,
    Moneyness,
    TemperedModel,
    fmls_density,
    fmls_mu,
    risk_neutral_cf,
    stable_char_exponent,
    tempered_density,
    tempered_mu,
)
from .pricing import (
    DEFAULT_CONFIG,
    OptionKind,
    Scenario,
    atm_european_expansion,
    price,
    price_capped_an,
    price_capped_cn,
    price_capped_european,
    price_digital_an,
    price_digital_cn,
    price_european,
    price_gap,
    price_log,
)
from .series import PriceResult, SeriesConfig
from .special import PoleError, gamma, log_abs_rgamma, norm_cdf, norm_pdf, rgamma
from .tempered import atm_tempered_linear_approx, price_digital_cn_tempered

__all__ = [
    "FmlsModel",
    "Moneyness",
    "TemperedModel",
    "fmls_density",
    "fmls_mu",
    "risk_neutral_cf",
    "stable_char_exponent",
    "tempered_density",
    "tempered_mu",
    "DEFAULT_CONFIG",
    "OptionKind",
    "Scenario",
    "atm_european_expansion",
    "price",
    "price_capped_an",
    "price_capped_cn",
    "price_capped_european",
    "price_digital_an",
    "price_digital_cn",
    "price_european",
    "price_gap",
    "price_log",
    "PriceResult",
    "SeriesConfig",
    "PoleError",
    "gamma",
    "log_abs_rgamma",
    "norm_cdf",
    "norm_pdf",
    "rgamma",
    "atm_tempered_linear_approx",
    "price_digital_cn_tempered",
]
