"""Numerical tables and figure data: truncated series against their references.

Every builder returns ``(header, rows)`` where each row starts with a text
label followed by floats. Cells are independent and may be computed in a
process pool; rows always come back in the order listed here.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from typing import Callable, Sequence

from .levy import FmlsModel, TemperedModel
from .oracle.closed_form import bs_log_call, heynen_kat_power_call
from .oracle.gil_pelaez import QuadConfig, gil_pelaez_european
from .pricing import OptionKind, Scenario, price, price_digital_cn, price_european
from .series import SeriesConfig
from .tempered import atm_tempered_linear_approx, price_digital_cn_tempered

__all__ = [
    "REFERENCE_MARKET",
    "TABLE_ORDERS",
    "table_1",
    "table_2",
    "table_3",
    "build_table",
    "table_3_scenarios",
    "order_trace",
    "spot_sweep",
    "cap_sweep",
    "lambda_sweep",
]

Rows = list[list]
Table = tuple[list[str], Rows]

# r, sigma, K, tau shared by all tables
REFERENCE_MARKET = {"r": 0.01, "sigma": 0.2, "K": 4000.0, "tau": 2.0}
TABLE_ORDERS = {1: (3, 5, 10), 2: (3, 5, 10), 3: (3, 10, 20, 30)}
TABLE_2_POWERS = (1.0, 1.5, 2.0, 3.0)


def _run(fn: Callable, args: Sequence[tuple], jobs: int) -> list:
    if jobs <= 1 or len(args) < 2:
        return [fn(*a) for a in args]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, *zip(*args)))


def _atm_spot(K: float, r: float, tau: float, u: float = 1.0) -> float:
    # S with k_u = 0, i.e. S^u = K e^{-u r tau}
    return K ** (1.0 / u) * math.exp(-r * tau)


def _table_1_cell(spot: float, order: int | None) -> float:
    m = REFERENCE_MARKET
    if order is None:
        return bs_log_call(spot, m["K"], m["r"], m["sigma"], m["tau"])
    model = FmlsModel(2.0, m["sigma"], m["r"])
    return price(Scenario(OptionKind.LOG, spot, m["tau"], m["K"]), model, SeriesConfig.truncated(order)).price


def table_1(jobs: int = 1) -> Table:
    """Log call, alpha = 2, u = 1: series at n_max = 3, 5, 10 and the closed form."""
    m = REFERENCE_MARKET
    spots = [("S=5000", 5000.0), ("S=4200", 4200.0), ("ATM", _atm_spot(m["K"], m["r"], m["tau"])),
             ("S=3800", 3800.0), ("S=3000", 3000.0)]
    cols = [*TABLE_ORDERS[1], None]
    values = _run(_table_1_cell, [(s, c) for _, s in spots for c in cols], jobs)
    rows = [[label, *values[i * len(cols):(i + 1) * len(cols)]] for i, (label, _) in enumerate(spots)]
    return ["row", *(f"n_max={c}" for c in TABLE_ORDERS[1]), "closed_form"], rows


def _table_2_cell(u: float, order: int | None) -> float:
    m = REFERENCE_MARKET
    spot = _atm_spot(m["K"], m["r"], m["tau"], u)
    if order is None:
        return heynen_kat_power_call(spot, m["K"], u, m["r"], m["sigma"], m["tau"])
    model = FmlsModel(2.0, m["sigma"], m["r"])
    sc = Scenario(OptionKind.EUROPEAN, spot, m["tau"], m["K"], u)
    return price_european(sc, model, SeriesConfig.truncated(order)).price


def table_2(jobs: int = 1) -> Table:
    """ATM-forward European power call, alpha = 2: series at max = 3, 5, 10 and Heynen-Kat."""
    cols = [*TABLE_ORDERS[2], None]
    values = _run(_table_2_cell, [(u, c) for u in TABLE_2_POWERS for c in cols], jobs)
    rows = [[f"u={u:g}", *values[i * len(cols):(i + 1) * len(cols)]] for i, u in enumerate(TABLE_2_POWERS)]
    return ["row", *(f"max={c}" for c in TABLE_ORDERS[2]), "heynen_kat"], rows


def table_3_scenarios() -> list[tuple[str, Scenario]]:
    """Long (tau = 2) and short (tau = 0.5) maturities, u = 1.

    The ATM row of both blocks sits at S = K e^{-2r}, the long-maturity
    forward-neutral spot.
    """
    m = REFERENCE_MARKET
    atm = _atm_spot(m["K"], m["r"], 2.0)
    out = []
    for block, tau in (("long", 2.0), ("short", 0.5)):
        for label, spot in (("S=5000", 5000.0), ("S=4200", 4200.0), ("ATM", atm), ("S=3800", 3800.0), ("S=3000", 3000.0)):
            out.append((f"{block} {label}", Scenario(OptionKind.EUROPEAN, spot, tau, m["K"])))
    return out


def _table_3_cell(spot: float, tau: float, order: int | None) -> float:
    m = REFERENCE_MARKET
    model = FmlsModel(1.7, m["sigma"], m["r"])
    sc = Scenario(OptionKind.EUROPEAN, spot, tau, m["K"])
    if order is None:
        return gil_pelaez_european(sc, model, QuadConfig())
    return price_european(sc, model, SeriesConfig.truncated(order)).price


def table_3(jobs: int = 1) -> Table:
    """European call, alpha = 1.7, u = 1: series at max = 3, 10, 20, 30 and Gil-Pelaez."""
    cols = [*TABLE_ORDERS[3], None]
    scen = table_3_scenarios()
    values = _run(_table_3_cell, [(s.spot, s.tau, c) for _, s in scen for c in cols], jobs)
    rows = [[label, *values[i * len(cols):(i + 1) * len(cols)]] for i, (label, _) in enumerate(scen)]
    return ["row", *(f"max={c}" for c in TABLE_ORDERS[3]), "gil_pelaez"], rows


def build_table(table_id: int, jobs: int = 1) -> Table:
    builders = {1: table_1, 2: table_2, 3: table_3}
    if table_id not in builders:
        raise ValueError(f"unknown table {table_id!r} (expected 1, 2 or 3)")
    return builders[table_id](jobs)


# -- convergence traces and sweeps -----------------------------------------------


def _truncated_prices(scenario: Scenario, model, config: SeriesConfig, max_order: int) -> list[float]:
    cfg = replace(config, n_max=max_order, m_max=max_order, ordering="rectangular")
    if isinstance(model, TemperedModel):
        res = price_digital_cn_tempered(scenario, model, cfg)
    else:
        res = price(scenario, model, cfg)
    partial = list(res.series_partial_sums or (res.price,))
    return [partial[min(k, len(partial) - 1)] for k in range(1, max_order + 1)]


def order_trace(scenario: Scenario, model, config: SeriesConfig, max_order: int) -> Table:
    """Price truncated at n_max = m_max = k for k = 1..max_order."""
    if max_order < 1:
        raise ValueError("max_order must be at least 1")
    values = _truncated_prices(scenario, model, config, max_order)
    return ["order", "price"], [[str(k), v] for k, v in enumerate(values, start=1)]


def _spot_cell(scenario, model, config, max_order, spot):
    return _truncated_prices(replace(scenario, spot=spot), model, config, max_order)


def spot_sweep(scenario: Scenario, model, config: SeriesConfig, max_order: int, spots: Sequence[float], jobs: int = 1) -> Table:
    """Truncated prices for every spot on a grid (one column per order)."""
    values = _run(_spot_cell, [(scenario, model, config, max_order, s) for s in spots], jobs)
    header = ["S", *(f"order_{k}" for k in range(1, max_order + 1))]
    return header, [[f"{s:g}", *v] for s, v in zip(spots, values)]


def _cap_cell(scenario, model, config, cap):
    capped = replace(scenario, kind=OptionKind.CAPPED_EUROPEAN, cap=cap)
    return price(capped, model, config)


def cap_sweep(scenario: Scenario, model: FmlsModel, config: SeriesConfig, caps: Sequence[float], jobs: int = 1) -> Table:
    """Capped European against the uncapped price as the cap K+ grows."""
    base = replace(scenario, kind=OptionKind.EUROPEAN, cap=None)
    uncapped = price_european(base, model, config)
    results = _run(_cap_cell, [(scenario, model, config, c) for c in caps], jobs)
    rows = [[f"{c:g}", r.price, uncapped.price, uncapped.price - r.price, float(r.converged and uncapped.converged)]
            for c, r in zip(caps, results)]
    return ["K_plus", "capped", "uncapped", "gap", "converged"], rows


def _lambda_cell(scenario, model, config, lam):
    tm = replace(model, lambda_minus=lam)
    return price_digital_cn_tempered(scenario, tm, config).price, atm_tempered_linear_approx(tm, scenario.tau)


def lambda_sweep(scenario: Scenario, model: TemperedModel, config: SeriesConfig, lambdas: Sequence[float], jobs: int = 1) -> Table:
    """Stable digital, tempered digital and the small-lambda line for a grid of lambda."""
    stable = price_digital_cn(scenario, model.matched_stable(), config).price
    results = _run(_lambda_cell, [(scenario, model, config, lam) for lam in lambdas], jobs)
    rows = [[f"{lam:g}", stable, t, lin] for lam, (t, lin) in zip(lambdas, results)]
    return ["lambda_minus", "stable", "tempered", "linear_approx"], rows
