"""Line-oriented ``key = value`` scenario files.

Blank lines and ``#`` comments are ignored. Numbers use Python's float
syntax, which is locale-independent (dot decimal separator only).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .levy import FmlsModel, TemperedModel
from .pricing import OptionKind, Scenario
from .series import SeriesConfig

__all__ = ["ScenarioFileError", "ScenarioSpec", "parse_scenario", "load_scenario"]

_NUMERIC = {
    "alpha", "sigma", "gamma_minus", "lambda_minus", "r", "q", "S", "tau", "u",
    "K", "K1", "K2", "K_minus", "K_plus", "tol",
}
_INTEGER = {"n_max", "m_max"}
_TEXT = {"model", "kind", "ordering"}
KNOWN_KEYS = frozenset(_NUMERIC | _INTEGER | _TEXT)

_STRIKE_KEYS = {
    OptionKind.GAP: ("K1", "K2"),
    OptionKind.CAPPED_CN: ("K_minus", "K_plus"),
    OptionKind.CAPPED_AN: ("K_minus", "K_plus"),
    OptionKind.CAPPED_EUROPEAN: ("K_minus", "K_plus"),
}


class ScenarioFileError(ValueError):
    """Malformed or incomplete scenario file."""


@dataclass(frozen=True)
class ScenarioSpec:
    model: FmlsModel | TemperedModel
    scenario: Scenario
    config: SeriesConfig

    @property
    def tempered(self) -> bool:
        return isinstance(self.model, TemperedModel)


def _number(key: str, text: str, lineno: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ScenarioFileError(f"line {lineno}: {key} = {text!r} is not a number") from None
    if not math.isfinite(value):
        raise ScenarioFileError(f"line {lineno}: {key} must be finite")
    return value


def _read_pairs(text: str) -> dict[str, object]:
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioFileError(f"line {lineno}: expected key = value, got {raw.strip()!r}")
        key, _, val = (part.strip() for part in line.partition("="))
        if key not in KNOWN_KEYS:
            raise ScenarioFileError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ScenarioFileError(f"line {lineno}: duplicate key {key!r}")
        if not val:
            raise ScenarioFileError(f"line {lineno}: empty value for {key!r}")
        if key in _NUMERIC:
            values[key] = _number(key, val, lineno)
        elif key in _INTEGER:
            try:
                values[key] = int(val)
            except ValueError:
                raise ScenarioFileError(f"line {lineno}: {key} = {val!r} is not an integer") from None
        else:
            values[key] = val.lower()
    return values


def _require(values: dict[str, object], *keys: str) -> list:
    missing = [k for k in keys if k not in values]
    if missing:
        raise ScenarioFileError(f"missing required key {missing[0]!r}")
    return [values[k] for k in keys]


def parse_scenario(text: str) -> ScenarioSpec:
    """Build model, scenario and series configuration from file contents."""
    values = _read_pairs(text)
    model_name = values.get("model", "fmls")
    try:
        kind = OptionKind(_require(values, "kind")[0])
    except ValueError as exc:
        if isinstance(exc, ScenarioFileError):
            raise
        names = ", ".join(k.value for k in OptionKind)
        raise ScenarioFileError(f"unknown kind {values['kind']!r} (expected one of {names})") from None
    alpha, spot, tau = _require(values, "alpha", "S", "tau")
    r, q, u = values.get("r", 0.0), values.get("q", 0.0), values.get("u", 1.0)

    try:
        if model_name == "fmls":
            for key in ("gamma_minus", "lambda_minus"):
                if key in values:
                    raise ScenarioFileError(f"key {key!r} only applies to model = tempered")
            model: FmlsModel | TemperedModel = FmlsModel(alpha, _require(values, "sigma")[0], r, q)
        elif model_name == "tempered":
            if kind is not OptionKind.DIGITAL_CN:
                raise ScenarioFileError("model = tempered only prices kind = digital-cn")
            lam = values.get("lambda_minus", 0.0)
            if "gamma_minus" in values and "sigma" in values:
                raise ScenarioFileError("give either sigma or gamma_minus, not both")
            if "gamma_minus" in values:
                model = TemperedModel(alpha, values["gamma_minus"], lam, r, q)
            elif "sigma" in values:
                model = TemperedModel.from_sigma(alpha, values["sigma"], lam, r, q)
            else:
                raise ScenarioFileError("missing required key 'sigma' (or 'gamma_minus')")
        else:
            raise ScenarioFileError(f"unknown model {model_name!r} (expected fmls or tempered)")

        strike_keys = _STRIKE_KEYS.get(kind, ("K",))
        strikes = _require(values, *strike_keys)
        for key in {"K", "K1", "K2", "K_minus", "K_plus"} - set(strike_keys):
            if key in values:
                raise ScenarioFileError(f"key {key!r} does not apply to kind = {kind.value}")
        if kind is OptionKind.GAP:
            scenario = Scenario(kind, spot, tau, strikes[0], u, trigger=strikes[1])
        elif kind.capped:
            scenario = Scenario(kind, spot, tau, strikes[0], u, cap=strikes[1])
        else:
            scenario = Scenario(kind, spot, tau, strikes[0], u)

        defaults = SeriesConfig()
        config = SeriesConfig(
            n_max=values.get("n_max", defaults.n_max),
            m_max=values.get("m_max", defaults.m_max),
            tol=values.get("tol", defaults.tol),
            ordering=values.get("ordering", defaults.ordering),
        )
    except ScenarioFileError:
        raise
    except ValueError as exc:
        raise ScenarioFileError(str(exc)) from None
    return ScenarioSpec(model, scenario, config)


def load_scenario(path: str | Path) -> ScenarioSpec:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioFileError(f"cannot read {path}: {exc.strerror or exc}") from None
    return parse_scenario(text)
