"""Derive fuzzification breakpoints from a reference corpus via quartiles.

Q1 becomes the LOW/MED crossover start, the median the MED peak, Q3 the
start of the HIGH plateau, and the corpus maximum the top of the universe.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    MissingMetricInCorpus,
    NegativeMetricValue,
    NonFiniteInput,
    NonMonotoneOverride,
    TooFewValues,
)
from .fuzzy import LinguisticVariable
from .model import MetricSpec, ModelConfig, ServiceMetrics

PARAMETERS = ("L3", "L4", "M3", "MAX")

# every symbol that names a shared breakpoint
ALIASES = {
    "L3": "L3", "M1": "L3",
    "L4": "L4", "M2": "L4", "H1": "L4",
    "M3": "M3", "H2": "M3",
    "MAX": "MAX", "H3": "MAX", "H4": "MAX",
}


def quartiles(values: Sequence[float], method: str = "linear") -> tuple[float, float, float]:
    """Q1, median and Q3.

    ``method`` is any numpy quantile method; the default interpolates between
    order statistics at position ``(n - 1) * p``.
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size < 2:
        raise TooFewValues(f"quartiles need at least 2 values, got {arr.size}")
    q1, q2, q3 = np.quantile(arr, [0.25, 0.5, 0.75], method=method)
    return float(q1), float(q2), float(q3)


@dataclass(frozen=True)
class MetricCalibration:
    name: str
    q1: float
    q2: float
    q3: float
    max: float
    parameters: dict[str, float]
    overrides: dict[str, float] = field(default_factory=dict)
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class CalibrationReport:
    metrics: tuple[MetricCalibration, ...]
    sources: tuple[str, ...] = ()

    def __getitem__(self, name: str) -> MetricCalibration:
        for m in self.metrics:
            if m.name == name:
                return m
        raise KeyError(name)

    def render(self) -> str:
        lines = [f"{'metric':<8}{'Q1':>10}{'Q2':>10}{'Q3':>10}{'max':>10}"
                 "   L3=M1 / L4=M2=H1 / M3=H2 / H3=H4"]
        for m in self.metrics:
            p = m.parameters
            lines.append(f"{m.name:<8}{m.q1:>10.4g}{m.q2:>10.4g}{m.q3:>10.4g}{m.max:>10.4g}   "
                         f"{p['L3']:.4g} / {p['L4']:.4g} / {p['M3']:.4g} / {p['MAX']:.4g}")
            if m.overrides:
                lines.append("        overrides: " +
                             ", ".join(f"{k}={v:g}" for k, v in m.overrides.items()))
            for w in m.warnings:
                lines.append(f"        warning: {w}")
        if self.sources:
            lines.append(f"sources: {', '.join(self.sources)}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ReferenceCorpus:
    values: dict[str, tuple[float, ...]]
    sources: tuple[str, ...] = ()

    @classmethod
    def from_services(cls, services: Sequence[ServiceMetrics]) -> "ReferenceCorpus":
        names: list[str] = []
        for s in services:
            names.extend(k for k in s.values if k not in names)
        values = {n: tuple(s.values[n] for s in services if n in s.values) for n in names}
        return cls(values, tuple(s.service for s in services))


def _normalise_overrides(overrides: Mapping[str, float] | None) -> dict[str, float]:
    out = {}
    for key, value in (overrides or {}).items():
        canon = ALIASES.get(key.upper())
        if canon is None:
            raise NonMonotoneOverride(f"unknown parameter {key!r}; use one of {', '.join(ALIASES)}")
        out[canon] = float(value)
    return out


def derive_parameters(values: Sequence[float], overrides: Mapping[str, float] | None = None,
                      name: str = "metric", method: str = "linear") -> MetricCalibration:
    arr = np.asarray(values, dtype=float)
    if arr.size < 4:
        raise TooFewValues(f"{name}: calibration needs at least 4 values, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInput(f"{name}: reference values must be finite")
    if np.any(arr < 0):
        raise NegativeMetricValue(f"{name}: reference values must be non-negative")
    q1, q2, q3 = quartiles(arr, method)
    top = float(arr.max())
    params = {"L3": q1, "L4": q2, "M3": q3, "MAX": top}
    ov = _normalise_overrides(overrides)
    params.update(ov)

    chain = [0.0] + [params[k] for k in PARAMETERS]
    if any(a > b for a, b in zip(chain, chain[1:])):
        raise NonMonotoneOverride(
            f"{name}: parameters must satisfy 0 <= L3 <= L4 <= M3 <= MAX, got "
            + ", ".join(f"{k}={params[k]:g}" for k in PARAMETERS))
    if params["MAX"] <= 0:
        raise TooFewValues(f"{name}: every reference value is zero; the universe is empty")

    warnings = []
    if params["L3"] == params["L4"]:
        warnings.append("L3 equals L4; the LOW/MED transition is a vertical edge")
    if params["L4"] == params["M3"]:
        warnings.append("L4 equals M3; the MED/HIGH transition is a vertical edge")
    return MetricCalibration(name, q1, q2, q3, top, params, ov, tuple(warnings))


def metric_spec(cal: MetricCalibration, unit: str = "") -> MetricSpec:
    p = cal.parameters
    return MetricSpec(cal.name, unit,
                      LinguisticVariable.standard(cal.name, p["L3"], p["L4"], p["M3"], p["MAX"]))


def calibrate_metric(values: Sequence[float], overrides: Mapping[str, float] | None = None,
                     name: str = "metric", unit: str = "", method: str = "linear") -> MetricSpec:
    return metric_spec(derive_parameters(values, overrides, name, method), unit)


def calibrate_model(corpus: ReferenceCorpus, overrides: Mapping[str, Mapping[str, float]] | None = None,
                    base: ModelConfig | None = None, method: str = "linear"
                    ) -> tuple[ModelConfig, CalibrationReport]:
    """Recalibrate every metric of ``base`` (the default model if omitted).

    Rule bases, output variables, weights and threshold are kept from ``base``.
    """
    if base is None:
        from .dataio import default_config
        base = default_config()
    overrides = dict(overrides or {})
    names = [m.name for m in base.metrics]
    missing = [n for n in names if not corpus.values.get(n)]
    if missing:
        raise MissingMetricInCorpus(f"reference corpus lacks metrics {missing}")
    unknown = set(overrides) - set(names)
    if unknown:
        raise MissingMetricInCorpus(f"overrides name unknown metrics {sorted(unknown)}")

    cals = tuple(derive_parameters(corpus.values[n], overrides.get(n), n, method) for n in names)
    metrics = tuple(metric_spec(c, m.unit) for c, m in zip(cals, base.metrics))
    cfg = ModelConfig(metrics, base.characteristics, dict(base.weights), base.threshold)
    return cfg, CalibrationReport(cals, corpus.sources)
