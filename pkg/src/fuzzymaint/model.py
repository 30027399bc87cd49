"""Hierarchical maintainability model.

Metrics are fuzzified, each characteristic (modifiability, testability, or a
custom one) runs its own rule base and is defuzzified to a 0-100 score, and
maintainability is the weighted sum of those scores. A service whose
maintainability is at or below the threshold is flagged for refactoring.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import DuplicateServiceName, InvariantViolation, MissingMetric
from .fuzzy import (
    AggregatedOutput,
    FiredRule,
    FuzzyValue,
    LinguisticVariable,
    RuleBase,
    defuzzify_centroid,
    fuzzify,
    infer,
)

log = logging.getLogger(__name__)

MODIFIABILITY = "modifiability"
TESTABILITY = "testability"


@dataclass(frozen=True)
class MetricSpec:
    name: str
    unit: str
    variable: LinguisticVariable


@dataclass(frozen=True)
class CharacteristicSpec:
    name: str
    inputs: tuple[str, ...]
    rulebase: RuleBase
    output: LinguisticVariable

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        if self.rulebase.inputs != self.inputs:
            raise InvariantViolation(
                f"{self.name}: rule base inputs {list(self.rulebase.inputs)} "
                f"differ from declared inputs {list(self.inputs)}")
        unknown = set(self.rulebase.output_levels) - set(self.output.level_names)
        if unknown:
            raise InvariantViolation(
                f"{self.name}: output variable lacks levels {sorted(unknown)}")


@dataclass(frozen=True)
class ModelConfig:
    metrics: tuple[MetricSpec, ...]
    characteristics: tuple[CharacteristicSpec, ...]
    weights: dict[str, float]
    threshold: float

    def __post_init__(self):
        object.__setattr__(self, "metrics", tuple(self.metrics))
        object.__setattr__(self, "characteristics", tuple(self.characteristics))
        object.__setattr__(self, "weights", {k: float(v) for k, v in self.weights.items()})
        object.__setattr__(self, "threshold", float(self.threshold))

        names = [m.name for m in self.metrics]
        if len(set(names)) != len(names):
            raise InvariantViolation(f"duplicate metric names {names}")
        chars = [c.name for c in self.characteristics]
        if len(set(chars)) != len(chars):
            raise InvariantViolation(f"duplicate characteristic names {chars}")
        for c in self.characteristics:
            missing = [i for i in c.inputs if i not in names]
            if missing:
                raise InvariantViolation(f"{c.name}: inputs {missing} are not declared metrics")
            holes = c.rulebase.missing_cells(
                {m.name: m.variable.level_names for m in self.metrics})
            if holes:
                log.warning("%s: rule table has %d empty cells, e.g. %s",
                            c.name, len(holes), holes[0])

        if set(self.weights) != set(chars):
            raise InvariantViolation(
                f"weights {sorted(self.weights)} must name exactly the characteristics {sorted(chars)}")
        bad = {k: w for k, w in self.weights.items() if not 0.0 <= w <= 1.0}
        if bad:
            raise InvariantViolation(f"weights outside [0, 1]: {bad}")
        if abs(math.fsum(self.weights.values()) - 1.0) > 1e-9:
            raise InvariantViolation(
                f"weights must sum to 1, got {math.fsum(self.weights.values())}")
        if not 0.0 <= self.threshold <= 100.0:
            raise InvariantViolation(f"threshold {self.threshold} outside [0, 100]")

    def metric(self, name: str) -> MetricSpec:
        for m in self.metrics:
            if m.name == name:
                return m
        raise MissingMetric(f"model has no metric {name!r}")

    def characteristic(self, name: str) -> CharacteristicSpec:
        for c in self.characteristics:
            if c.name == name:
                return c
        raise InvariantViolation(f"model has no characteristic {name!r}")

    def replace(self, *, weights: Mapping[str, float] | None = None,
                threshold: float | None = None) -> "ModelConfig":
        """Copy with new weights and/or threshold, re-validated."""
        return ModelConfig(
            self.metrics, self.characteristics,
            dict(self.weights if weights is None else weights),
            self.threshold if threshold is None else threshold)


@dataclass(frozen=True)
class ServiceMetrics:
    service: str
    values: dict[str, float]


@dataclass(frozen=True)
class CharacteristicResult:
    name: str
    inputs: dict[str, float]
    fuzzified: dict[str, FuzzyValue]
    aggregate: AggregatedOutput
    score: float

    @property
    def fired(self) -> tuple[FiredRule, ...]:
        return self.aggregate.fired


@dataclass(frozen=True)
class AssessmentResult:
    service: str
    characteristics: tuple[CharacteristicResult, ...]
    weights: dict[str, float]
    maintainability: float
    threshold: float
    needs_refactoring: bool

    def score(self, characteristic: str) -> float:
        for c in self.characteristics:
            if c.name == characteristic:
                return c.score
        raise KeyError(characteristic)

    @property
    def scores(self) -> dict[str, float]:
        return {c.name: c.score for c in self.characteristics}


def assess_characteristic(spec: CharacteristicSpec, metrics: ServiceMetrics,
                          variables: Mapping[str, MetricSpec | LinguisticVariable]
                          ) -> CharacteristicResult:
    """Score one characteristic; ``variables`` maps metric name to its spec."""
    missing = [m for m in spec.inputs if m not in metrics.values]
    if missing:
        raise MissingMetric(f"service {metrics.service!r}: missing metrics {missing}")
    fuzzified = {}
    for name in spec.inputs:
        var = variables[name]
        if isinstance(var, MetricSpec):
            var = var.variable
        try:
            fuzzified[name] = fuzzify(var, metrics.values[name])
        except ValueError as exc:
            raise type(exc)(f"service {metrics.service!r}: {exc}") from None
    agg = infer(spec.rulebase, fuzzified)
    return CharacteristicResult(
        spec.name,
        {n: float(metrics.values[n]) for n in spec.inputs},
        fuzzified, agg, defuzzify_centroid(agg, spec.output))


def combine(scores: Mapping[str, float], weights: Mapping[str, float]) -> float:
    """Weighted maintainability from characteristic scores."""
    return math.fsum(weights[k] * scores[k] for k in weights)


def assess_service(cfg: ModelConfig, metrics: ServiceMetrics) -> AssessmentResult:
    missing = [m.name for m in cfg.metrics if m.name not in metrics.values]
    if missing:
        raise MissingMetric(f"service {metrics.service!r}: missing metrics {missing}")
    variables = {m.name: m for m in cfg.metrics}
    chars = tuple(assess_characteristic(c, metrics, variables) for c in cfg.characteristics)
    mnt = combine({c.name: c.score for c in chars}, cfg.weights)
    return AssessmentResult(metrics.service, chars, dict(cfg.weights), mnt,
                            cfg.threshold, mnt <= cfg.threshold)


def assess_portfolio(cfg: ModelConfig, services: Sequence[ServiceMetrics]) -> list[AssessmentResult]:
    if not services:
        raise MissingMetric("no services to assess")
    seen = set()
    for s in services:
        if s.service in seen:
            raise DuplicateServiceName(f"service {s.service!r} appears more than once")
        seen.add(s.service)
    return [assess_service(cfg, s) for s in services]


def _fmt(x: float) -> str:
    return f"{x:.4f}"


def explain(result: AssessmentResult) -> str:
    """Render the full pipeline for one service as plain text."""
    lines = [f"service: {result.service}"]
    for c in result.characteristics:
        lines.append(f"{c.name}:")
        lines.append("  fuzzification")
        for name, fv in c.fuzzified.items():
            degrees = ", ".join(f"{lv}={_fmt(d)}" for lv, d in fv.degrees.items())
            lines.append(f"    {name} = {c.inputs[name]:g} -> {{{degrees}}}")
        lines.append("  fired rules (min)")
        for f in c.fired:
            lines.append(f"    {f.rule.id}: {f.rule.describe()} @ {_fmt(f.strength)}")
        agg = ", ".join(f"{lv}={_fmt(s)}" for lv, s in c.aggregate.strengths.items() if s > 0)
        lines.append(f"  aggregate (max): {{{agg}}}")
        lines.append(f"  centroid score: {_fmt(c.score)}")
    terms = " + ".join(f"{_fmt(result.weights[c.name])}*{_fmt(c.score)}"
                       for c in result.characteristics)
    lines.append(f"maintainability: {terms} = {_fmt(result.maintainability)}")
    verdict = "needs refactoring" if result.needs_refactoring else "ok"
    op = "<=" if result.needs_refactoring else ">"
    lines.append(f"threshold: {_fmt(result.maintainability)} {op} {_fmt(result.threshold)} -> {verdict}")
    return "\n".join(lines) + "\n"


def flagged(results: Iterable[AssessmentResult]) -> list[str]:
    return [r.service for r in results if r.needs_refactoring]
