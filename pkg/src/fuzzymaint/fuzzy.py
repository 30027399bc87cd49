"""Piecewise-linear fuzzy sets and Mamdani max-min inference.

Everything here is immutable and side-effect free. Membership functions are
trapezoids (triangles are stored as trapezoids with a single-point plateau),
inference clips with ``min`` and aggregates with ``max``, and the crisp output
is the centroid of the clipped envelope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    EmptyAggregate,
    InvariantViolation,
    NegativeMetricValue,
    NoRuleFired,
    NonFiniteInput,
    UnknownLevel,
    UnknownVariable,
)

TRAPEZOID = "trapezoid"
TRIANGLE = "triangle"

DEFAULT_LEVELS = ("LOW", "MED", "HIGH")


@dataclass(frozen=True)
class MembershipFunction:
    """A trapezoid ``(a, b, c, d)`` or a triangle ``(a, b, c)``."""

    shape: str
    points: tuple[float, ...]

    def __post_init__(self):
        expected = {TRAPEZOID: 4, TRIANGLE: 3}.get(self.shape)
        if expected is None:
            raise InvariantViolation(f"unknown membership shape {self.shape!r}")
        pts = tuple(float(p) for p in self.points)
        if len(pts) != expected:
            raise InvariantViolation(
                f"{self.shape} needs {expected} breakpoints, got {len(pts)}")
        if not all(math.isfinite(p) for p in pts):
            raise InvariantViolation(f"non-finite breakpoint in {pts}")
        if any(p > q for p, q in zip(pts, pts[1:])):
            raise InvariantViolation(f"breakpoints must be non-decreasing: {pts}")
        object.__setattr__(self, "points", pts)

    @classmethod
    def trapezoid(cls, a, b, c, d) -> "MembershipFunction":
        return cls(TRAPEZOID, (a, b, c, d))

    @classmethod
    def triangle(cls, a, b, c) -> "MembershipFunction":
        return cls(TRIANGLE, (a, b, c))

    @property
    def corners(self) -> tuple[float, float, float, float]:
        """The ``(a, b, c, d)`` form; a triangle repeats its peak."""
        p = self.points
        return p if self.shape == TRAPEZOID else (p[0], p[1], p[1], p[2])

    def __call__(self, x: float) -> float:
        return eval_membership(self, x)


def _membership(corners, x, upper=None):
    # Shared by the float path and the exact (Fraction) centroid path.
    a, b, c, d = corners
    if upper is not None and c == d == upper and x >= c:
        return 1
    if x < a or x >= d:
        # x == d is 0 on a sloped edge and, by convention, on a vertical one
        return 0
    if x < b:
        return (x - a) / (b - a)
    if x <= c:
        return 1
    return (d - x) / (d - c)


def eval_membership(mf: MembershipFunction, x: float, upper: float | None = None) -> float:
    """Membership degree of ``x``.

    Vertical edges belong to the set on their right: a set whose rising edge
    is vertical at ``a`` includes ``a``, one whose falling edge is vertical
    at ``d`` excludes ``d``. ``upper`` marks the universe's upper bound; a set
    whose plateau runs into it (``c == d == upper``) is a right shoulder and
    keeps degree 1 at and beyond it.
    """
    x = float(x)
    if not math.isfinite(x):
        raise NonFiniteInput(f"membership evaluated at non-finite x={x!r}")
    return float(_membership(mf.corners, x, upper))


@dataclass(frozen=True)
class LinguisticVariable:
    name: str
    universe: tuple[float, float]
    levels: tuple[tuple[str, MembershipFunction], ...]

    def __post_init__(self):
        lo, hi = (float(u) for u in self.universe)
        object.__setattr__(self, "universe", (lo, hi))
        if not lo < hi:
            raise InvariantViolation(f"{self.name}: universe needs lo < hi, got {self.universe}")
        levels = tuple((str(n), mf) for n, mf in (
            self.levels.items() if isinstance(self.levels, Mapping) else self.levels))
        object.__setattr__(self, "levels", levels)
        names = [n for n, _ in levels]
        if not names:
            raise InvariantViolation(f"{self.name}: at least one level is required")
        if len(set(names)) != len(names):
            raise InvariantViolation(f"{self.name}: duplicate level names {names}")
        for n, mf in levels:
            if mf.points[0] < lo or mf.points[-1] > hi:
                raise InvariantViolation(
                    f"{self.name}.{n}: breakpoints {mf.points} outside universe {self.universe}")

    @property
    def level_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.levels)

    def __getitem__(self, level: str) -> MembershipFunction:
        for n, mf in self.levels:
            if n == level:
                return mf
        raise UnknownLevel(f"variable {self.name!r} has no level {level!r}")

    def degree(self, level: str, x: float) -> float:
        """Membership of ``x`` in ``level`` with universe clamping applied."""
        mf = self[level]
        lo, hi = self.universe
        return eval_membership(mf, min(x, hi), upper=hi if level == self.level_names[-1] else None)

    @classmethod
    def standard(cls, name: str, l3: float, l4: float, m3: float, maximum: float,
                 names: Sequence[str] = DEFAULT_LEVELS) -> "LinguisticVariable":
        """LOW/MED/HIGH partition with shared breakpoints ``L3=M1, L4=M2=H1, M3=H2``."""
        low, med, high = names
        return cls(name, (0.0, maximum), (
            (low, MembershipFunction.trapezoid(0, 0, l3, l4)),
            (med, MembershipFunction.triangle(l3, l4, m3)),
            (high, MembershipFunction.trapezoid(l4, m3, maximum, maximum)),
        ))


@dataclass(frozen=True)
class FuzzyValue:
    degrees: dict[str, float]

    def __getitem__(self, level: str) -> float:
        try:
            return self.degrees[level]
        except KeyError:
            raise UnknownLevel(f"no degree for level {level!r}") from None

    def total(self) -> float:
        return math.fsum(self.degrees.values())


def fuzzify(var: LinguisticVariable, x: float) -> FuzzyValue:
    x = float(x)
    if not math.isfinite(x):
        raise NonFiniteInput(f"{var.name}: non-finite value {x!r}")
    if x < 0:
        raise NegativeMetricValue(f"{var.name}: negative value {x}")
    return FuzzyValue({level: var.degree(level, x) for level in var.level_names})


@dataclass(frozen=True)
class Rule:
    antecedent: tuple[tuple[str, str], ...]
    consequent: str
    id: str = ""

    def __post_init__(self):
        ante = tuple((str(v), str(lv)) for v, lv in self.antecedent)
        object.__setattr__(self, "antecedent", ante)
        names = [v for v, _ in ante]
        if len(set(names)) != len(names):
            raise InvariantViolation(f"rule {self.id or ante}: repeated variable in antecedent")

    @property
    def levels(self) -> tuple[str, ...]:
        return tuple(lv for _, lv in self.antecedent)

    def describe(self) -> str:
        return f"({','.join(self.levels)})->{self.consequent}"


@dataclass(frozen=True)
class RuleBase:
    inputs: tuple[str, ...]
    rules: tuple[Rule, ...]
    output_levels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "output_levels", tuple(self.output_levels))
        seen = {}
        for rule in self.rules:
            label = rule.id or rule.describe()
            if tuple(v for v, _ in rule.antecedent) != self.inputs:
                raise InvariantViolation(
                    f"rule {label}: antecedent must cover {list(self.inputs)} in order")
            if rule.consequent not in self.output_levels:
                raise UnknownLevel(f"rule {label}: unknown consequent {rule.consequent!r}")
            if rule.levels in seen:
                raise InvariantViolation(
                    f"rules {seen[rule.levels]} and {label} share antecedent {rule.levels}")
            seen[rule.levels] = label

    @classmethod
    def from_table(cls, inputs: Sequence[str], table: Sequence[tuple[Sequence[str], str]],
                   output_levels: Sequence[str] = DEFAULT_LEVELS, prefix: str = "R") -> "RuleBase":
        rules = tuple(
            Rule(tuple(zip(inputs, levels)), out, f"{prefix}{i}")
            for i, (levels, out) in enumerate(table, start=1))
        return cls(tuple(inputs), rules, tuple(output_levels))

    def missing_cells(self, levels: Mapping[str, Sequence[str]]) -> list[tuple[str, ...]]:
        """Antecedent tuples with no rule, given each input's level names."""
        from itertools import product
        have = {r.levels for r in self.rules}
        return [cell for cell in product(*(levels[v] for v in self.inputs)) if cell not in have]


@dataclass(frozen=True)
class FiredRule:
    rule: Rule
    strength: float


@dataclass(frozen=True)
class AggregatedOutput:
    strengths: dict[str, float]
    fired: tuple[FiredRule, ...] = field(default=())


def rule_strength(rule: Rule, inputs: Mapping[str, FuzzyValue]) -> float:
    degrees = []
    for var, level in rule.antecedent:
        if var not in inputs:
            raise UnknownVariable(f"rule {rule.id}: no input for variable {var!r}")
        degrees.append(inputs[var][level])
    return min(degrees)


def infer(rb: RuleBase, inputs: Mapping[str, FuzzyValue]) -> AggregatedOutput:
    missing = [v for v in rb.inputs if v not in inputs]
    if missing:
        raise UnknownVariable(f"missing inputs {missing}")
    strengths = dict.fromkeys(rb.output_levels, 0.0)
    fired = []
    for rule in rb.rules:
        s = rule_strength(rule, inputs)
        if s > 0:
            fired.append(FiredRule(rule, s))
            strengths[rule.consequent] = max(strengths[rule.consequent], s)
    if not fired:
        raise NoRuleFired(f"no rule fired over inputs {list(rb.inputs)}; the rule table is incomplete")
    return AggregatedOutput(strengths, tuple(fired))


def _active(agg: AggregatedOutput, out_var: LinguisticVariable):
    active = [(lv, s) for lv, s in agg.strengths.items() if s > 0]
    if not active:
        raise EmptyAggregate(f"{out_var.name}: every aggregated strength is zero")
    return [(out_var[lv], s) for lv, s in active]


def _clip_points(corners, s):
    a, b, c, d = corners
    pts = [a, b, c, d]
    if b > a:
        pts.append(a + s * (b - a))
    if d > c:
        pts.append(d - s * (d - c))
    return pts


def defuzzify_centroid(agg: AggregatedOutput, out_var: LinguisticVariable) -> float:
    """Centroid of ``max_l min(s_l, mu_l(x))`` by exact piecewise integration.

    The universe is split at every breakpoint, every clip point and every
    crossing of two clipped sets, so the envelope is linear on each piece.
    Arithmetic is rational, which makes symmetric cases land exactly on
    their axis.
    """
    sets = [(tuple(Fraction(p) for p in mf.corners), Fraction(s))
            for mf, s in _active(agg, out_var)]
    lo, hi = (Fraction(u) for u in out_var.universe)

    cuts = {lo, hi}
    for corners, s in sets:
        cuts.update(p for p in _clip_points(corners, s) if lo <= p <= hi)
    cuts = sorted(cuts)

    def clipped(corners, s, x):
        return min(s, Fraction(_membership(corners, x)))

    area = Fraction(0)
    moment = Fraction(0)
    for x0, x1 in zip(cuts, cuts[1:]):
        h = x1 - x0
        t1, t2 = x0 + h / 3, x0 + 2 * h / 3
        # each clipped set is linear on (x0, x1); recover its end values
        lines = []
        for corners, s in sets:
            v1, v2 = clipped(corners, s, t1), clipped(corners, s, t2)
            slope = (v2 - v1) / (t2 - t1)
            lines.append((v1 - slope * (t1 - x0), slope))
        knots = {x0, x1}
        for (p0, m0), (q0, n0) in combinations(lines, 2):
            if m0 != n0:
                t = x0 + (q0 - p0) / (m0 - n0)
                if x0 < t < x1:
                    knots.add(t)
        knots = sorted(knots)
        for u0, u1 in zip(knots, knots[1:]):
            y0 = max(v + m * (u0 - x0) for v, m in lines)
            y1 = max(v + m * (u1 - x0) for v, m in lines)
            w = u1 - u0
            area += w * (y0 + y1) / 2
            moment += w * (u0 * (2 * y0 + y1) + u1 * (y0 + 2 * y1)) / 6
    if area == 0:
        raise EmptyAggregate(f"{out_var.name}: aggregated set has zero area")
    return float(moment / area)


def _membership_grid(corners, x: np.ndarray) -> np.ndarray:
    a, b, c, d = corners
    y = np.zeros_like(x)
    y[(x >= b) & (x <= c)] = 1.0
    if b > a:
        m = (x > a) & (x < b)
        y[m] = (x[m] - a) / (b - a)
    if d > c:
        m = (x > c) & (x < d)
        y[m] = (d - x[m]) / (d - c)
    return y


def defuzzify_numeric_oracle(agg: AggregatedOutput, out_var: LinguisticVariable,
                             step: float = 0.001) -> float:
    """Riemann-sum centroid sampled every ``step`` across the universe."""
    if not step > 0:
        raise InvariantViolation(f"step must be positive, got {step}")
    sets = _active(agg, out_var)
    lo, hi = out_var.universe
    x = lo + step * np.arange(int(math.floor((hi - lo) / step + 1e-9)) + 1)
    mu = np.zeros_like(x)
    for mf, s in sets:
        np.maximum(mu, np.minimum(s, _membership_grid(mf.corners, x)), out=mu)
    total = mu.sum()
    if total == 0:
        raise EmptyAggregate(f"{out_var.name}: aggregated set has zero area")
    return float((x * mu).sum() / total)
