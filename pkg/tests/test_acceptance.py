"""Acceptance criteria 1-12.

Each test records its outcome in ``conftest.ACCEPTANCE``; the terminal summary
prints one PASS/FAIL line per criterion. Thresholds are fixed here and never
loosened to make a criterion pass.
"""

import itertools
import math
import random

import numpy as np

from conftest import ACCEPTANCE
from fuzzymaint.calibration import derive_parameters, quartiles
from fuzzymaint.fuzzy import (
    AggregatedOutput,
    FuzzyValue,
    LinguisticVariable,
    MembershipFunction,
    Rule,
    RuleBase,
    defuzzify_centroid,
    defuzzify_numeric_oracle,
    fuzzify,
    infer,
    rule_strength,
)
from fuzzymaint.model import ServiceMetrics, assess_characteristic, assess_portfolio
from fuzzymaint.validation import (
    ConfusionMatrix,
    classification_metrics,
    confusion_low,
    group_stats,
    majority_decision,
    percent,
)

PUBLISHED_FLAGS = {"M9", "M14", "M15", "M16", "M21", "M22", "M24", "M27", "M36"}
PUBLISHED_GROUP_MEANS = {"L": 29.87, "M": 53.22, "H": 65.35}


def record(n, title, ok, detail=""):
    ACCEPTANCE[n] = (title, bool(ok), detail)
    assert ok, f"criterion {n} ({title}) failed: {detail}"


def services(rows):
    return [ServiceMetrics(r["service"], {"PC": float(r["pc"]), "AC": float(r["ac"]),
                                          "NoM": float(r["nom"]), "SC": float(r["sc"])})
            for r in rows]


def test_01_fuzzification_exactness(cfg):
    pc, ac = cfg.metric("PC").variable, cfg.metric("AC").variable
    cases = [
        (pc, 21.8, {"LOW": 0.5, "MED": 0.5, "HIGH": 0.0}),
        (pc, 19.4, {"LOW": 1.0, "MED": 0.0, "HIGH": 0.0}),
        (ac, 6.53, {"LOW": 0.0, "MED": 0.0, "HIGH": 1.0}),
    ]
    worst = max(abs(fuzzify(var, x)[k] - v) for var, x, want in cases for k, v in want.items())
    record(1, "fuzzification exactness", worst <= 1e-9, f"max error {worst:.2e}")


def test_02_partition_property():
    rng = random.Random(2)
    worst = 0.0
    for _ in range(1000):
        top = rng.uniform(0.1, 1000)
        l3, l4, m3 = sorted(rng.uniform(0, top) for _ in range(3))
        if rng.random() < 0.1:
            l4 = l3  # degenerate edges must still partition
        var = LinguisticVariable.standard("X", l3, l4, m3, top)
        x = rng.choice([rng.uniform(0, top), l3, l4, m3, top])
        worst = max(worst, abs(fuzzify(var, x).total() - 1))
    record(2, "partition of unity", worst <= 1e-9, f"1000 variables, max |sum-1| {worst:.2e}")


def test_03_mamdani_arithmetic():
    a = FuzzyValue({"LOW": 0.8, "MED": 0.2, "HIGH": 0.0})
    b = FuzzyValue({"LOW": 0.4, "MED": 0.6, "HIGH": 0.0})
    c = FuzzyValue({"LOW": 0.0, "MED": 1.0, "HIGH": 0.0})
    r1 = Rule((("A", "MED"), ("B", "LOW")), "LOW", "R1")
    r2 = Rule((("A", "LOW"), ("B", "LOW")), "LOW", "R2")
    s1 = rule_strength(r1, {"A": a, "B": b})
    s2 = rule_strength(r2, {"A": a, "B": b})
    rb = RuleBase(("A", "C"), (
        Rule((("A", "LOW"), ("C", "MED")), "LOW", "X1"),
        Rule((("A", "MED"), ("C", "MED")), "LOW", "X2"),
    ), ("LOW", "MED", "HIGH"))
    agg = infer(rb, {"A": a, "C": c})
    ok = s1 == 0.2 and s2 == 0.4 and agg.strengths == {"LOW": 0.8, "MED": 0.0, "HIGH": 0.0}
    record(3, "Mamdani min/max arithmetic", ok, f"strengths {s1}, {s2}; aggregate {agg.strengths}")


def _random_output(rng):
    # ordered LOW/MED/HIGH partition of [0, 100] with random breakpoints
    p = sorted(rng.uniform(0, 100) for _ in range(4))
    return LinguisticVariable("out", (0, 100), (
        ("LOW", MembershipFunction.trapezoid(0, 0, p[0], p[1])),
        ("MED", MembershipFunction.trapezoid(p[0], p[1], p[2], p[3])),
        ("HIGH", MembershipFunction.trapezoid(p[2], p[3], 100, 100)),
    ))


def test_04_centroid_oracle(cfg):
    rng = random.Random(4)
    shipped = [c.output for c in cfg.characteristics]
    worst = 0.0
    for i in range(1000):
        out = shipped[i % 2] if i < 500 else _random_output(rng)
        strengths = {lv: rng.choice([0.0, rng.random(), 1.0]) for lv in out.level_names}
        if not any(strengths.values()):
            strengths["MED"] = rng.uniform(0.01, 1)
        agg = AggregatedOutput(strengths)
        worst = max(worst, abs(defuzzify_centroid(agg, out) - defuzzify_numeric_oracle(agg, out, 0.001)))
    peaks_exact = True
    for _ in range(200):
        half, peak = rng.uniform(0.5, 40), rng.uniform(41, 59)
        out = LinguisticVariable("sym", (0, 100), (
            ("MED", MembershipFunction.triangle(peak - half, peak, peak + half)),))
        peaks_exact &= defuzzify_centroid(AggregatedOutput({"MED": rng.uniform(0.01, 1)}), out) == peak
    ok = worst <= 0.01 and peaks_exact
    record(4, "centroid vs numeric oracle", ok,
           f"1000 aggregates, max |diff| {worst:.2e}; symmetric peaks exact: {peaks_exact}")


def test_05_weighted_sum_matches_printed(ref_scores):
    bad = []
    for r in ref_scores:
        mnt = 0.5 * float(r["modifiability"]) + 0.5 * float(r["testability"])
        # printed value must be a valid 2-dp rounding of the weighted sum
        if abs(mnt - float(r["maintainability"])) > 0.005 + 1e-9:
            bad.append(f"{r['id']}: 0.5*{r['modifiability']}+0.5*{r['testability']}={mnt:.3f}"
                       f" vs printed {r['maintainability']}")
    record(5, "weighted sum reproduces printed maintainability", not bad,
           f"{36 - len(bad)}/36 rows" + (f"; {'; '.join(bad)}" if bad else ""))


def test_06_pipeline_reproduction(cfg, ref_scores):
    results = assess_portfolio(cfg, services(ref_scores))
    devs = []
    for r, row in zip(results, ref_scores):
        devs += [abs(r.score("modifiability") - float(row["modifiability"])),
                 abs(r.score("testability") - float(row["testability"])),
                 abs(r.maintainability - float(row["maintainability"]))]
    mad, worst = sum(devs) / len(devs), max(devs)
    record(6, "pipeline reproduction", mad <= 1.5 and worst <= 3.5,
           f"MAD {mad:.2f} (<=1.5), max {worst:.2f} (<=3.5) over {len(devs)} scores")


def test_07_flag_set(cfg, ref_scores):
    results = assess_portfolio(cfg, services(ref_scores))
    ours = {row["id"] for row, r in zip(ref_scores, results) if r.needs_refactoring}
    score = {row["id"]: r.maintainability for row, r in zip(ref_scores, results)}
    diff = ours ^ PUBLISHED_FLAGS
    ok = len(diff) <= 1 and all(abs(score[k] - 40) <= 3 for k in diff)
    detail = f"{len(ours)} flagged, symmetric difference {sorted(diff) or 'none'}; M27 at {score['M27']:.2f}"
    record(7, "flag-set reproduction", ok, detail)


def test_08_validation_arithmetic(ref_labels):
    decided = {r["id"]: r["decision"] for r in ref_labels}
    cm = confusion_low({k: k in PUBLISHED_FLAGS for k in decided}, decided)
    shown = [percent(v) for v in classification_metrics(cm).as_dict().values()]
    ok = cm == ConfusionMatrix(7, 2, 0, 27) and shown == ["100.00%", "77.78%", "87.50%", "94.44%"]
    record(8, "confusion matrix and metrics", ok,
           f"TP={cm.tp} FP={cm.fp} FN={cm.fn} TN={cm.tn}; {' / '.join(shown)}")


def test_09_majority_decisions(ref_labels):
    wrong = [r["id"] for r in ref_labels if majority_decision((r["e1"], r["e2"], r["e3"])) != r["decision"]]
    record(9, "majority decisions", not wrong and len(ref_labels) == 36,
           f"{len(ref_labels) - len(wrong)}/{len(ref_labels)} match")


def test_10_group_means(cfg, ref_scores, ref_labels):
    decided = {r["id"]: r["decision"] for r in ref_labels}
    printed = {r["id"]: float(r["maintainability"]) for r in ref_scores}
    stats = group_stats(printed, decided)
    gaps = {k: stats[k].mean - PUBLISHED_GROUP_MEANS[k] for k in PUBLISHED_GROUP_MEANS}
    model = group_stats({row["id"]: r.maintainability
                         for row, r in zip(ref_scores, assess_portfolio(cfg, services(ref_scores)))}, decided)
    detail = ", ".join(f"{k} {stats[k].mean:.2f} vs {PUBLISHED_GROUP_MEANS[k]} ({gaps[k]:+.2f})"
                       for k in ("L", "M", "H"))
    detail += "; model scores " + ", ".join(f"{k} {model[k].mean:.2f}" for k in ("L", "M", "H"))
    record(10, "per-label mean maintainability", all(abs(g) <= 0.5 for g in gaps.values()), detail)


def _oracle_quantile(xs, p):
    xs = sorted(xs)
    pos = (len(xs) - 1) * p
    lo = math.floor(pos)
    hi = min(lo + 1, len(xs) - 1)
    return xs[lo] + (xs[hi] - xs[lo]) * (pos - lo)


def test_11_calibration_oracle():
    rng = np.random.default_rng(11)
    worst, chain_ok = 0.0, True
    for _ in range(1000):
        n = int(rng.integers(4, 80))
        xs = rng.choice([rng.uniform(0, 100, n), rng.integers(0, 6, n).astype(float)])
        got = quartiles(xs)
        want = [_oracle_quantile(xs.tolist(), p) for p in (0.25, 0.5, 0.75)]
        worst = max(worst, max(abs(g - w) for g, w in zip(got, want)))
        if xs.max() > 0:
            p = derive_parameters(xs).parameters
            chain_ok &= 0 <= p["L3"] <= p["L4"] <= p["M3"] <= p["MAX"]
    record(11, "quantile oracle and parameter chain", worst <= 1e-9 and chain_ok,
           f"1000 arrays, max |diff| {worst:.2e}; chain holds: {chain_ok}")


def _rises(scores):
    return [(i, b - a) for i, (a, b) in enumerate(zip(scores, scores[1:])) if b > a + 1e-9]


def test_12_monotonicity_grid(cfg):
    specs = {m.name: m for m in cfg.metrics}
    mod, tst = cfg.characteristic("modifiability"), cfg.characteristic("testability")
    ac_grid = np.round(np.arange(0, 11.0001, 0.5), 10)
    sc_grid = np.round(np.arange(0, 1.0001, 0.05), 10)
    mod_bad, tst_bad, worst, example = 0, 0, 0.0, ""
    for pc in range(0, 51, 5):
        s = [assess_characteristic(mod, ServiceMetrics("g", {"PC": pc, "AC": ac}), specs).score
             for ac in ac_grid]
        if r := _rises(s):
            mod_bad += 1
            i, d = max(r, key=lambda t: t[1])
            if d > worst:
                worst, example = d, f"PC={pc} AC {ac_grid[i]}->{ac_grid[i + 1]}: {s[i]:.2f}->{s[i + 1]:.2f}"
    lines = 0
    for ac, nom in itertools.product(ac_grid, range(0, 91, 5)):
        lines += 1
        s = [assess_characteristic(tst, ServiceMetrics("g", {"AC": ac, "NoM": nom, "SC": sc}), specs).score
             for sc in sc_grid]
        if r := _rises(s):
            tst_bad += 1
            i, d = max(r, key=lambda t: t[1])
            if d > worst:
                worst, example = d, (f"AC={ac} NoM={nom} SC {sc_grid[i]}->{sc_grid[i + 1]}: "
                                     f"{s[i]:.2f}->{s[i + 1]:.2f}")
    ok = mod_bad == 0 and tst_bad == 0
    detail = f"modifiability rises in {mod_bad}/11 PC lines, testability in {tst_bad}/{lines} (AC,NoM) lines"
    if example:
        detail += f"; largest rise {worst:.2f} at {example}"
    record(12, "monotonicity grid", ok, detail)

