"""Fuzzy-logic maintainability scoring for microservices."""

from .calibration import (
    CalibrationReport,
    ReferenceCorpus,
    calibrate_metric,
    calibrate_model,
    quartiles,
)
from .dataio import (
    default_config,
    derive_sc,
    export_results,
    load_config,
    parse_labels,
    parse_metrics,
    save_config,
)
from .fuzzy import (
    AggregatedOutput,
    FuzzyValue,
    LinguisticVariable,
    MembershipFunction,
    Rule,
    RuleBase,
    defuzzify_centroid,
    defuzzify_numeric_oracle,
    eval_membership,
    fuzzify,
    infer,
    rule_strength,
)
from .model import (
    AssessmentResult,
    CharacteristicSpec,
    MetricSpec,
    ModelConfig,
    ServiceMetrics,
    assess_characteristic,
    assess_portfolio,
    assess_service,
    explain,
)
from .validation import (
    ConfusionMatrix,
    classification_metrics,
    confusion_low,
    group_stats,
    majority_decision,
)

__version__ = "0.1.0"
