"""File formats: metrics and label CSVs, model config documents, result export."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import re
from importlib import resources
from pathlib import Path
from typing import IO, Iterable, Mapping, Sequence

import jsonschema

from .errors import (
    DuplicateServiceName,
    InvariantViolation,
    NegativeMetricValue,
    ParseError,
    SchemaError,
    ZeroTotalServices,
)
from .fuzzy import LinguisticVariable, MembershipFunction, Rule, RuleBase
from .model import AssessmentResult, CharacteristicSpec, MetricSpec, ModelConfig, ServiceMetrics

CONFIG_ENV = "FUZZYMAINT_CONFIG"
PROFILES = ("default", "alt-outputs")
LABELS = ("L", "M", "H")

# lower-case CSV header -> canonical metric name
CANONICAL = {"pc": "PC", "ac": "AC", "nom": "NoM", "sc": "SC"}

_levels_schema = {
    "type": "array",
    "minItems": 1,
    "items": {
        "type": "object",
        "additionalProperties": False,
        "required": ["name", "shape", "points"],
        "properties": {
            "name": {"type": "string", "minLength": 1},
            "shape": {"enum": ["trapezoid", "triangle"]},
            "points": {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 4},
        },
    },
}
_universe_schema = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["metrics", "characteristics", "weights", "threshold"],
    "properties": {
        "metrics": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["name", "universe", "levels"],
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "unit": {"type": "string"},
                    "universe": _universe_schema,
                    "levels": _levels_schema,
                },
            },
        },
        "characteristics": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["name", "inputs", "rules", "output"],
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "inputs": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                    "rules": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                    "output": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["universe", "levels"],
                        "properties": {"universe": _universe_schema, "levels": _levels_schema},
                    },
                },
            },
        },
        "weights": {"type": "object", "additionalProperties": {"type": "number"}},
        "threshold": {"type": "number"},
    },
}

_RULE_RE = re.compile(r"^\s*(?:(?P<id>[\w.-]+)\s*:)?\s*\[?(?P<ante>[^\]>]*?)\]?\s*->\s*(?P<out>\w+)\s*$")


def _json_path(parts: Iterable) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def parse_rule(text: str, inputs: Sequence[str], default_id: str) -> Rule:
    """Parse ``"RM1: [LOW, HIGH] -> MED"``; the id and brackets are optional."""
    m = _RULE_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse rule {text!r}; expected '[LEVEL, ...] -> LEVEL'")
    levels = [t for t in re.split(r"[\s,]+", m["ante"].strip()) if t]
    if len(levels) != len(inputs):
        raise ValueError(f"rule {text!r} has {len(levels)} levels for {len(inputs)} inputs")
    return Rule(tuple(zip(inputs, levels)), m["out"], m["id"] or default_id)


def format_rule(rule: Rule) -> str:
    body = f"[{', '.join(rule.levels)}] -> {rule.consequent}"
    return f"{rule.id}: {body}" if rule.id else body


def _variable_from_doc(name, doc) -> LinguisticVariable:
    return LinguisticVariable(name, tuple(doc["universe"]), tuple(
        (lv["name"], MembershipFunction(lv["shape"], tuple(lv["points"]))) for lv in doc["levels"]))


def _variable_to_doc(var: LinguisticVariable) -> dict:
    return {
        "universe": list(var.universe),
        "levels": [{"name": n, "shape": mf.shape, "points": list(mf.points)} for n, mf in var.levels],
    }


def config_from_dict(doc: Mapping) -> ModelConfig:
    errors = sorted(jsonschema.Draft7Validator(CONFIG_SCHEMA).iter_errors(doc),
                    key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        err = errors[0]
        raise SchemaError(err.message, _json_path(err.absolute_path))

    def at(path, fn, *args):
        try:
            return fn(*args)
        except InvariantViolation as exc:
            raise InvariantViolation(f"{path}: {exc}") from None
        except (ValueError, KeyError) as exc:
            raise SchemaError(str(exc), path) from None

    metrics = tuple(
        at(f"$.metrics[{i}]", lambda m=m: MetricSpec(
            m["name"], m.get("unit", ""), _variable_from_doc(m["name"], m)))
        for i, m in enumerate(doc["metrics"]))

    chars = []
    for i, c in enumerate(doc["characteristics"]):
        path = f"$.characteristics[{i}]"
        inputs = tuple(c["inputs"])
        rules = tuple(
            at(f"{path}.rules[{j}]", parse_rule, text, inputs, f"R{j + 1}")
            for j, text in enumerate(c["rules"]))
        output = at(f"{path}.output", _variable_from_doc, c["name"], c["output"])
        rb = at(f"{path}.rules", RuleBase, inputs, rules, output.level_names)
        chars.append(at(path, CharacteristicSpec, c["name"], inputs, rb, output))

    return at("$", ModelConfig, metrics, tuple(chars), dict(doc["weights"]), doc["threshold"])


def config_to_dict(cfg: ModelConfig) -> dict:
    return {
        "metrics": [{"name": m.name, "unit": m.unit, **_variable_to_doc(m.variable)}
                    for m in cfg.metrics],
        "characteristics": [{
            "name": c.name,
            "inputs": list(c.inputs),
            "rules": [format_rule(r) for r in c.rulebase.rules],
            "output": _variable_to_doc(c.output),
        } for c in cfg.characteristics],
        "weights": dict(cfg.weights),
        "threshold": cfg.threshold,
    }


def load_config(source: str | os.PathLike | Mapping) -> ModelConfig:
    if isinstance(source, Mapping):
        return config_from_dict(source)
    path = Path(source)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, path=str(path), line=exc.lineno) from None
    try:
        return config_from_dict(doc)
    except SchemaError as exc:
        raise SchemaError(str(exc), f"{path}") from None


def save_config(cfg: ModelConfig, path: str | os.PathLike | None = None) -> str:
    text = json.dumps(config_to_dict(cfg), indent=2) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def profile_path(name: str = "default"):
    if name not in PROFILES:
        raise SchemaError(f"unknown profile {name!r}; choose from {', '.join(PROFILES)}", "profile")
    return resources.files("fuzzymaint") / "data" / f"{name}.json"


def default_config(profile: str = "default") -> ModelConfig:
    return config_from_dict(json.loads(profile_path(profile).read_text(encoding="utf-8")))


def resolve_config(path: str | os.PathLike | None = None, profile: str | None = None) -> ModelConfig:
    """Explicit path, else a named profile, else ``$FUZZYMAINT_CONFIG``, else the default."""
    if path is not None:
        return load_config(path)
    if profile is not None:
        return default_config(profile)
    env = os.environ.get(CONFIG_ENV)
    return load_config(env) if env else default_config()


def sample_path(name: str):
    """Bundled Train Ticket data: ``trainticket.csv`` or ``trainticket_labels.csv``."""
    return resources.files("fuzzymaint") / "data" / name


def derive_sc(calls: int, total_services: int) -> float:
    """Service call ratio: outgoing calls over the project's service count."""
    if total_services < 1:
        raise ZeroTotalServices(f"total service count must be >= 1, got {total_services}")
    if calls < 0:
        raise NegativeMetricValue(f"call count must be >= 0, got {calls}")
    return calls / total_services


def _number(text: str, *, path, line, column) -> float:
    # period decimal separator only; no locale handling
    if not re.fullmatch(r"\s*[-+]?(\d+(\.\d*)?|\.\d+)([eE][-+]?\d+)?\s*", text or ""):
        raise ParseError(f"not a number: {text!r}", path=path, line=line, column=column)
    value = float(text)
    if value < 0:
        raise NegativeMetricValue(
            f"{path or '<stream>'}, line {line}, column {column!r}: negative value {value}")
    return value


def _open_text(source) -> tuple[IO[str], str | None, bool]:
    if isinstance(source, (str, os.PathLike)):
        return open(source, encoding="utf-8", newline=""), str(source), True
    return source, getattr(source, "name", None), False


def parse_metrics(source, total_services: int | None = None) -> list[ServiceMetrics]:
    """Read a metrics CSV (or JSON document) into ``ServiceMetrics`` rows.

    CSV header is ``service,<metric>,...``. A ``calls`` column replaces ``sc``
    and requires a ``#total_services=N`` directive (or the ``total_services``
    argument).
    """
    fh, path, owned = _open_text(source)
    try:
        text = fh.read()
    finally:
        if owned:
            fh.close()
    if (path and path.endswith(".json")) or text.lstrip().startswith(("{", "[")):
        return _metrics_from_json(text, path, total_services)

    directives = {}
    body = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped.startswith("#"):
            m = re.fullmatch(r"#\s*(\w+)\s*=\s*(.+)", stripped)
            if m:
                directives[m[1].lower()] = (m[2].strip(), lineno)
            continue
        if stripped:
            body.append((lineno, raw))
    if not body:
        raise ParseError("missing header row", path=path, line=1)

    if "total_services" in directives and total_services is None:
        value, lineno = directives["total_services"]
        if not value.isdigit():
            raise ParseError(f"total_services must be an integer, got {value!r}", path=path, line=lineno)
        total_services = int(value)

    rows = csv.reader([raw for _, raw in body])
    header = [h.strip() for h in next(rows)]
    header_line = body[0][0]
    if not header or header[0].lower() != "service":
        raise ParseError("first column must be 'service'", path=path, line=header_line)
    columns = [CANONICAL.get(h.lower(), h) for h in header[1:]]
    if len(set(columns)) != len(columns):
        raise ParseError(f"duplicate columns in header {header}", path=path, line=header_line)
    has_calls = "calls" in columns
    if has_calls and "SC" in columns:
        raise ParseError("give either 'sc' or 'calls', not both", path=path, line=header_line)
    if has_calls and total_services is None:
        raise ParseError("'calls' column needs a '#total_services=N' directive", path=path, line=header_line)

    out, seen = [], {}
    for (lineno, _), row in zip(body[1:], rows):
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", path=path, line=lineno)
        name = row[0].strip()
        if not name:
            raise ParseError("empty service name", path=path, line=lineno, column="service")
        if name in seen:
            raise DuplicateServiceName(
                f"{path or '<stream>'}, line {lineno}: service {name!r} already defined on line {seen[name]}")
        seen[name] = lineno
        values = {col: _number(cell, path=path, line=lineno, column=h)
                  for col, cell, h in zip(columns, row[1:], header[1:])}
        if has_calls:
            calls = values.pop("calls")
            if calls != int(calls):
                raise ParseError(f"call count must be an integer, got {calls}",
                                 path=path, line=lineno, column="calls")
            values["SC"] = derive_sc(int(calls), total_services)
        out.append(ServiceMetrics(name, values))
    return out


def _metrics_from_json(text, path, total_services):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, path=path, line=exc.lineno) from None
    if isinstance(doc, list):
        doc = {"services": doc}
    if not isinstance(doc, dict) or not isinstance(doc.get("services"), list):
        raise SchemaError("expected an object with a 'services' list", path or "$")
    if total_services is None:
        total_services = doc.get("total_services")

    out, seen = [], set()
    for i, rec in enumerate(doc["services"]):
        where = f"{path or '<stream>'}: $.services[{i}]"
        if not isinstance(rec, dict) or not isinstance(rec.get("service"), str):
            raise SchemaError("entry needs a string 'service' field", where)
        name = rec["service"]
        if name in seen:
            raise DuplicateServiceName(f"{where}: service {name!r} already defined")
        seen.add(name)
        values = {}
        for key, v in rec.items():
            if key == "service":
                continue
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise SchemaError(f"{key}: not a number: {v!r}", where)
            if v < 0:
                raise NegativeMetricValue(f"{where}, field {key!r}: negative value {v}")
            values[CANONICAL.get(key.lower(), key)] = float(v)
        if "calls" in values:
            if "SC" in values:
                raise SchemaError("give either 'sc' or 'calls', not both", where)
            if total_services is None:
                raise SchemaError("'calls' needs a top-level 'total_services'", where)
            values["SC"] = derive_sc(int(values.pop("calls")), int(total_services))
        out.append(ServiceMetrics(name, values))
    return out


def parse_labels(source) -> dict[str, tuple[str, ...]]:
    """Evaluator labels: header ``service,e1,...,en``, values in {L, M, H}."""
    fh, path, owned = _open_text(source)
    try:
        lines = [(i, raw) for i, raw in enumerate(fh.read().splitlines(), start=1)
                 if raw.strip() and not raw.lstrip().startswith("#")]
    finally:
        if owned:
            fh.close()
    if not lines:
        raise ParseError("missing header row", path=path, line=1)
    rows = csv.reader([raw for _, raw in lines])
    header = [h.strip() for h in next(rows)]
    if header[0].lower() != "service" or len(header) < 2:
        raise ParseError("header must be 'service,e1,...'", path=path, line=lines[0][0])
    out = {}
    for (lineno, _), row in zip(lines[1:], rows):
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", path=path, line=lineno)
        name = row[0].strip()
        if name in out:
            raise DuplicateServiceName(f"{path or '<stream>'}, line {lineno}: duplicate service {name!r}")
        labels = []
        for h, cell in zip(header[1:], row[1:]):
            v = cell.strip().upper()
            if v not in LABELS:
                raise ParseError(f"label must be one of L, M, H, got {cell!r}",
                                 path=path, line=lineno, column=h)
            labels.append(v)
        out[name] = tuple(labels)
    return out


def _flag(r: AssessmentResult) -> str:
    return "true" if r.needs_refactoring else "false"


def _result_to_json(r: AssessmentResult, trace: bool) -> dict:
    doc = {
        "service": r.service,
        "scores": r.scores,
        "maintainability": r.maintainability,
        "needs_refactoring": r.needs_refactoring,
    }
    if trace:
        doc["trace"] = {
            c.name: {
                "inputs": c.inputs,
                "fuzzified": {k: fv.degrees for k, fv in c.fuzzified.items()},
                "fired": [{"rule": f.rule.id, "antecedent": list(f.rule.levels),
                           "consequent": f.rule.consequent, "strength": f.strength}
                          for f in c.fired],
                "aggregate": c.aggregate.strengths,
            } for c in r.characteristics}
    return doc


def export_results(results: Sequence[AssessmentResult], fmt: str = "table",
                   trace: bool = False) -> str:
    if not results:
        raise ValueError("no results to export")
    chars = [c.name for c in results[0].characteristics]
    if fmt == "json":
        return json.dumps([_result_to_json(r, trace) for r in results], indent=2) + "\n"

    header = ["service", *chars, "maintainability", "flag"]
    rows = [[r.service, *(f"{r.score(c):.2f}" for c in chars), f"{r.maintainability:.2f}", _flag(r)]
            for r in results]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return buf.getvalue()
    if fmt == "table":
        widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
        def line(cells):
            first, *rest = cells
            return "  ".join([first.ljust(widths[0]), *(c.rjust(w) for c, w in zip(rest, widths[1:]))]).rstrip()
        sep = "  ".join("-" * w for w in widths)
        return "\n".join([line(header), sep, *map(line, rows)]) + "\n"
    raise ValueError(f"unknown format {fmt!r}; choose table, csv or json")


def results_from_json(text: str) -> list[dict]:
    """Inverse of the json export, as plain dicts."""
    return json.loads(text)

