"""Command-line entry point: ``fuzzymaint {assess,explain,validate,calibrate}``.

Exit codes: 0 ok, 1 usage, 2 data/parse error, 3 model error,
4 a validation metric is undefined.
"""

from __future__ import annotations

import logging
import sys
from datetime import datetime, timezone
from pathlib import Path

import click

from . import dataio
from .calibration import ReferenceCorpus, calibrate_model
from .errors import DataError, FuzzyMaintError, InvariantViolation, ModelError, UndefinedMetric
from .model import ModelConfig, assess_portfolio, explain as explain_result

EXIT_USAGE, EXIT_DATA, EXIT_MODEL, EXIT_UNDEFINED = 1, 2, 3, 4

_path = click.Path(exists=True, dir_okay=False, readable=True, path_type=Path)


def _abbreviates(key: str, name: str) -> bool:
    # "mod", "tst" and "testability" all name testability/modifiability
    it = iter(name)
    return bool(key) and key[0] == name[0] and all(ch in it for ch in key)


def _parse_weights(text: str, cfg: ModelConfig) -> dict[str, float]:
    names = [c.name for c in cfg.characteristics]
    out = {}
    for item in filter(None, (t.strip() for t in text.split(","))):
        key, sep, value = item.partition("=")
        if not sep:
            raise click.BadParameter(f"expected name=value, got {item!r}", param_hint="--weights")
        hits = [n for n in names if _abbreviates(key.strip(), n)]
        if len(hits) != 1:
            raise click.BadParameter(
                f"{key!r} must abbreviate exactly one of {names}", param_hint="--weights")
        try:
            out[hits[0]] = float(value)
        except ValueError:
            raise click.BadParameter(f"not a number: {value!r}", param_hint="--weights") from None
    return out


def _load(config, profile, threshold, weights) -> ModelConfig:
    cfg = dataio.resolve_config(config, profile)
    if threshold is not None or weights:
        cfg = cfg.replace(threshold=threshold,
                          weights=_parse_weights(weights, cfg) if weights else None)
    return cfg


def model_options(f):
    f = click.option("--weights", help="Characteristic weights, e.g. mod=0.5,tst=0.5.")(f)
    f = click.option("--threshold", type=float, help="Refactoring threshold T_REF (score points).")(f)
    f = click.option("--profile", type=click.Choice(dataio.PROFILES),
                     help="Use a bundled configuration instead of --config.")(f)
    f = click.option("--config", "config", type=_path,
                     help=f"Model config (JSON). Defaults to ${dataio.CONFIG_ENV} or the bundled default.")(f)
    return f


@click.group()
@click.option("--timestamp", is_flag=True, help="Print a generation timestamp banner first.")
@click.option("-v", "--verbose", is_flag=True, help="Log diagnostics to stderr.")
def main(timestamp: bool, verbose: bool) -> None:
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    if timestamp:
        click.echo(f"# generated {datetime.now(timezone.utc).isoformat(timespec='seconds')}")


@main.command()
@model_options
@click.option("--metrics", required=True, type=_path, help="Service metrics CSV or JSON.")
@click.option("--format", "fmt", type=click.Choice(["table", "csv", "json"]), default="table")
@click.option("--trace", is_flag=True, help="Include the inference trace in json output.")
@click.option("--figures", type=click.Path(file_okay=False, path_type=Path),
              help="Directory for score and membership-function figures.")
def assess(config, profile, threshold, weights, metrics, fmt, trace, figures):
    """Score every service in a metrics file."""
    cfg = _load(config, profile, threshold, weights)
    results = assess_portfolio(cfg, dataio.parse_metrics(metrics))
    click.echo(dataio.export_results(results, fmt, trace=trace), nl=False)
    if figures:
        from .plots import plot_model, plot_scores
        figures.mkdir(parents=True, exist_ok=True)
        for p in (plot_scores(results, figures / "maintainability.png"),
                  plot_model(cfg, figures / "membership.png")):
            click.echo(f"wrote {p}", err=True)


@main.command()
@model_options
@click.option("--metrics", required=True, type=_path)
@click.option("--service", required=True, help="Service name as it appears in the metrics file.")
def explain(config, profile, threshold, weights, metrics, service):
    """Walk one service through fuzzification, inference and defuzzification."""
    cfg = _load(config, profile, threshold, weights)
    rows = [s for s in dataio.parse_metrics(metrics) if s.service == service]
    if not rows:
        raise DataError(f"{metrics}: no service named {service!r}")
    click.echo(explain_result(assess_portfolio(cfg, rows)[0]), nl=False)


@main.command()
@model_options
@click.option("--metrics", required=True, type=_path)
@click.option("--labels", required=True, type=_path, help="Evaluator labels CSV (service,e1,...).")
@click.option("--verbose", "detail", is_flag=True, help="Also print population standard deviations.")
@click.option("--figures", type=click.Path(file_okay=False, path_type=Path))
def validate(config, profile, threshold, weights, metrics, labels, detail, figures):
    """Compare refactoring flags against the evaluators' majority labels."""
    from .validation import classification_metrics, confusion_low, decisions, group_stats, percent

    cfg = _load(config, profile, threshold, weights)
    results = assess_portfolio(cfg, dataio.parse_metrics(metrics))
    decided = decisions(dataio.parse_labels(labels))
    cm = confusion_low({r.service: r.needs_refactoring for r in results}, decided)
    scores = classification_metrics(cm)

    click.echo("confusion matrix (positive = LOW)")
    click.echo(f"  TP={cm.tp} FP={cm.fp} FN={cm.fn} TN={cm.tn} total={cm.total}")
    click.echo("metrics")
    for name, value in scores.as_dict().items():
        click.echo(f"  {name:<10} {percent(value)}")
    click.echo("maintainability by decided label")
    for label, st in group_stats(results, decided).items():
        line = f"  {label}  n={st.count:<3} mean={st.mean:.2f} std={st.std:.2f}"
        if detail:
            line += f" pstd={st.population_std:.2f}"
        click.echo(line)
    if figures:
        from .plots import plot_confusion
        figures.mkdir(parents=True, exist_ok=True)
        click.echo(f"wrote {plot_confusion(cm, figures / 'confusion.png')}", err=True)
    if scores.undefined():
        raise UndefinedMetric(f"undefined: {', '.join(scores.undefined())}")


@main.command()
@click.option("--corpus", required=True, type=_path, help="Reference metrics file (same format as --metrics).")
@click.option("--config", "config", type=_path, help="Base model supplying rules, outputs and weights.")
@click.option("--override", "overrides", multiple=True, metavar="METRIC.PARAM=VALUE",
              help="Replace a derived breakpoint, e.g. AC.L3=2.81. Repeatable.")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path),
              help="Write the calibrated config here (default: stdout after the report).")
def calibrate(corpus, config, overrides, out):
    """Derive membership breakpoints from reference quartiles."""
    parsed: dict[str, dict[str, float]] = {}
    for item in overrides:
        key, sep, value = item.partition("=")
        metric, dot, param = key.partition(".")
        if not (sep and dot):
            raise click.BadParameter(f"expected METRIC.PARAM=VALUE, got {item!r}", param_hint="--override")
        try:
            parsed.setdefault(metric.strip(), {})[param.strip()] = float(value)
        except ValueError:
            raise click.BadParameter(f"not a number: {value!r}", param_hint="--override") from None
    base = dataio.load_config(config) if config else None
    corpus_data = ReferenceCorpus.from_services(dataio.parse_metrics(corpus))
    cfg, report = calibrate_model(corpus_data, parsed, base)
    click.echo(report.render(), nl=False)
    if out:
        dataio.save_config(cfg, out)
        click.echo(f"wrote {out}", err=True)
    else:
        click.echo(dataio.save_config(cfg), nl=False)


def run(argv: list[str] | None = None) -> int:
    try:
        main.main(args=argv, prog_name="fuzzymaint", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        click.echo("aborted", err=True)
        return EXIT_USAGE
    except click.UsageError as exc:
        exc.show(file=sys.stderr)
        return EXIT_USAGE
    except UndefinedMetric as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_UNDEFINED
    except (ModelError, InvariantViolation) as exc:
        click.echo(f"model error: {exc}", err=True)
        return EXIT_MODEL
    except (DataError, FuzzyMaintError, OSError) as exc:
        click.echo(f"data error: {exc}", err=True)
        return EXIT_DATA
    return 0


def entry() -> None:
    sys.exit(run())


if __name__ == "__main__":
    entry()
