"""Command-line interface over generation, cleaning, clustering, and runs.

Exit codes: 0 on success, 1 for configuration and schema problems, 2 for
runtime failures. The output directory resolves from --out, then the
CLUSTERCAST_OUT environment variable, then ./out.
"""

from __future__ import annotations

import functools
import json
import sys
from dataclasses import replace
from pathlib import Path

import click

from .. import __version__
from ..datagen import desk_config, generate_dataset, full_config
from ..errors import (
    ClusterCastError,
    ConfigError,
    HorizonMismatch,
    OutOfRange,
    SchemaError,
    TooShort,
)
from ..forecast.models import ARCHITECTURES, ModelSpec
from ..forecast.training import cross_validate
from ..preprocess import clean_dataset
from .config import (
    CLUSTERING_METHODS,
    PROFILES,
    ExperimentConfig,
    config_from_dict,
    desk_profile,
)
from .experiment import (
    assign_clusters,
    reassemble_report,
    run_ablation,
    run_experiment,
)
from .io import load_dataset, save_dataset, save_outlier_log, write_csv


def _exit_on_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ConfigError, SchemaError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
        except ClusterCastError as exc:
            click.echo(f"runtime failure: {exc}", err=True)
            sys.exit(2)

    return wrapper


@click.group()
@click.version_option(version=__version__, prog_name="clustercast")
@click.option("--seed", type=int, default=0, show_default=True, help="Root seed.")
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="JSON experiment config (fields of ExperimentConfig; optional 'profile').")
@click.option("--out", "out_dir", type=click.Path(), default=None,
              envvar="CLUSTERCAST_OUT", help="Output directory [env: CLUSTERCAST_OUT].")
@click.option("--jobs", type=int, default=1, show_default=True,
              help="Worker processes for independent cells.")
@click.pass_context
def main(ctx, seed, config_path, out_dir, jobs):
    """Time-series forecasting workflows: generate, clean, cluster, train."""
    ctx.ensure_object(dict)
    ctx.obj.update(seed=seed, config_path=config_path, out_dir=out_dir or "out", jobs=jobs)


def _load_config(ctx) -> ExperimentConfig:
    path = ctx.obj["config_path"]
    if path is None:
        return desk_profile(seed=ctx.obj["seed"], out_dir=ctx.obj["out_dir"],
                            jobs=ctx.obj["jobs"])
    try:
        doc = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
    doc.setdefault("seed", ctx.obj["seed"])
    doc.setdefault("out_dir", ctx.obj["out_dir"])
    doc.setdefault("jobs", ctx.obj["jobs"])
    return config_from_dict(doc)


@main.command()
@click.option("--profile", type=click.Choice(sorted(PROFILES)), default="desk",
              show_default=True, help="Generation size preset.")
@click.option("--records", type=int, default=None, help="Override record count.")
@click.option("--length", type=int, default=None, help="Override series length.")
@click.pass_context
@_exit_on_errors
def generate(ctx, profile, records, length):
    """Write a synthetic dataset, its static features, and the outlier log."""
    gen = (desk_config if profile == "desk" else full_config)(ctx.obj["seed"])
    overrides = {}
    if records is not None:
        overrides["n_records"] = records
    if length is not None:
        overrides["length"] = length
    if overrides:
        gen = replace(gen, **overrides)
    out = Path(ctx.obj["out_dir"])
    dataset, log = generate_dataset(gen)
    save_dataset(dataset, out / "dataset.csv", gen=gen)
    save_outlier_log(log, out / "outliers.csv")
    click.echo(
        f"wrote {len(dataset.records)} records x {len(dataset.schema.columns)} columns "
        f"x {dataset.schema.length} points to {out / 'dataset.csv'}"
    )


@main.command()
@click.option("--dataset", "dataset_path", type=click.Path(), required=True,
              help="Dataset CSV to clean.")
@click.option("--span", type=float, default=0.25, show_default=True,
              help="Smoothing window fraction.")
@click.pass_context
@_exit_on_errors
def clean(ctx, dataset_path, span):
    """Detect and repair anomalies in every measurement column."""
    out = Path(ctx.obj["out_dir"])
    dataset, gen = load_dataset(dataset_path)
    cleaned, reports = clean_dataset(dataset, span_fraction=span)
    save_dataset(cleaned, out / "cleaned.csv", gen=gen)
    rows = [
        [rid, column, len(report.flagged), " ".join(str(i) for i in report.flagged)]
        for (rid, column), report in sorted(reports.items())
    ]
    write_csv(out / "anomalies.csv", ["record_id", "column", "n_flagged", "indices"], rows)
    total = sum(len(r.flagged) for r in reports.values())
    click.echo(f"flagged {total} points across {len(reports)} columns; "
               f"cleaned dataset at {out / 'cleaned.csv'}")


@main.command()
@click.option("--dataset", "dataset_path", type=click.Path(), required=True)
@click.option("--method", type=click.Choice([m for m in CLUSTERING_METHODS if m != "none"]),
              default="feature_a", show_default=True)
@click.option("--k", type=int, default=None, help="Fixed cluster count (default: auto-select).")
@click.pass_context
@_exit_on_errors
def cluster(ctx, dataset_path, method, k):
    """Cluster records and write assignments plus a validity-index table."""
    out = Path(ctx.obj["out_dir"])
    cfg = ExperimentConfig(
        dataset_path=dataset_path, clustering=(method,), k=k,
        seed=ctx.obj["seed"], out_dir=str(out),
    )
    dataset, _ = load_dataset(dataset_path)
    outcome = assign_clusters(cfg, dataset, method, dataset.schema.columns)
    write_csv(
        out / "clusters.csv",
        ["record_id", "method", "cluster"],
        [[rec.id, method, int(label)] for rec, label in zip(dataset.records, outcome.labels)],
    )
    sil = f"{outcome.silhouette:.4f}" if outcome.silhouette is not None else "-"
    click.echo(
        f"{method}: k={outcome.k} sizes={list(outcome.sizes)} silhouette={sil} "
        f"time={outcome.seconds:.2f}s -> {out / 'clusters.csv'}"
    )


@main.command()
@click.option("--dataset", "dataset_path", type=click.Path(), required=True)
@click.option("--model", type=click.Choice(ARCHITECTURES), required=True)
@click.option("--horizon", "-K", type=int, required=True, help="Forecast index (one-based).")
@click.option("--n-train", type=int, default=50, show_default=True)
@click.option("--window", type=int, default=12, show_default=True)
@click.option("--hidden", type=int, default=16, show_default=True)
@click.option("--epochs", type=int, default=40, show_default=True)
@click.option("--folds", type=int, default=5, show_default=True)
@click.pass_context
@_exit_on_errors
def train(ctx, dataset_path, model, horizon, n_train, window, hidden, epochs, folds):
    """Cross-validate one model at one horizon on the whole dataset."""
    dataset, _ = load_dataset(dataset_path)
    spec = ModelSpec(
        architecture=model, hidden=hidden, window=window, epochs=epochs,
        batch_size=16, learning_rate=5e-3, seed=ctx.obj["seed"],
    )
    try:
        cv = cross_validate(spec, dataset, n_train, horizon, n_folds=folds,
                            seed=ctx.obj["seed"])
    except (ValueError, HorizonMismatch, OutOfRange, TooShort) as exc:
        raise ConfigError(str(exc)) from None
    out = Path(ctx.obj["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    doc = {
        "model": model, "horizon": horizon, "n_train": n_train,
        "mean": {"mae": cv.mean.mae, "rmse": cv.mean.rmse, "mape": cv.mean.mape},
        "folds": [{"mae": f.mae, "rmse": f.rmse, "mape": f.mape} for f in cv.folds],
        "seconds": cv.seconds,
    }
    (out / f"train_{model}_K{horizon}.json").write_text(json.dumps(doc, indent=2))
    click.echo(
        f"{model} K={horizon}: mae={cv.mean.mae:.2f} rmse={cv.mean.rmse:.2f} "
        f"mape={cv.mean.mape:.2f}% ({cv.seconds:.1f}s)"
    )


@main.command()
@click.option("--ablation", is_flag=True, help="Run the measurement-subset study instead.")
@click.pass_context
@_exit_on_errors
def experiment(ctx, ablation):
    """Run the full configured grid (resumes completed cells)."""
    cfg = _load_config(ctx)
    if ablation:
        rep = run_ablation(cfg)
        click.echo(f"{len(rep.cells)} ablation cells -> {Path(rep.out_dir) / 'ablation.csv'}")
        return
    rep = run_experiment(cfg)
    skipped = sum(1 for c in rep.cells if c.skipped)
    click.echo(f"{len(rep.cells)} cells ({skipped} skipped), results under {rep.out_dir}")
    click.echo((Path(rep.out_dir) / "summary.txt").read_text(), nl=False)


@main.command()
@click.pass_context
@_exit_on_errors
def report(ctx):
    """Rebuild report files from completed cells in the output directory."""
    cfg = _load_config(ctx)
    rebuilt = reassemble_report(cfg)
    click.echo(f"rebuilt report from {len(rebuilt.cells)} cells under {rebuilt.out_dir}")


if __name__ == "__main__":
    main()
