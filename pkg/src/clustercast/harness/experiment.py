"""Experiment orchestration: cluster, cross-validate every cell, report.

A cell is one (clustering method, cluster label, model, horizon)
combination. Each finished cell is flushed to its own JSON file under
``<out>/cells/`` keyed by a config fingerprint, so an interrupted run
resumes by recomputing only the missing cells. Cell seeds derive from the
fingerprint and the cell key, making results independent of execution
order and worker count.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np

from ..cluster import agglomerative, euclidean_matrix, kmeans, select_k, silhouette
from ..core import Dataset
from ..datagen import generate_dataset
from ..distance import distance_matrix
from ..errors import ConfigError, SchemaError, UndefinedAtZero
from ..features import build_feature_matrix
from ..forecast.models import ARCHITECTURE_NOTE, ModelSpec
from ..forecast.training import cross_validate
from ..metrics import ErrorTriple, weighted_total
from ..preprocess import clean_dataset
from .config import ExperimentConfig, config_to_dict
from .io import load_dataset, save_dataset, save_outlier_log, write_csv

METRIC_NAMES = ("mae", "rmse", "mape")


class StopRequested(RuntimeError):
    """Raised by the ``stop_after_cells`` hook to simulate an interruption."""


@dataclass(frozen=True)
class CellResult:
    """Cross-validated errors of one model at one horizon in one cluster."""

    method: str
    cluster_label: int
    model: str
    horizon: int
    n_records: int
    mean: ErrorTriple
    folds: tuple[ErrorTriple, ...]
    seconds: float
    skipped: str | None = None


@dataclass(frozen=True)
class ClusteringOutcome:
    """Labels and diagnostics of one clustering method over the dataset."""

    method: str
    labels: np.ndarray
    k: int
    sizes: tuple[int, ...]
    silhouette: float | None
    seconds: float


@dataclass(frozen=True)
class ErrorReport:
    """Everything a run produced: cells, totals, composites, timings."""

    cells: tuple[CellResult, ...]
    clusterings: tuple[ClusteringOutcome, ...]
    totals: dict
    composites: dict
    timings: dict
    fingerprint: str
    out_dir: str


def _cell_seed(fingerprint: str, method: str, label: int, model: str, horizon: int) -> int:
    key = f"{fingerprint}:{method}:{label}:{model}:{horizon}"
    return int.from_bytes(hashlib.sha256(key.encode()).digest()[:4], "big")


def _stage_seed(fingerprint: str, stage: str) -> int:
    return int.from_bytes(
        hashlib.sha256(f"{fingerprint}:{stage}".encode()).digest()[:4], "big"
    )


def _cell_filename(method: str, label: int, model: str, horizon: int) -> str:
    return f"{method}__c{label}__{model}__K{horizon}.json"


def _triple_doc(t: ErrorTriple) -> dict:
    return {"mae": t.mae, "rmse": t.rmse, "mape": t.mape}


def _triple_from(doc: dict) -> ErrorTriple:
    return ErrorTriple(mae=doc["mae"], rmse=doc["rmse"], mape=doc["mape"])


def _write_cell(path: Path, cell: CellResult, fingerprint: str) -> None:
    doc = {
        "fingerprint": fingerprint,
        "method": cell.method,
        "cluster_label": cell.cluster_label,
        "model": cell.model,
        "horizon": cell.horizon,
        "n_records": cell.n_records,
        "mean": _triple_doc(cell.mean),
        "folds": [_triple_doc(f) for f in cell.folds],
        "seconds": cell.seconds,
        "skipped": cell.skipped,
    }
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(doc))
    os.replace(tmp, path)


def _read_cell(path: Path) -> tuple[str, CellResult]:
    doc = json.loads(path.read_text())
    cell = CellResult(
        method=doc["method"],
        cluster_label=doc["cluster_label"],
        model=doc["model"],
        horizon=doc["horizon"],
        n_records=doc["n_records"],
        mean=_triple_from(doc["mean"]),
        folds=tuple(_triple_from(f) for f in doc["folds"]),
        seconds=doc["seconds"],
        skipped=doc.get("skipped"),
    )
    return doc["fingerprint"], cell


def prepare_dataset(cfg: ExperimentConfig):
    """Load or generate, then optionally clean; deterministic per config."""
    out = Path(cfg.out_dir)
    timings = {}
    start = time.perf_counter()
    if cfg.dataset_path is not None:
        dataset, _ = load_dataset(cfg.dataset_path)
    else:
        stored = out / "dataset.csv"
        if stored.exists():
            dataset, _ = load_dataset(stored)
        else:
            dataset, log = generate_dataset(cfg.gen)
            save_dataset(dataset, stored, gen=cfg.gen)
            save_outlier_log(log, out / "outliers.csv")
    timings["load_or_generate"] = time.perf_counter() - start
    schema = dataset.schema
    selection = cfg.measurement_selection or schema.columns
    for c in selection:
        if c not in schema.columns:
            raise ConfigError(f"selected column {c!r} not in schema {schema.columns}")
    target = cfg.target_column
    if target is not None and target not in schema.columns:
        raise ConfigError(f"target column {target!r} not in schema {schema.columns}")
    for k in cfg.horizons:
        if k > schema.length:
            raise ConfigError(f"horizon {k} exceeds series length {schema.length}")
    if cfg.n_train >= schema.length:
        raise ConfigError(f"n_train {cfg.n_train} must be below length {schema.length}")
    if cfg.clean:
        start = time.perf_counter()
        dataset, _ = clean_dataset(dataset, span_fraction=cfg.clean_span)
        timings["clean"] = time.perf_counter() - start
    return dataset, tuple(selection), timings


def assign_clusters(
    cfg: ExperimentConfig, dataset: Dataset, method: str, selection: tuple[str, ...]
) -> ClusteringOutcome:
    """Label every record by the chosen route; 'none' is one big cluster."""
    start = time.perf_counter()
    n = len(dataset.records)
    seed = _stage_seed(cfg.fingerprint(), f"clustering:{method}")
    if method == "none":
        return ClusteringOutcome(
            method=method,
            labels=np.zeros(n, dtype=int),
            k=1,
            sizes=(n,),
            silhouette=None,
            seconds=time.perf_counter() - start,
        )
    k_range = range(cfg.k_range[0], min(cfg.k_range[1], n - 1) + 1)
    if method == "dtw":
        sequences = [rec.stacked(selection) for rec in dataset.records]
        dm = distance_matrix(sequences, metric="dtw")
        if cfg.k is not None:
            assignment = agglomerative(dm, cfg.k)
        else:
            assignment = select_k(dm, k_range, method="agglomerative").assignment
        sil = silhouette(dm.values, assignment.labels) if assignment.k > 1 else None
    elif method in ("feature_a", "feature_b"):
        catalog = "A" if method == "feature_a" else "B"
        fm = build_feature_matrix(dataset, catalog, selection)
        if cfg.k is not None:
            assignment = kmeans(fm.values, cfg.k, seed=seed)
        else:
            assignment = select_k(fm.values, k_range, method="kmeans", seed=seed).assignment
        sil = (
            silhouette(euclidean_matrix(fm.values), assignment.labels)
            if assignment.k > 1
            else None
        )
    else:
        raise ConfigError(f"unknown clustering method {method!r}")
    sizes = tuple(int(s) for s in assignment.sizes())
    return ClusteringOutcome(
        method=method,
        labels=assignment.labels,
        k=assignment.k,
        sizes=sizes,
        silhouette=sil,
        seconds=time.perf_counter() - start,
    )


def _run_cell(payload) -> CellResult:
    """Cross-validate one cell; module-level so worker processes can run it."""
    (cfg_doc, subset, method, label, model, horizon, seed, selection, target) = payload
    n = len(subset.records)
    if n < 2:
        return CellResult(
            method=method,
            cluster_label=label,
            model=model,
            horizon=horizon,
            n_records=n,
            mean=ErrorTriple(float("nan"), float("nan"), float("nan")),
            folds=(),
            seconds=0.0,
            skipped=f"cluster has {n} record(s); need at least 2",
        )
    spec = ModelSpec(
        architecture=model,
        hidden=cfg_doc["hidden"],
        window=cfg_doc["window"],
        learning_rate=cfg_doc["learning_rate"],
        epochs=cfg_doc["epochs"],
        batch_size=cfg_doc["batch_size"],
        seed=seed,
    )
    try:
        cv = cross_validate(
            spec,
            subset,
            cfg_doc["n_train"],
            horizon,
            n_folds=min(cfg_doc["folds"], n),
            seed=seed,
            columns=selection,
            target_column=target,
        )
    except UndefinedAtZero as exc:
        return CellResult(
            method=method,
            cluster_label=label,
            model=model,
            horizon=horizon,
            n_records=n,
            mean=ErrorTriple(float("nan"), float("nan"), float("nan")),
            folds=(),
            seconds=0.0,
            skipped=f"percentage error undefined: {exc}",
        )
    return CellResult(
        method=method,
        cluster_label=label,
        model=model,
        horizon=horizon,
        n_records=n,
        mean=cv.mean,
        folds=cv.folds,
        seconds=cv.seconds,
    )


def _check_fingerprint(out: Path, fingerprint: str, cfg: ExperimentConfig) -> None:
    marker = out / "fingerprint.json"
    if marker.exists():
        stored = json.loads(marker.read_text())
        if stored.get("fingerprint") != fingerprint:
            raise ConfigError(
                f"output directory {out} holds results for a different config "
                f"(fingerprint {stored.get('fingerprint')!r} != {fingerprint!r}); "
                "use a fresh directory or delete the old results"
            )
    else:
        out.mkdir(parents=True, exist_ok=True)
        marker.write_text(
            json.dumps(
                {"fingerprint": fingerprint, "config": config_to_dict(cfg)}, indent=2
            )
        )


def run_experiment(cfg: ExperimentConfig, stop_after_cells: int | None = None) -> ErrorReport:
    """Full grid: prepare data, cluster per method, cross-validate every cell.

    Completed cells are flushed immediately and skipped on re-runs with the
    same config fingerprint. ``stop_after_cells`` aborts after that many
    newly computed cells (interruption hook for resume testing).
    """
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fingerprint = cfg.fingerprint()
    _check_fingerprint(out, fingerprint, cfg)
    total_start = time.perf_counter()
    dataset, selection, timings = prepare_dataset(cfg)
    target = cfg.target_column

    clusterings = []
    cluster_rows = []
    for method in cfg.clustering:
        outcome = assign_clusters(cfg, dataset, method, selection)
        clusterings.append(outcome)
        timings[f"clustering:{method}"] = outcome.seconds
        for rec, label in zip(dataset.records, outcome.labels):
            cluster_rows.append([rec.id, method, int(label)])
    write_csv(out / "clusters.csv", ["record_id", "method", "cluster"], cluster_rows)

    cells_dir = out / "cells"
    cells_dir.mkdir(exist_ok=True)
    pending = []
    done: list[CellResult] = []
    for outcome in clusterings:
        subsets = {
            label: dataset.subset(np.flatnonzero(outcome.labels == label))
            for label in range(outcome.k)
        }
        for label in range(outcome.k):
            for model in cfg.models:
                for horizon in cfg.horizons:
                    path = cells_dir / _cell_filename(outcome.method, label, model, horizon)
                    if path.exists():
                        stored_fp, cell = _read_cell(path)
                        if stored_fp == fingerprint:
                            done.append(cell)
                            continue
                        raise ConfigError(
                            f"cell {path.name} belongs to fingerprint {stored_fp!r}"
                        )
                    seed = _cell_seed(fingerprint, outcome.method, label, model, horizon)
                    pending.append(
                        (
                            {
                                "hidden": cfg.hidden,
                                "window": cfg.window,
                                "learning_rate": cfg.learning_rate,
                                "epochs": cfg.epochs,
                                "batch_size": cfg.batch_size,
                                "folds": cfg.folds,
                                "n_train": cfg.n_train,
                            },
                            subsets[label],
                            outcome.method,
                            label,
                            model,
                            horizon,
                            seed,
                            selection,
                            target,
                        )
                    )

    train_start = time.perf_counter()
    computed = 0
    if cfg.jobs > 1 and pending:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            for cell in pool.map(_run_cell, pending):
                path = cells_dir / _cell_filename(
                    cell.method, cell.cluster_label, cell.model, cell.horizon
                )
                _write_cell(path, cell, fingerprint)
                done.append(cell)
                computed += 1
                if stop_after_cells is not None and computed >= stop_after_cells:
                    raise StopRequested(f"stopped after {computed} cells")
    else:
        for payload in pending:
            cell = _run_cell(payload)
            path = cells_dir / _cell_filename(
                cell.method, cell.cluster_label, cell.model, cell.horizon
            )
            _write_cell(path, cell, fingerprint)
            done.append(cell)
            computed += 1
            if stop_after_cells is not None and computed >= stop_after_cells:
                raise StopRequested(f"stopped after {computed} cells")
    timings["training"] = time.perf_counter() - train_start
    timings["total"] = time.perf_counter() - total_start

    report = assemble_report(cfg, tuple(done), tuple(clusterings), timings, fingerprint)
    write_report(report, cfg)
    return report


def _totals_for(
    cells: list[CellResult], sizes: tuple[int, ...]
) -> dict[str, float] | None:
    """Eq-style weighted totals across clusters; None when any part is missing."""
    if any(c.skipped for c in cells) or len(cells) != len(sizes):
        return None
    by_label = {c.cluster_label: c for c in cells}
    if sorted(by_label) != list(range(len(sizes))):
        return None
    out = {}
    for metric in METRIC_NAMES:
        per_cluster = [getattr(by_label[lab].mean, metric) for lab in range(len(sizes))]
        out[metric] = weighted_total(list(sizes), per_cluster)
    return out


def assemble_report(
    cfg: ExperimentConfig,
    cells: tuple[CellResult, ...],
    clusterings: tuple[ClusteringOutcome, ...],
    timings: dict,
    fingerprint: str,
) -> ErrorReport:
    """Weighted totals per (method, model, horizon) and best-model composites."""
    sizes = {c.method: c.sizes for c in clusterings}
    totals: dict[tuple[str, str, int], dict[str, float] | None] = {}
    for method in cfg.clustering:
        for model in cfg.models:
            for horizon in cfg.horizons:
                group = [
                    c
                    for c in cells
                    if (c.method, c.model, c.horizon) == (method, model, horizon)
                ]
                totals[(method, model, horizon)] = _totals_for(group, sizes[method])
    composites: dict[tuple[str, int], dict[str, float] | None] = {}
    for method in cfg.clustering:
        for horizon in cfg.horizons:
            labels = range(len(sizes[method]))
            per_metric = {}
            feasible = True
            for metric in METRIC_NAMES:
                best = []
                for label in labels:
                    candidates = [
                        getattr(c.mean, metric)
                        for c in cells
                        if (c.method, c.cluster_label, c.horizon)
                        == (method, label, horizon)
                        and not c.skipped
                    ]
                    if not candidates:
                        feasible = False
                        break
                    best.append(min(candidates))
                if not feasible:
                    break
                per_metric[metric] = weighted_total(list(sizes[method]), best)
            composites[(method, horizon)] = per_metric if feasible else None
    return ErrorReport(
        cells=cells,
        clusterings=clusterings,
        totals=totals,
        composites=composites,
        timings=timings,
        fingerprint=fingerprint,
        out_dir=cfg.out_dir,
    )


def _fmt_num(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float) and not np.isfinite(v):
        return "-"
    return f"{v:.4f}"


def write_report(report: ErrorReport, cfg: ExperimentConfig) -> None:
    """Emit report.csv, totals.csv, composite.csv, timings.csv, summary.txt."""
    out = Path(report.out_dir)
    rows = [
        [
            c.method,
            c.cluster_label,
            c.model,
            c.horizon,
            c.n_records,
            _fmt_num(c.mean.mae),
            _fmt_num(c.mean.rmse),
            _fmt_num(c.mean.mape),
            f"{c.seconds:.3f}",
            c.skipped or "",
        ]
        for c in sorted(
            report.cells, key=lambda c: (c.method, c.cluster_label, c.model, c.horizon)
        )
    ]
    write_csv(
        out / "report.csv",
        ["method", "cluster", "model", "K", "n_records", "mae", "rmse", "mape", "seconds", "skipped"],
        rows,
    )
    write_csv(
        out / "totals.csv",
        ["method", "model", "K", "weighted_mae", "weighted_rmse", "weighted_mape"],
        [
            [m, mod, k]
            + [_fmt_num(t[metric]) if t else "-" for metric in METRIC_NAMES]
            for (m, mod, k), t in sorted(report.totals.items())
        ],
    )
    write_csv(
        out / "composite.csv",
        ["method", "K", "composite_mae", "composite_rmse", "composite_mape"],
        [
            [m, k] + [_fmt_num(t[metric]) if t else "-" for metric in METRIC_NAMES]
            for (m, k), t in sorted(report.composites.items())
        ],
    )
    write_csv(
        out / "timings.csv",
        ["stage", "seconds"],
        [[stage, f"{secs:.3f}"] for stage, secs in report.timings.items()],
    )
    (out / "summary.txt").write_text(render_summary(report, cfg))


def render_summary(report: ErrorReport, cfg: ExperimentConfig) -> str:
    """Human-readable tables mirroring the comparative-report layout."""
    lines = []
    lines.append("Forecasting experiment summary")
    lines.append(f"config fingerprint: {report.fingerprint}")
    lines.append(f"models: {', '.join(cfg.models)} ({ARCHITECTURE_NOTE})")
    lines.append(
        f"hyperparameters: hidden={cfg.hidden} window={cfg.window} "
        f"lr={cfg.learning_rate} epochs={cfg.epochs} batch={cfg.batch_size} "
        f"folds={cfg.folds} n_train={cfg.n_train} seed={cfg.seed}"
    )
    lines.append("")
    for outcome in report.clusterings:
        sil = f"{outcome.silhouette:.3f}" if outcome.silhouette is not None else "-"
        lines.append(
            f"clustering [{outcome.method}]: k={outcome.k} sizes={list(outcome.sizes)} "
            f"silhouette={sil} time={outcome.seconds:.2f}s"
        )
    lines.append("")
    for method in cfg.clustering:
        lines.append(f"== method: {method} ==")
        for label in range(len(next(c for c in report.clusterings if c.method == method).sizes)):
            cluster_cells = [
                c
                for c in report.cells
                if c.method == method and c.cluster_label == label
            ]
            if not cluster_cells:
                continue
            n = cluster_cells[0].n_records
            lines.append(f"  cluster {label} ({n} records)")
            header = "    {:<6}".format("model") + "".join(
                f"{f'K={k}':>27}" for k in cfg.horizons
            )
            lines.append(header)
            lines.append("    " + "{:<6}".format("") + "".join(
                f"{'mae/rmse/mape':>27}" for _ in cfg.horizons
            ))
            for model in cfg.models:
                row = f"    {model:<6}"
                for horizon in cfg.horizons:
                    cell = next(
                        (
                            c
                            for c in cluster_cells
                            if c.model == model and c.horizon == horizon
                        ),
                        None,
                    )
                    if cell is None or cell.skipped:
                        row += f"{'-':>27}"
                    else:
                        row += "{:>27}".format(
                            f"{cell.mean.mae:.1f}/{cell.mean.rmse:.1f}/{cell.mean.mape:.2f}%"
                        )
                lines.append(row)
        lines.append("")
    lines.append("== weighted totals (cluster-size weighted) ==")
    for (method, model, horizon), t in sorted(report.totals.items()):
        vals = (
            " ".join(f"{metric}={_fmt_num(t[metric])}" for metric in METRIC_NAMES)
            if t
            else "not computable (skipped cells)"
        )
        lines.append(f"  {method:<10} {model:<4} K={horizon:<5} {vals}")
    lines.append("")
    lines.append("== best-model-per-cluster composites ==")
    for (method, horizon), t in sorted(report.composites.items()):
        vals = (
            " ".join(f"{metric}={_fmt_num(t[metric])}" for metric in METRIC_NAMES)
            if t
            else "not computable (skipped cells)"
        )
        lines.append(f"  {method:<10} K={horizon:<5} {vals}")
    lines.append("")
    lines.extend(_comparison_lines(report, cfg))
    lines.append("")
    lines.append("== timings ==")
    for stage, secs in report.timings.items():
        lines.append(f"  {stage}: {secs:.2f}s")
    return "\n".join(lines) + "\n"


def _comparison_lines(report: ErrorReport, cfg: ExperimentConfig) -> list[str]:
    """The highlighted clustered-vs-unclustered weighted MAPE comparison."""
    lines = ["== clustered vs unclustered (best model per method, weighted MAPE) =="]
    if "none" not in cfg.clustering:
        lines.append("  (no unclustered baseline in this run)")
        return lines
    for horizon in cfg.horizons:
        base_candidates = [
            t["mape"]
            for (m, _mod, k), t in report.totals.items()
            if m == "none" and k == horizon and t
        ]
        if not base_candidates:
            lines.append(f"  K={horizon}: baseline not computable")
            continue
        baseline = min(base_candidates)
        for method in cfg.clustering:
            if method == "none":
                continue
            clustered_candidates = [
                t["mape"]
                for (m, _mod, k), t in report.totals.items()
                if m == method and k == horizon and t
            ]
            if not clustered_candidates:
                lines.append(f"  K={horizon} {method}: not computable")
                continue
            clustered = min(clustered_candidates)
            verdict = "improved" if clustered <= baseline else "did not improve"
            lines.append(
                f"  >>> K={horizon} {method}: weighted MAPE {clustered:.2f}% vs "
                f"unclustered {baseline:.2f}% ({verdict})"
            )
    return lines


def run_ablation(cfg: ExperimentConfig) -> ErrorReport:
    """Column-subset study: M1 and M3 over every subset of two or more columns.

    Each subset feeds the dynamic branch while the target column stays
    fixed, so subsets that omit the target are flagged. Results land in
    ``ablation.csv`` and the returned report's cells, keyed by a
    subset-named pseudo method.
    """
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fingerprint = cfg.fingerprint()
    dataset, selection, timings = prepare_dataset(cfg)
    if len(selection) < 2:
        raise ConfigError(
            f"ablation needs at least two measurement columns, got {len(selection)}"
        )
    target = cfg.target_column or (
        selection[2] if len(selection) >= 3 else selection[-1]
    )
    subsets = [
        subset
        for size in range(2, len(selection) + 1)
        for subset in combinations(selection, size)
    ]
    models = tuple(m for m in ("M1", "M3") if m in cfg.models) or ("M1", "M3")
    cells = []
    rows = []
    start = time.perf_counter()
    for subset in subsets:
        method = "+".join(subset)
        flag = "target-excluded" if target not in subset else ""
        for model in models:
            for horizon in cfg.horizons:
                seed = _cell_seed(fingerprint, method, 0, model, horizon)
                cell = _run_cell(
                    (
                        {
                            "hidden": cfg.hidden,
                            "window": cfg.window,
                            "learning_rate": cfg.learning_rate,
                            "epochs": cfg.epochs,
                            "batch_size": cfg.batch_size,
                            "folds": cfg.folds,
                            "n_train": cfg.n_train,
                        },
                        dataset,
                        method,
                        0,
                        model,
                        horizon,
                        seed,
                        subset,
                        target,
                    )
                )
                cells.append(cell)
                rows.append(
                    [
                        method,
                        flag,
                        model,
                        horizon,
                        _fmt_num(cell.mean.mae),
                        _fmt_num(cell.mean.rmse),
                        _fmt_num(cell.mean.mape),
                        f"{cell.seconds:.3f}",
                    ]
                )
    timings["ablation"] = time.perf_counter() - start
    write_csv(
        out / "ablation.csv",
        ["columns", "flag", "model", "K", "mae", "rmse", "mape", "seconds"],
        rows,
    )
    outcome = ClusteringOutcome(
        method="none",
        labels=np.zeros(len(dataset.records), dtype=int),
        k=1,
        sizes=(len(dataset.records),),
        silhouette=None,
        seconds=0.0,
    )
    return ErrorReport(
        cells=tuple(cells),
        clusterings=(outcome,),
        totals={},
        composites={},
        timings=timings,
        fingerprint=fingerprint,
        out_dir=cfg.out_dir,
    )


def reassemble_report(cfg: ExperimentConfig) -> ErrorReport:
    """Rebuild report files from completed cell JSONs in the output directory."""
    out = Path(cfg.out_dir)
    cells_dir = out / "cells"
    if not cells_dir.is_dir():
        raise SchemaError(f"no cells directory under {out}; run the experiment first")
    fingerprint = cfg.fingerprint()
    dataset, selection, timings = prepare_dataset(cfg)
    clusterings = tuple(
        assign_clusters(cfg, dataset, method, selection) for method in cfg.clustering
    )
    cells = []
    for path in sorted(cells_dir.glob("*.json")):
        stored_fp, cell = _read_cell(path)
        if stored_fp != fingerprint:
            raise ConfigError(
                f"cell {path.name} belongs to fingerprint {stored_fp!r}, expected {fingerprint!r}"
            )
        cells.append(cell)
    report = assemble_report(cfg, tuple(cells), clusterings, timings, fingerprint)
    write_report(report, cfg)
    return report
