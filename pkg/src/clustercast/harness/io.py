"""File formats: dataset CSVs with a JSON sidecar, outlier logs, reports.

A dataset saves as three files next to each other: ``<name>.csv`` holds the
measurements in long form (record_id, t, one column per measurement),
``<name>_static.csv`` the static features, and ``<name>.json`` the schema,
seed, and generation parameters. Floats are written with shortest
round-trip precision so save/load is bit-exact; missing values are empty
fields.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from ..core import Dataset, Schema, SeriesRecord
from ..datagen import GenConfig, OutlierEntry, OutlierLog
from ..errors import SchemaError
from .config import gen_config_from_dict, gen_config_to_dict

DATASET_FORMAT = "clustercast-dataset"
DATASET_FORMAT_VERSION = 1


def _fmt(value: float) -> str:
    if math.isnan(value):
        return ""
    return repr(float(value))


def _parse(text: str, where: str) -> float:
    if text == "":
        return float("nan")
    try:
        return float(text)
    except ValueError:
        raise SchemaError(f"unparseable value {text!r} at {where}") from None


def _sidecar_path(path: Path) -> Path:
    return path.with_suffix(".json")


def _static_path(path: Path) -> Path:
    return path.with_name(path.stem + "_static.csv")


def save_dataset(dataset: Dataset, path, gen: GenConfig | None = None) -> None:
    """Write measurements, statics, and the JSON sidecar for ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = dataset.schema.columns
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["record_id", "t", *columns])
        for rec in dataset.records:
            for t in range(dataset.schema.length):
                writer.writerow(
                    [rec.id, t, *(_fmt(rec.measurements[c][t]) for c in columns)]
                )
    with _static_path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["record_id", *(f"f{i + 1}" for i in range(dataset.schema.static_dim))]
        )
        for rec in dataset.records:
            writer.writerow([rec.id, *(_fmt(v) for v in rec.static_features)])
    sidecar = {
        "format": DATASET_FORMAT,
        "format_version": DATASET_FORMAT_VERSION,
        "schema": {
            "columns": list(columns),
            "length": dataset.schema.length,
            "static_dim": dataset.schema.static_dim,
        },
        "seed": dataset.seed,
        "gen": gen_config_to_dict(gen) if gen is not None else None,
    }
    _sidecar_path(path).write_text(json.dumps(sidecar, indent=2))


def load_dataset(path) -> tuple[Dataset, GenConfig | None]:
    """Rebuild a dataset saved by ``save_dataset``; field-exact round trip."""
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"dataset file not found: {path}")
    sidecar_path = _sidecar_path(path)
    if not sidecar_path.exists():
        raise SchemaError(f"missing dataset sidecar: {sidecar_path}")
    sidecar = json.loads(sidecar_path.read_text())
    if sidecar.get("format") != DATASET_FORMAT:
        raise SchemaError(f"not a dataset sidecar: format {sidecar.get('format')!r}")
    if sidecar.get("format_version") != DATASET_FORMAT_VERSION:
        raise SchemaError(
            f"unsupported dataset format version {sidecar.get('format_version')!r}"
        )
    schema = Schema(
        columns=tuple(sidecar["schema"]["columns"]),
        length=int(sidecar["schema"]["length"]),
        static_dim=int(sidecar["schema"]["static_dim"]),
    )
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:2] != ["record_id", "t"]:
            raise SchemaError(
                f"malformed header {header!r}: expected record_id, t, <measurements>"
            )
        if tuple(header[2:]) != schema.columns:
            missing = set(schema.columns) - set(header[2:])
            extra = set(header[2:]) - set(schema.columns)
            raise SchemaError(
                f"measurement header mismatch: missing {sorted(missing)}, "
                f"unexpected {sorted(extra)}"
            )
        values: dict[str, list[list[float]]] = {}
        order: list[str] = []
        for row in reader:
            if len(row) != 2 + len(schema.columns):
                raise SchemaError(f"row for {row[0]!r} has {len(row)} fields")
            rid = row[0]
            if rid not in values:
                values[rid] = []
                order.append(rid)
            values[rid].append(
                [_parse(v, f"{rid}[{row[1]}].{c}") for c, v in zip(schema.columns, row[2:])]
            )
    statics: dict[str, np.ndarray] = {}
    with _static_path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[0] != "record_id":
            raise SchemaError(f"malformed static header {header!r}")
        if len(header) - 1 != schema.static_dim:
            raise SchemaError(
                f"static file has {len(header) - 1} features, schema says {schema.static_dim}"
            )
        for row in reader:
            statics[row[0]] = np.array(
                [_parse(v, f"{row[0]}.{header[i + 1]}") for i, v in enumerate(row[1:])]
            )
    records = []
    for rid in order:
        block = np.array(values[rid])
        if len(block) != schema.length:
            raise SchemaError(
                f"record {rid!r} has {len(block)} rows, schema says {schema.length}"
            )
        if rid not in statics:
            raise SchemaError(f"record {rid!r} missing from the static file")
        records.append(
            SeriesRecord(
                id=rid,
                measurements={c: block[:, i] for i, c in enumerate(schema.columns)},
                static_features=statics[rid],
            )
        )
    gen = sidecar.get("gen")
    return (
        Dataset(records=tuple(records), schema=schema, seed=int(sidecar["seed"])),
        gen_config_from_dict(gen) if gen is not None else None,
    )


def save_outlier_log(log: OutlierLog, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["record_id", "column", "index", "kind", "original_value"])
        for (rid, column), entries in sorted(log.entries.items()):
            for e in entries:
                writer.writerow([rid, column, e.index, e.kind, _fmt(e.original_value)])


def load_outlier_log(path) -> OutlierLog:
    path = Path(path)
    entries: dict[tuple[str, str], list[OutlierEntry]] = {}
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["record_id", "column", "index", "kind", "original_value"]:
            raise SchemaError(f"malformed outlier log header {header!r}")
        for row in reader:
            key = (row[0], row[1])
            entries.setdefault(key, []).append(
                OutlierEntry(
                    index=int(row[2]),
                    kind=row[3],
                    original_value=_parse(row[4], f"{key}[{row[2]}]"),
                )
            )
    return OutlierLog(entries={k: tuple(v) for k, v in entries.items()})


def write_csv(path, header: list[str], rows: list[list]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, list(reader)
