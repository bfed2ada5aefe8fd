"""Config loading, CSV ingestion and self-describing output writers."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np
import yaml

from .core import IngestionError, InvalidArgumentError

MISSING_TOKENS = {"", "na", "nan", "null", "none"}
CURVE_COLUMNS = ("method", "s_hat_or_lambda", "fdr", "tpr", "replicates_used")


def load_config(path) -> dict:
    """Read a YAML or JSON config file into a dict."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InvalidArgumentError(f"cannot read config {path}: {exc}") from exc
    if path.suffix.lower() == ".json":
        cfg = json.loads(text)
    else:
        cfg = yaml.safe_load(text)
    if cfg is None:
        return {}
    if not isinstance(cfg, dict):
        raise InvalidArgumentError(f"config {path} must hold a mapping at the top level")
    return cfg


def read_table(path) -> Tuple[List[str], np.ndarray, int]:
    """Parse a headed numeric CSV.

    Rows containing a missing cell are dropped and counted; any other
    non-numeric cell raises :class:`IngestionError` naming its row and column.
    Returns ``(header, values, rows_rejected)``.
    """
    path = Path(path)
    try:
        fh = path.open(newline="")
    except OSError as exc:
        raise IngestionError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise IngestionError(f"{path} is empty; a header row is required") from None
        if len(set(header)) != len(header):
            raise IngestionError(f"{path} has duplicate column names")
        rows, rejected = [], 0
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise IngestionError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            if any(c.strip().lower() in MISSING_TOKENS for c in row):
                rejected += 1
                continue
            vals = []
            for col, cell in zip(header, row):
                try:
                    v = float(cell)
                except ValueError:
                    raise IngestionError(
                        f"{path}:{lineno}: column {col!r} holds non-numeric value {cell!r}"
                    ) from None
                if not math.isfinite(v):
                    raise IngestionError(f"{path}:{lineno}: column {col!r} is not finite")
                vals.append(v)
            rows.append(vals)
    if not rows:
        raise IngestionError(f"{path} has no complete data rows")
    return header, np.array(rows, dtype=float), rejected


def split_response(header: Sequence[str], values: np.ndarray, response: str):
    if response not in header:
        raise InvalidArgumentError(f"response column {response!r} not found; columns are {list(header)}")
    j = list(header).index(response)
    names = [h for i, h in enumerate(header) if i != j]
    x = np.delete(values, j, axis=1)
    return names, x, values[:, j]


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_curve_csv(path, rows: Iterable[Sequence], meta: Dict) -> None:
    """CSV with ``#``-prefixed metadata lines ahead of the header row."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        for key in sorted(meta):
            fh.write(f"# {key}: {json.dumps(meta[key], sort_keys=True)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CURVE_COLUMNS)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def read_curve_csv(path) -> List[dict]:
    with Path(path).open(newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    out = []
    for rec in csv.DictReader(lines):
        out.append({
            "method": rec["method"],
            "s_hat_or_lambda": float(rec["s_hat_or_lambda"]),
            "fdr": float(rec["fdr"]),
            "tpr": float(rec["tpr"]),
            "replicates_used": int(rec["replicates_used"]),
        })
    return out


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return v
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")
