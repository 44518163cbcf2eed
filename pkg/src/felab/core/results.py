"""CSV/JSON serialization of free-energy results.

Every result is a flat row.  The fixed leading columns are
``experiment_id, model, params_json, convention, F_mean, F_stderr,
n_disorder, n_state_samples, seed``; the experiment runner appends ``role``,
``annealed`` and ``verdict``.  Floats are written with ``repr`` (shortest
round-trip form) so identical inputs give identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from felab.core.free_energy import FreeEnergyEstimate

CORE_COLUMNS = (
    "experiment_id",
    "model",
    "params_json",
    "convention",
    "F_mean",
    "F_stderr",
    "n_disorder",
    "n_state_samples",
    "seed",
)
COLUMNS = CORE_COLUMNS + ("role", "annealed", "verdict")


def params_json(params) -> str:
    return json.dumps(_plain(params), sort_keys=True, separators=(",", ":"))


def estimate_row(experiment_id: str, model: str, params, est: FreeEnergyEstimate, **extra) -> dict:
    row = {
        "experiment_id": experiment_id,
        "model": model,
        "params_json": params_json(params),
        "convention": est.convention,
        "F_mean": est.mean,
        "F_stderr": est.total_stderr,
        "n_disorder": est.n_disorder,
        "n_state_samples": est.n_state_samples,
        "seed": est.seed,
    }
    row.update(extra)
    return row


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        return repr(value)
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return str(value)


def rows_to_csv(rows, columns=COLUMNS) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(c)) for c in columns])
    return buf.getvalue()


def rows_to_json(rows, columns=COLUMNS) -> str:
    records = [{c: _json_value(row.get(c)) for c in columns} for row in rows]
    return json.dumps(records, indent=2, sort_keys=False) + "\n"


def write_atomic(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file and ``os.replace``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_value(value):
    if isinstance(value, (np.floating,)):
        value = float(value)
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    if isinstance(value, np.integer):
        return int(value)
    return value


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    return obj
