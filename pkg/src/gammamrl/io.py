"""CSV input and output.

Input files have a header with ``time``, ``status`` (1 = event observed,
0 = right-censored) and an optional ``group`` column. Floats are written with
``repr`` so they parse back exactly.
"""

import csv
import json
from pathlib import Path

import numpy as np

from .gibbs import Dataset

__all__ = [
    "DatasetFormatError",
    "load_dataset",
    "write_dataset",
    "write_grid_csv",
    "read_grid_csv",
    "write_draws_csv",
    "write_ew_draws_csv",
    "write_columns_csv",
    "write_json",
]

DEFAULT_GROUP = "all"


class DatasetFormatError(ValueError):
    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


def _fmt(x):
    return repr(float(x))


def load_dataset(path):
    """Read a CSV into one :class:`Dataset` per group, in order of first appearance.

    ``status`` 1 means the event was observed; it is stored as
    ``censored = (status == 0)``.
    """
    groups = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip().lower() for h in next(reader)]
        except StopIteration:
            raise DatasetFormatError("empty file") from None
        if "time" not in header or "status" not in header:
            raise DatasetFormatError("header must contain 'time' and 'status'", 1)
        i_t, i_s = header.index("time"), header.index("status")
        i_g = header.index("group") if "group" in header else None
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise DatasetFormatError(f"expected {len(header)} fields, got {len(row)}", lineno)
            try:
                t = float(row[i_t])
            except ValueError:
                raise DatasetFormatError(f"time {row[i_t]!r} is not a number", lineno) from None
            if not (np.isfinite(t) and t > 0):
                raise DatasetFormatError(f"time must be positive, got {row[i_t].strip()}", lineno)
            status = row[i_s].strip()
            if status not in ("0", "1"):
                raise DatasetFormatError(f"status must be 0 or 1, got {status!r}", lineno)
            g = row[i_g].strip() if i_g is not None else DEFAULT_GROUP
            g = g or DEFAULT_GROUP
            times, cens = groups.setdefault(g, ([], []))
            times.append(t)
            cens.append(status == "0")
    if not groups:
        raise DatasetFormatError("no data rows")
    return {g: Dataset(np.array(t), np.array(c), g) for g, (t, c) in groups.items()}


def write_dataset(path, datasets):
    """Write one or more datasets in the input format."""
    if isinstance(datasets, Dataset):
        datasets = {datasets.group: datasets}
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["time", "status", "group"])
        for g, d in datasets.items():
            for t, c in zip(d.times, d.censored):
                w.writerow([_fmt(t), 0 if c else 1, g])


def write_grid_csv(path, fg):
    """Write a :class:`~gammamrl.analytics.FunctionalGrid` as ``t,median,lower,upper``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "median", "lower", "upper"])
        for row in zip(fg.grid.points, fg.median, fg.lower, fg.upper):
            w.writerow([_fmt(x) for x in row])


def read_grid_csv(path):
    data = np.genfromtxt(path, delimiter=",", names=True)
    return {name: np.asarray(data[name], dtype=float) for name in data.dtype.names}


def write_draws_csv(path, draws):
    """One row per saved mixture draw: alpha, mu, flattened Sigma, weights and atoms."""
    L = draws.L
    header = (["alpha", "mu1", "mu2", "Sigma11", "Sigma12", "Sigma21", "Sigma22"]
              + [f"p{l + 1}" for l in range(L)]
              + [f"theta{l + 1}" for l in range(L)]
              + [f"phi{l + 1}" for l in range(L)])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for b in range(draws.n_draws):
            row = ([draws.alpha[b]] + list(draws.mu[b]) + list(draws.Sigma[b].ravel())
                   + list(draws.weights[b]) + list(draws.theta[b]) + list(draws.phi[b]))
            w.writerow([_fmt(x) for x in row])


def write_ew_draws_csv(path, draws):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["alpha", "theta", "sigma"])
        for row in draws.as_array():
            w.writerow([_fmt(x) for x in row])


def write_columns_csv(path, columns):
    """Write equal-length named columns."""
    names = list(columns)
    arrays = [np.asarray(columns[n], dtype=float) for n in names]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for row in zip(*arrays):
            w.writerow([_fmt(x) for x in row])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")
