"""On-disk formats: graphs, signal batches, covariances, vectors and orderings.

Every table is a CSV with a JSON sidecar next to it (``<stem>.csv`` and
``<stem>.json``). Floats are written with 17 significant digits so values
round-trip exactly.
"""
import csv
import json
from pathlib import Path

import numpy as np

from .errors import DataError
from .graphs import Graph
from .ranking import NodeOrdering
from .signals import SignalBatch

FLOAT_FMT = "%.17g"


def _stem(path):
    path = Path(path)
    return path.with_suffix("") if path.suffix in (".csv", ".json") else path


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise DataError(f"missing file {path}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"bad JSON in {path}: {exc}") from None


def write_graph(g, path):
    stem = _stem(path)
    stem.parent.mkdir(parents=True, exist_ok=True)
    iu, ju = np.nonzero(np.triu(g.adjacency, 1))
    with open(stem.with_suffix(".csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["src", "dst", "weight"])
        for i, j in zip(iu, ju):
            w.writerow([i + 1, j + 1, FLOAT_FMT % g.adjacency[i, j]])
    write_json(stem.with_suffix(".json"), {"n": g.n, "kind": g.kind, "seed": g.seed, "params": g.params})
    return stem


def read_graph(path):
    stem = _stem(path)
    meta = read_json(stem.with_suffix(".json"))
    n = int(meta["n"])
    a = np.zeros((n, n))
    try:
        with open(stem.with_suffix(".csv"), newline="") as fh:
            rows = csv.DictReader(fh)
            if rows.fieldnames != ["src", "dst", "weight"]:
                raise DataError(f"graph CSV header must be src,dst,weight; got {rows.fieldnames}")
            for row in rows:
                i, j = int(row["src"]) - 1, int(row["dst"]) - 1
                if not (0 <= i < n and 0 <= j < n):
                    raise DataError(f"edge ({i + 1}, {j + 1}) outside 1..{n}")
                a[i, j] = a[j, i] = float(row["weight"])
    except FileNotFoundError:
        raise DataError(f"missing graph file {stem.with_suffix('.csv')}") from None
    return Graph(a, kind=meta.get("kind", "custom"), seed=meta.get("seed"), params=meta.get("params", {}))


def write_matrix(path, mat, header=None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, np.atleast_2d(mat), fmt=FLOAT_FMT, delimiter=",",
               header=",".join(header) if header else "", comments="")


def read_matrix(path, header=False):
    try:
        return np.loadtxt(path, delimiter=",", skiprows=1 if header else 0, ndmin=2)
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read matrix from {path}: {exc}") from None


def write_batch(batch, path, extra=None):
    stem = _stem(path)
    write_matrix(stem.with_suffix(".csv"), batch.samples, [f"y{i + 1}" for i in range(batch.n)])
    meta = {"m": batch.m, "n": batch.n, "noise_kind": batch.noise_kind, "seed": batch.seed,
            "filter_id": batch.filter_id, "r": batch.r}
    meta.update(extra or {})
    write_json(stem.with_suffix(".json"), meta)
    return stem


def read_batch(path):
    stem = _stem(path)
    samples = read_matrix(stem.with_suffix(".csv"), header=True)
    meta = read_json(stem.with_suffix(".json")) if stem.with_suffix(".json").exists() else {}
    if meta and samples.shape != (meta["m"], meta["n"]):
        raise DataError(f"batch shape {samples.shape} disagrees with metadata ({meta['m']}, {meta['n']})")
    return SignalBatch(samples, noise_kind=meta.get("noise_kind", "gaussian"), seed=meta.get("seed"),
                       filter_id=meta.get("filter_id", ""), r=meta.get("r"))


def write_vector(path, values, name="value", labels=None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node", name] + (["label"] if labels is not None else []))
        for i, v in enumerate(values):
            row = [i + 1, FLOAT_FMT % v]
            if labels is not None:
                row.append(labels[i])
            w.writerow(row)


def read_vector(path, column=None):
    """Read a ``node,<value>`` CSV (1-based nodes) into a dense vector."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
    except FileNotFoundError:
        raise DataError(f"missing vector file {path}") from None
    if not rows:
        raise DataError(f"{path} has no rows")
    col = column or [k for k in rows[0] if k not in ("node", "label")][0]
    out = np.empty(len(rows))
    for row in rows:
        out[int(row["node"]) - 1] = float(row[col])
    return out


def write_ordering(path, ordering):
    write_json(path, ordering.to_json())


def read_ordering(path):
    return NodeOrdering.from_json(read_json(path))


def write_rows(path, fieldnames, rows):
    """CSV writer for experiment tables; floats get full precision."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(fieldnames)
        for row in rows:
            w.writerow([FLOAT_FMT % v if isinstance(v, (float, np.floating)) else v for v in row])
