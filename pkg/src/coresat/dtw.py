"""Dynamic time warping over yearly sample-vector series.

Series are compared through a T x T local cost matrix in one of three
metrics; the DTW distance is the minimum summed cost over monotone warping
paths with unit steps (1,0), (0,1), (1,1), pinned to both endpoints.  No
path-length normalization and no global window: T is small here.
"""

from __future__ import annotations

import csv
import enum
import functools
import json
from dataclasses import dataclass

import numpy as np

from .errors import DataError, DegenerateDataError
from .stats import SampleVector, SampleVectorSeries

BRUTE_MAX_LEN = 8


class LocalMetric(enum.Enum):
    MANHATTAN = "manhattan"
    EUCLIDEAN = "euclidean"
    SQEUCLIDEAN = "sqeuclidean"

    @classmethod
    def from_name(cls, name: str) -> "LocalMetric":
        key = name.strip().lower().replace("-", "").replace("_", "")
        aliases = {
            "manhattan": cls.MANHATTAN,
            "cityblock": cls.MANHATTAN,
            "euclidean": cls.EUCLIDEAN,
            "sqeuclidean": cls.SQEUCLIDEAN,
            "squaredeuclidean": cls.SQEUCLIDEAN,
        }
        if key not in aliases:
            raise DataError(f"unknown metric '{name}' (expected one of {[m.value for m in cls]})")
        return aliases[key]


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric non-negative DTW distance matrix with zero diagonal."""

    labels: tuple[str, ...]
    d: np.ndarray
    metric: LocalMetric

    def __post_init__(self) -> None:
        n = len(self.labels)
        if self.d.shape != (n, n):
            raise DataError("distance matrix shape does not match labels")
        if not np.allclose(self.d, self.d.T):
            raise DataError("distance matrix not symmetric")
        if np.any(np.diag(self.d) != 0.0):
            raise DataError("distance matrix diagonal not zero")
        if self.d.size and np.min(self.d) < 0.0:
            raise DataError("distance matrix has negative entries")


def standardize_panel(series: list[SampleVectorSeries]) -> list[SampleVectorSeries]:
    """Z-score each of the three variables pooled over all assets and years.

    Uses the sample (n-1) standard deviation; a variable with zero pooled
    variance cannot be made commensurate and raises.
    """
    if len(series) < 2:
        raise DataError("need at least 2 assets to standardize")
    stacked = np.vstack([s.as_matrix() for s in series])
    mu = stacked.mean(axis=0)
    sd = stacked.std(axis=0, ddof=1)
    if np.any(sd == 0.0):
        bad = ["mean_return", "std_dev", "tail_alpha"][int(np.argmin(sd))]
        raise DegenerateDataError(f"zero pooled variance in variable '{bad}'")

    out = []
    for s in series:
        z = (s.as_matrix() - mu) / sd
        vectors = tuple(
            SampleVector(
                year=v.year,
                mean_return=float(z[i, 0]),
                std_dev=float(z[i, 1]),
                tail_alpha=float(z[i, 2]),
                alpha_clamped=v.alpha_clamped,
                standardized=True,
            )
            for i, v in enumerate(s.vectors)
        )
        out.append(SampleVectorSeries(asset_id=s.asset_id, vectors=vectors))
    return out


def local_cost(a: np.ndarray, b: np.ndarray, metric: LocalMetric) -> float:
    """Pointwise distance between two yearly 3-vectors."""
    diff = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    if metric is LocalMetric.MANHATTAN:
        return float(np.sum(np.abs(diff)))
    if metric is LocalMetric.EUCLIDEAN:
        return float(np.sqrt(np.sum(diff * diff)))
    return float(np.sum(diff * diff))


def local_cost_matrix(a: np.ndarray, b: np.ndarray, metric: LocalMetric) -> np.ndarray:
    """T x T matrix of local costs between all year pairs of two series."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    diff = a[:, None, :] - b[None, :, :]
    if metric is LocalMetric.MANHATTAN:
        return np.sum(np.abs(diff), axis=2)
    sq = np.sum(diff * diff, axis=2)
    if metric is LocalMetric.EUCLIDEAN:
        return np.sqrt(sq)
    return sq


def _as_matrix(series) -> np.ndarray:
    if isinstance(series, SampleVectorSeries):
        return series.as_matrix()
    return np.atleast_2d(np.asarray(series, dtype=float))


def _check_alignment(a, b) -> tuple[np.ndarray, np.ndarray]:
    ma, mb = _as_matrix(a), _as_matrix(b)
    if ma.shape[0] == 0 or mb.shape[0] == 0:
        raise DataError("empty series")
    if ma.shape[0] != mb.shape[0]:
        raise DataError(f"series length mismatch: {ma.shape[0]} vs {mb.shape[0]}")
    if isinstance(a, SampleVectorSeries) and isinstance(b, SampleVectorSeries):
        if a.years != b.years:
            raise DataError(f"year grids differ: {a.years} vs {b.years}")
    return ma, mb


def dtw_distance(a, b, metric: LocalMetric) -> float:
    """DTW distance between two equal-length aligned series.

    Dynamic program over the cumulative cost matrix
    D[i, j] = cost[i, j] + min(D[i-1, j], D[i, j-1], D[i-1, j-1]) with both
    endpoints enforced; identical series give exactly 0.
    """
    ma, mb = _check_alignment(a, b)
    cost = local_cost_matrix(ma, mb, metric)
    t = cost.shape[0]
    acc = np.empty_like(cost)
    acc[0, 0] = cost[0, 0]
    for i in range(1, t):
        acc[i, 0] = acc[i - 1, 0] + cost[i, 0]
        acc[0, i] = acc[0, i - 1] + cost[0, i]
    for i in range(1, t):
        for j in range(1, t):
            acc[i, j] = cost[i, j] + min(acc[i - 1, j], acc[i, j - 1], acc[i - 1, j - 1])
    return float(acc[-1, -1])


@functools.lru_cache(maxsize=None)
def _all_paths(t: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Every monotone path (0,0) -> (t-1,t-1), padded to equal length.

    Returns (rows, cols, mask) arrays of shape (n_paths, max_len); mask is 0
    on padding cells.
    """
    paths: list[list[tuple[int, int]]] = []

    def walk(i: int, j: int, acc: list[tuple[int, int]]) -> None:
        acc = acc + [(i, j)]
        if i == t - 1 and j == t - 1:
            paths.append(acc)
            return
        if i + 1 < t:
            walk(i + 1, j, acc)
        if j + 1 < t:
            walk(i, j + 1, acc)
        if i + 1 < t and j + 1 < t:
            walk(i + 1, j + 1, acc)

    walk(0, 0, [])
    max_len = max(len(p) for p in paths)
    rows = np.zeros((len(paths), max_len), dtype=np.int64)
    cols = np.zeros((len(paths), max_len), dtype=np.int64)
    mask = np.zeros((len(paths), max_len))
    for k, p in enumerate(paths):
        for s, (i, j) in enumerate(p):
            rows[k, s], cols[k, s], mask[k, s] = i, j, 1.0
    return rows, cols, mask


def dtw_distance_brute(a, b, metric: LocalMetric) -> float:
    """Exact DTW by exhaustive enumeration of all admissible warping paths.

    Test oracle only: path count explodes with length, hence the T <= 8 cap.
    """
    ma, mb = _check_alignment(a, b)
    t = ma.shape[0]
    if t > BRUTE_MAX_LEN:
        raise DataError(f"brute-force enumeration capped at T <= {BRUTE_MAX_LEN}, got {t}")
    cost = local_cost_matrix(ma, mb, metric)
    rows, cols, mask = _all_paths(t)
    totals = (cost[rows, cols] * mask).sum(axis=1)
    return float(totals.min())


def pairwise_matrix(series: list[SampleVectorSeries], metric: LocalMetric) -> DistanceMatrix:
    """DTW distances for every asset pair; upper triangle computed, mirrored."""
    if not series:
        raise DataError("no series supplied")
    mats = [_as_matrix(s) for s in series]
    t0 = mats[0].shape[0]
    years0 = series[0].years if isinstance(series[0], SampleVectorSeries) else None
    for k, (s, m) in enumerate(zip(series, mats)):
        label = getattr(s, "asset_id", f"series[{k}]")
        if m.shape[0] != t0:
            raise DataError(f"{label}: series length differs from panel")
        if years0 is not None and isinstance(s, SampleVectorSeries) and s.years != years0:
            raise DataError(f"{label}: year grid differs from panel")
    n = len(series)
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d[i, j] = d[j, i] = dtw_distance(mats[i], mats[j], metric)
    return DistanceMatrix(labels=tuple(s.asset_id for s in series), d=d, metric=metric)


def write_distance_csv(dm: DistanceMatrix, path) -> None:
    """CSV with a header row and column of asset ids."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["asset_id", *dm.labels])
        for i, label in enumerate(dm.labels):
            writer.writerow([label, *[repr(float(v)) for v in dm.d[i]]])


def read_distance_csv(path, metric: LocalMetric) -> DistanceMatrix:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    labels = tuple(rows[0][1:])
    d = np.array([[float(v) for v in r[1:]] for r in rows[1:]])
    return DistanceMatrix(labels=labels, d=d, metric=metric)


def write_distance_json(dm: DistanceMatrix, path) -> None:
    payload = {
        "labels": list(dm.labels),
        "metric": dm.metric.value,
        "rows": [[float(v) for v in row] for row in dm.d],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
