"""Threshold derivation and core/satellite labeling.

The empirical distribution of the normalized upper-triangle distances has a
steep region (similar pairs) merging into a flat tail; the kink between the
two regimes picks the fraction p, whose quantile is the threshold d_bound.
The core is the largest leading block of the seriated matrix whose modeled
surface stays below d_bound; per-metric cores intersect into the final
labeling.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .dtw import LocalMetric
from .errors import DataError, KinkNotFoundError
from .rbf import RbfModel, evaluate_grid
from .seriation import SeriatedMatrix

UPPER_KINK_WINDOW = (0.60, 0.90)
LOWER_KINK_WINDOW = (0.05, 0.40)
_COLLINEAR_TOL = 1e-6


@dataclass(frozen=True)
class EcdfCurve:
    """Empirical distribution of the strict upper-triangle distances."""

    sorted_values: np.ndarray
    probabilities: np.ndarray

    def __post_init__(self) -> None:
        if self.sorted_values.shape != self.probabilities.shape:
            raise DataError("values/probabilities length mismatch")
        if np.any(np.diff(self.sorted_values) < 0.0):
            raise DataError("values must be sorted ascending")
        if self.sorted_values.size:
            if self.sorted_values[0] < 0.0 or self.sorted_values[-1] > 1.0:
                raise DataError("values must lie in [0, 1]")
            if not np.isclose(self.probabilities[-1], 1.0):
                raise DataError("last probability must be 1")


@dataclass(frozen=True)
class KinkPoint:
    p: float
    value: float


@dataclass(frozen=True)
class MetricCore:
    """Core membership under one metric, with the threshold that produced it."""

    metric: LocalMetric
    p_used: float
    d_bound: float
    core_ids: tuple[str, ...]
    universe: tuple[str, ...]

    @property
    def is_empty(self) -> bool:
        return len(self.core_ids) == 0

    def to_dict(self) -> dict:
        return {
            "metric": self.metric.value,
            "p_used": self.p_used,
            "d_bound": self.d_bound,
            "core_ids": list(self.core_ids),
            "universe": list(self.universe),
            "empty_core": self.is_empty,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "MetricCore":
        return cls(
            metric=LocalMetric.from_name(payload["metric"]),
            p_used=float(payload["p_used"]),
            d_bound=float(payload["d_bound"]),
            core_ids=tuple(payload["core_ids"]),
            universe=tuple(payload["universe"]),
        )


@dataclass(frozen=True)
class SegmentationResult:
    """Per-metric cores plus their intersection over the common universe."""

    per_metric: tuple[MetricCore, ...]
    intersection_core: tuple[str, ...]
    satellite: tuple[str, ...]

    @property
    def universe(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.intersection_core) | set(self.satellite)))


def ecdf_upper_triangle(sm: SeriatedMatrix) -> EcdfCurve:
    """Sorted strict-upper-triangle values with probabilities k/K."""
    n = sm.size
    if n < 2:
        raise DataError("need at least 2 assets for an ECDF")
    ii, jj = np.triu_indices(n, k=1)
    values = np.sort(sm.d_norm[ii, jj])
    k = len(values)
    return EcdfCurve(sorted_values=values, probabilities=np.arange(1, k + 1) / k)


def ecdf_of_values(values: np.ndarray) -> EcdfCurve:
    """ECDF over an explicit value sample (used by fixtures and tests)."""
    v = np.sort(np.asarray(values, dtype=float))
    return EcdfCurve(sorted_values=v, probabilities=np.arange(1, len(v) + 1) / len(v))


def threshold(curve: EcdfCurve, p: float) -> float:
    """Lower quantile: smallest sorted value whose ECDF reaches p."""
    if not 0.0 < p < 1.0:
        raise DataError(f"p must be in (0, 1), got {p}")
    k = len(curve.sorted_values)
    idx = max(1, math.ceil(p * k))
    return float(curve.sorted_values[idx - 1])


def detect_kink(curve: EcdfCurve, search_window: tuple[float, float] = UPPER_KINK_WINDOW) -> KinkPoint:
    """Locate the steep-to-flat transition of the ECDF inside a probability window.

    The knee rule: take the chord between the curve points at the window's
    probability endpoints and return the in-window curve point with maximum
    perpendicular distance to it.  A curve that is flat or straight in the
    window has no kink and raises, suggesting an explicit p instead.
    """
    lo, hi = search_window
    if not 0.0 < lo < hi < 1.0:
        raise DataError(f"invalid search window {search_window}")
    x0, x1 = threshold(curve, lo), threshold(curve, hi)
    if x1 - x0 <= 0.0:
        raise KinkNotFoundError(
            f"ECDF flat in window {search_window}; pass an explicit p instead"
        )
    probs = curve.probabilities
    mask = (probs >= lo) & (probs <= hi)
    if not np.any(mask):
        raise KinkNotFoundError(f"no ECDF points inside window {search_window}")
    xs = curve.sorted_values[mask]
    ys = probs[mask]
    # perpendicular distance from (xs, ys) to the chord (x0, lo) -> (x1, hi)
    dx, dy = x1 - x0, hi - lo
    chord_len = math.hypot(dx, dy)
    dist = np.abs(dx * (ys - lo) - dy * (xs - x0)) / chord_len
    best = int(np.argmax(dist))
    if dist[best] <= _COLLINEAR_TOL * chord_len:
        raise KinkNotFoundError(
            f"no kink: ECDF is straight in window {search_window}; pass an explicit p instead"
        )
    return KinkPoint(p=float(ys[best]), value=float(xs[best]))


def core_block(
    model: RbfModel,
    sm: SeriatedMatrix,
    d_bound: float,
    metric: LocalMetric,
    p_used: float = float("nan"),
) -> MetricCore:
    """Largest leading k x k block whose modeled surface stays at or below d_bound.

    Growing the block only adds constraints, so the first k whose new border
    cells exceed d_bound stops the scan.  Core members are the first k assets
    in seriation order; k = 0 yields an explicitly empty core.
    """
    if not 0.0 < d_bound < 1.0:
        raise DataError(f"d_bound must be in (0, 1), got {d_bound}")
    n = sm.size
    surface = evaluate_grid(model, n)
    k_star = 0
    for k in range(1, n + 1):
        border_ok = (
            np.all(surface[k - 1, :k] <= d_bound) and np.all(surface[:k, k - 1] <= d_bound)
        )
        if not border_ok:
            break
        k_star = k
    return MetricCore(
        metric=metric,
        p_used=p_used,
        d_bound=d_bound,
        core_ids=tuple(sm.labels[:k_star]),
        universe=tuple(sm.labels),
    )


def intersect(cores: list[MetricCore]) -> SegmentationResult:
    """Assets in every metric's core form the intersection; the rest satellite."""
    if not cores:
        raise DataError("no per-metric cores supplied")
    universe = set(cores[0].universe)
    for c in cores[1:]:
        if set(c.universe) != universe:
            raise DataError("cores cover different universes")
    member_sets = [set(c.core_ids) for c in cores]
    core = set.intersection(*member_sets)
    ordered = tuple(sorted(universe))
    return SegmentationResult(
        per_metric=tuple(cores),
        intersection_core=tuple(a for a in ordered if a in core),
        satellite=tuple(a for a in ordered if a not in core),
    )


def write_report_csv(result: SegmentationResult, path, names: dict[str, str] | None = None) -> None:
    """Final report: metadata header, then one row per asset.

    Columns: no, id, name, one boolean per metric, and the intersection label
    C (core) or S (satellite).
    """
    names = names or {}
    metrics = [c.metric for c in result.per_metric]
    core_sets = {c.metric: set(c.core_ids) for c in result.per_metric}
    inter = set(result.intersection_core)
    with open(path, "w", newline="") as fh:
        fh.write("# metric,threshold,p_used\n")
        for c in result.per_metric:
            fh.write(f"# {c.metric.value},{c.d_bound:.6f},{c.p_used:.6f}\n")
        writer = csv.writer(fh)
        writer.writerow(["no", "id", "name", *[m.value for m in metrics], "intersection"])
        for no, asset in enumerate(result.universe, start=1):
            flags = [1 if asset in core_sets[m] else 0 for m in metrics]
            writer.writerow([no, asset, names.get(asset, asset), *flags, "C" if asset in inter else "S"])


def write_report_json(result: SegmentationResult, path, names: dict[str, str] | None = None) -> None:
    names = names or {}
    metrics = [c.metric for c in result.per_metric]
    core_sets = {c.metric: set(c.core_ids) for c in result.per_metric}
    inter = set(result.intersection_core)
    payload = {
        "thresholds": {c.metric.value: c.d_bound for c in result.per_metric},
        "p_used": {c.metric.value: c.p_used for c in result.per_metric},
        "assets": [
            {
                "no": no,
                "id": asset,
                "name": names.get(asset, asset),
                **{m.value: asset in core_sets[m] for m in metrics},
                "intersection": "C" if asset in inter else "S",
            }
            for no, asset in enumerate(result.universe, start=1)
        ],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
