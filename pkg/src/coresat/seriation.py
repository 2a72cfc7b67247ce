"""Seriation and normalization of the DTW distance matrix.

Assets are reordered by ascending mean distance to all others, so the most
dissimilar ones migrate to the right/bottom edge, then the permuted matrix is
scaled into [0, 1] by its global maximum.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .dtw import DistanceMatrix
from .errors import DataError, DegenerateDataError


@dataclass(frozen=True)
class SeriatedMatrix:
    """Permuted, min-max normalized distance matrix (diagonal stays zero)."""

    labels: tuple[str, ...]
    order: tuple[int, ...]
    d_norm: np.ndarray
    max_raw: float

    def __post_init__(self) -> None:
        n = len(self.labels)
        if sorted(self.order) != list(range(n)):
            raise DataError("order is not a permutation")
        if self.d_norm.shape != (n, n):
            raise DataError("seriated matrix shape mismatch")
        if np.any(self.d_norm < 0.0) or np.any(self.d_norm > 1.0):
            raise DataError("normalized entries must lie in [0, 1]")
        if n > 1 and not np.isclose(self.d_norm.max(), 1.0):
            raise DataError("normalized matrix must attain 1 at the raw maximum")

    @property
    def size(self) -> int:
        return len(self.labels)


def order_by_mean_distance(dm: DistanceMatrix) -> tuple[int, ...]:
    """Permutation sorting assets by ascending row sum (stable on ties)."""
    if len(dm.labels) < 2:
        raise DataError("need at least 2 assets to seriate")
    row_sums = dm.d.sum(axis=1)
    return tuple(int(i) for i in np.argsort(row_sums, kind="stable"))


def normalize_minmax(dm: DistanceMatrix, order: tuple[int, ...]) -> SeriatedMatrix:
    """Permute by ``order`` and divide by the global maximum entry."""
    idx = np.asarray(order, dtype=int)
    permuted = dm.d[np.ix_(idx, idx)]
    max_raw = float(permuted.max())
    if max_raw <= 0.0:
        raise DegenerateDataError("all distances zero: universe of identical assets")
    return SeriatedMatrix(
        labels=tuple(dm.labels[i] for i in order),
        order=tuple(int(i) for i in order),
        d_norm=permuted / max_raw,
        max_raw=max_raw,
    )


def seriate(dm: DistanceMatrix) -> SeriatedMatrix:
    """Convenience: order by mean distance, then min-max normalize."""
    return normalize_minmax(dm, order_by_mean_distance(dm))


def write_seriated_csv(sm: SeriatedMatrix, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["asset_id", *sm.labels])
        for i, label in enumerate(sm.labels):
            writer.writerow([label, *[repr(float(v)) for v in sm.d_norm[i]]])


def read_seriated_csv(path, max_raw: float = 1.0, order: tuple[int, ...] | None = None) -> SeriatedMatrix:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    labels = tuple(rows[0][1:])
    d = np.array([[float(v) for v in r[1:]] for r in rows[1:]])
    return SeriatedMatrix(
        labels=labels,
        order=order if order is not None else tuple(range(len(labels))),
        d_norm=d,
        max_raw=max_raw,
    )
