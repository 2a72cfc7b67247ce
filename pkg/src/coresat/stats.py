"""Per-asset, per-year sample vectors: mean return, volatility, tail index.

Each calendar year of weekly log returns collapses to the 3-vector
(mean %, std %, alpha); the sequence of those vectors over the study window
is what the DTW stage compares.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DataError, DegenerateDataError
from .ingest import ReturnPanel
from .stable import mcculloch_alpha

MIN_BUCKET_SIZE = 8


@dataclass(frozen=True)
class SampleVector:
    """One asset-year: mean and std of weekly returns in percent, tail alpha.

    ``standardized`` marks z-scored vectors, whose components are no longer
    bound to the raw-statistic ranges.
    """

    year: int
    mean_return: float
    std_dev: float
    tail_alpha: float
    alpha_clamped: bool = False
    standardized: bool = False

    def __post_init__(self) -> None:
        if self.standardized:
            return
        if self.std_dev < 0.0:
            raise DataError(f"std_dev must be >= 0, got {self.std_dev}")
        if not 0.0 < self.tail_alpha <= 2.0:
            raise DataError(f"tail_alpha must be in (0, 2], got {self.tail_alpha}")

    def as_array(self) -> np.ndarray:
        return np.array([self.mean_return, self.std_dev, self.tail_alpha])


@dataclass(frozen=True)
class SampleVectorSeries:
    """Yearly sample vectors of one asset, contiguous ascending years."""

    asset_id: str
    vectors: tuple[SampleVector, ...]

    def __post_init__(self) -> None:
        if len(self.vectors) < 2:
            raise DataError(f"{self.asset_id}: need at least 2 yearly vectors")
        years = [v.year for v in self.vectors]
        if any(b != a + 1 for a, b in zip(years, years[1:])):
            raise DataError(f"{self.asset_id}: years not contiguous: {years}")

    @property
    def years(self) -> tuple[int, ...]:
        return tuple(v.year for v in self.vectors)

    def as_matrix(self) -> np.ndarray:
        """(T, 3) array of (mean %, std %, alpha) rows."""
        return np.array([v.as_array() for v in self.vectors])


def annual_buckets(panel: ReturnPanel) -> dict[str, dict[int, np.ndarray]]:
    """Group each asset's weekly returns by the calendar year of the week end.

    Every bucket must hold at least MIN_BUCKET_SIZE observations, the minimum
    for a meaningful tail fit.
    """
    if len(panel.weeks) == 0 or len(panel.assets) == 0:
        raise DataError("empty return panel")
    years = np.array([w.year for w in panel.weeks])
    out: dict[str, dict[int, np.ndarray]] = {}
    uniq = sorted(set(years.tolist()))
    for y in uniq:
        if int(np.sum(years == y)) < MIN_BUCKET_SIZE:
            raise DataError(
                f"year {y} has only {int(np.sum(years == y))} weekly returns "
                f"(minimum {MIN_BUCKET_SIZE})"
            )
    for i, asset in enumerate(panel.assets):
        out[asset] = {y: panel.returns[i, years == y] for y in uniq}
    return out


def mean_and_std(bucket: np.ndarray) -> tuple[float, float]:
    """Arithmetic mean and n-1 standard deviation of weekly returns, in percent."""
    b = np.asarray(bucket, dtype=float)
    if b.size < 2:
        raise DataError(f"bucket too small for std: {b.size}")
    return float(np.mean(b) * 100.0), float(np.std(b, ddof=1) * 100.0)


def fit_tail_alpha(bucket: np.ndarray) -> float:
    """Stable tail index of one year of weekly returns (scale-free estimator)."""
    alpha, _ = fit_tail_alpha_flagged(bucket)
    return alpha


def fit_tail_alpha_flagged(bucket: np.ndarray) -> tuple[float, bool]:
    b = np.asarray(bucket, dtype=float)
    if b.size < MIN_BUCKET_SIZE:
        raise DegenerateDataError(
            f"need at least {MIN_BUCKET_SIZE} observations to fit alpha, got {b.size}"
        )
    if np.all(b == b[0]):
        raise DegenerateDataError("constant bucket: tail index undefined")
    return mcculloch_alpha(b)


def build_sample_series(panel: ReturnPanel) -> list[SampleVectorSeries]:
    """One SampleVectorSeries per asset, years aligned across assets."""
    buckets = annual_buckets(panel)
    out: list[SampleVectorSeries] = []
    for asset in panel.assets:
        vectors = []
        for year in sorted(buckets[asset]):
            b = buckets[asset][year]
            try:
                mean_pct, std_pct = mean_and_std(b)
                alpha, clamped = fit_tail_alpha_flagged(b)
            except (DataError, DegenerateDataError) as exc:
                raise DegenerateDataError(f"{asset}, year {year}: {exc}") from exc
            vectors.append(
                SampleVector(
                    year=year,
                    mean_return=mean_pct,
                    std_dev=std_pct,
                    tail_alpha=alpha,
                    alpha_clamped=clamped,
                )
            )
        out.append(SampleVectorSeries(asset_id=asset, vectors=tuple(vectors)))
    return out


def write_sample_vectors_csv(series: list[SampleVectorSeries], path) -> None:
    """Persist as asset_id, year, mean_return_pct, std_pct, alpha rows."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["asset_id", "year", "mean_return_pct", "std_pct", "alpha"])
        for s in series:
            for v in s.vectors:
                writer.writerow([s.asset_id, v.year, repr(v.mean_return), repr(v.std_dev), repr(v.tail_alpha)])


def read_sample_vectors_csv(path) -> list[SampleVectorSeries]:
    by_asset: dict[str, list[SampleVector]] = {}
    order: list[str] = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            asset = row["asset_id"]
            if asset not in by_asset:
                by_asset[asset] = []
                order.append(asset)
            by_asset[asset].append(
                SampleVector(
                    year=int(row["year"]),
                    mean_return=float(row["mean_return_pct"]),
                    std_dev=float(row["std_pct"]),
                    tail_alpha=float(row["alpha"]),
                )
            )
    return [
        SampleVectorSeries(asset_id=a, vectors=tuple(sorted(by_asset[a], key=lambda v: v.year)))
        for a in order
    ]
