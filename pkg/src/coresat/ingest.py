"""Raw price files to a clean weekly log-return panel.

Flow: parse per-asset daily CSVs, convert to the quote currency with
carry-forward FX rates, resample to week-end observations on a fixed anchor
weekday, drop assets with long gaps, LOCF-fill the short ones, take log
returns.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError

WEEKDAY_NAMES = {
    "monday": 0,
    "tuesday": 1,
    "wednesday": 2,
    "thursday": 3,
    "friday": 4,
    "saturday": 5,
    "sunday": 6,
}

DEFAULT_MAX_GAP = 4


@dataclass(frozen=True)
class RawPriceSeries:
    """Daily close prices of one asset, strictly ascending dates, prices > 0."""

    asset_id: str
    dates: tuple[dt.date, ...]
    prices: np.ndarray

    def __post_init__(self) -> None:
        if len(self.dates) != len(self.prices):
            raise DataError(f"{self.asset_id}: dates/prices length mismatch")
        for a, b in zip(self.dates, self.dates[1:]):
            if b <= a:
                raise DataError(f"{self.asset_id}: dates not strictly increasing at {b}")
        if len(self.prices) and np.min(self.prices) <= 0.0:
            raise DataError(f"{self.asset_id}: non-positive price")


@dataclass(frozen=True)
class FxSeries:
    """Source -> target exchange rates, strictly ascending dates, rates > 0."""

    dates: tuple[dt.date, ...]
    rates: np.ndarray

    def __post_init__(self) -> None:
        if len(self.dates) != len(self.rates):
            raise DataError("fx: dates/rates length mismatch")
        for a, b in zip(self.dates, self.dates[1:]):
            if b <= a:
                raise DataError(f"fx: dates not strictly increasing at {b}")
        if len(self.rates) and np.min(self.rates) <= 0.0:
            raise DataError("fx: non-positive rate")


@dataclass(frozen=True)
class WeeklySeries:
    """One asset on a weekly grid; NaN marks weeks without any observation."""

    asset_id: str
    weeks: tuple[dt.date, ...]
    values: np.ndarray


@dataclass(frozen=True)
class PricePanel:
    """Dense asset x week matrix of positive prices on a common weekly grid."""

    assets: tuple[str, ...]
    week_grid: tuple[dt.date, ...]
    prices: np.ndarray

    def __post_init__(self) -> None:
        a, w = self.prices.shape
        if a != len(self.assets) or w != len(self.week_grid):
            raise DataError("panel shape does not match labels")
        for x, y in zip(self.week_grid, self.week_grid[1:]):
            if (y - x).days != 7:
                raise DataError(f"week grid not 7-day spaced at {y}")
        if not np.all(np.isfinite(self.prices)) or (a and np.min(self.prices) <= 0.0):
            raise DataError("panel contains missing or non-positive prices")


@dataclass(frozen=True)
class ReturnPanel:
    """Natural-log weekly returns; one fewer column than the price panel."""

    assets: tuple[str, ...]
    weeks: tuple[dt.date, ...]
    returns: np.ndarray


@dataclass(frozen=True)
class Exclusion:
    asset_id: str
    reason: str
    gap_length: int

    def to_dict(self) -> dict:
        return {"asset_id": self.asset_id, "reason": self.reason, "gap_length": self.gap_length}


def _parse_date(text: str) -> dt.date:
    return dt.date.fromisoformat(text.strip())


def parse_price_csv(path, schema: dict[str, str] | None = None, asset_id: str | None = None) -> RawPriceSeries:
    """Read one asset's daily price CSV.

    ``schema`` maps the logical columns ``date`` and ``close`` to the file's
    header names (defaults to those exact names).  The asset id defaults to
    the file name stem.  Rows are sorted ascending by date; duplicate dates,
    unparseable rows and non-positive prices are rejected with the offending
    line number.
    """
    schema = schema or {}
    date_col = schema.get("date", "date")
    close_col = schema.get("close", "close")
    name = asset_id if asset_id is not None else _stem(path)

    rows: list[tuple[dt.date, float]] = []
    seen: set[dt.date] = set()
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or date_col not in reader.fieldnames or close_col not in reader.fieldnames:
            raise DataError(f"{path}: required columns '{date_col}', '{close_col}' not found")
        for lineno, row in enumerate(reader, start=2):
            try:
                d = _parse_date(row[date_col])
                p = float(row[close_col])
            except (ValueError, TypeError, KeyError) as exc:
                raise DataError(f"{path}: malformed row at line {lineno}: {exc}") from exc
            if not math.isfinite(p) or p <= 0.0:
                raise DataError(f"{path}: non-positive price at line {lineno}")
            if d in seen:
                raise DataError(f"{path}: duplicate date {d} at line {lineno}")
            seen.add(d)
            rows.append((d, p))
    if not rows:
        raise DataError(f"{path}: no data rows")
    rows.sort(key=lambda r: r[0])
    return RawPriceSeries(
        asset_id=name,
        dates=tuple(r[0] for r in rows),
        prices=np.array([r[1] for r in rows], dtype=float),
    )


def parse_fx_csv(path) -> FxSeries:
    """Read the FX CSV (columns ``date``, ``rate``)."""
    rows: list[tuple[dt.date, float]] = []
    seen: set[dt.date] = set()
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "date" not in reader.fieldnames or "rate" not in reader.fieldnames:
            raise DataError(f"{path}: required columns 'date', 'rate' not found")
        for lineno, row in enumerate(reader, start=2):
            try:
                d = _parse_date(row["date"])
                r = float(row["rate"])
            except (ValueError, TypeError) as exc:
                raise DataError(f"{path}: malformed row at line {lineno}: {exc}") from exc
            if not math.isfinite(r) or r <= 0.0:
                raise DataError(f"{path}: non-positive rate at line {lineno}")
            if d in seen:
                raise DataError(f"{path}: duplicate date {d} at line {lineno}")
            seen.add(d)
            rows.append((d, r))
    if not rows:
        raise DataError(f"{path}: no data rows")
    rows.sort(key=lambda r: r[0])
    return FxSeries(dates=tuple(r[0] for r in rows), rates=np.array([r[1] for r in rows], dtype=float))


def convert_currency(series: RawPriceSeries, fx: FxSeries) -> RawPriceSeries:
    """Multiply each price by the FX rate on that date or the latest prior date."""
    fx_ord = np.array([d.toordinal() for d in fx.dates])
    px_ord = np.array([d.toordinal() for d in series.dates])
    idx = np.searchsorted(fx_ord, px_ord, side="right") - 1
    if len(px_ord) and idx[0] < 0:
        raise DataError(
            f"{series.asset_id}: no FX rate at or before first price date {series.dates[0]}"
        )
    return RawPriceSeries(
        asset_id=series.asset_id,
        dates=series.dates,
        prices=series.prices * fx.rates[idx],
    )


def anchor_on_or_after(d: dt.date, anchor_weekday: int) -> dt.date:
    """First date >= d that falls on the anchor weekday."""
    return d + dt.timedelta(days=(anchor_weekday - d.weekday()) % 7)


def anchor_on_or_before(d: dt.date, anchor_weekday: int) -> dt.date:
    return d - dt.timedelta(days=(d.weekday() - anchor_weekday) % 7)


def week_grid_for(start: dt.date, end: dt.date, anchor_weekday: int) -> tuple[dt.date, ...]:
    """All anchor-weekday dates w with start <= w <= end."""
    first = anchor_on_or_after(start, anchor_weekday)
    grid = []
    w = first
    while w <= end:
        grid.append(w)
        w += dt.timedelta(days=7)
    return tuple(grid)


def resample_weekly(
    series: RawPriceSeries,
    anchor: int | str = "sunday",
    grid: tuple[dt.date, ...] | None = None,
) -> WeeklySeries:
    """Collapse a daily series to one observation per calendar week.

    The weekly value on a grid date w is the last daily close in the seven
    days ending at w; weeks without any observation get NaN markers for the
    gap-fill stage.  Without an explicit ``grid`` the grid spans the weeks of
    the first and last observation.
    """
    if len(series.dates) == 0:
        raise DataError(f"{series.asset_id}: empty series")
    wd = WEEKDAY_NAMES[anchor.lower()] if isinstance(anchor, str) else int(anchor)
    if grid is None:
        first = anchor_on_or_after(series.dates[0], wd)
        last = anchor_on_or_after(series.dates[-1], wd)
        grid = week_grid_for(first, last, wd)

    obs_ord = np.array([d.toordinal() for d in series.dates])
    grid_ord = np.array([d.toordinal() for d in grid])
    idx = np.searchsorted(obs_ord, grid_ord, side="right") - 1
    values = np.full(len(grid), np.nan)
    for k, i in enumerate(idx):
        if i >= 0 and grid_ord[k] - obs_ord[i] < 7:
            values[k] = series.prices[i]
    return WeeklySeries(asset_id=series.asset_id, weeks=tuple(grid), values=values)


def locf_fill(values: np.ndarray) -> np.ndarray:
    """Carry the last observation forward over NaN gaps; leading NaN is an error."""
    out = np.array(values, dtype=float)
    if len(out) == 0:
        return out
    if np.isnan(out[0]):
        raise DataError("first observation missing: nothing to carry forward")
    for i in range(1, len(out)):
        if np.isnan(out[i]):
            out[i] = out[i - 1]
    return out


def longest_nan_run(values: np.ndarray) -> int:
    longest = run = 0
    for v in values:
        if np.isnan(v):
            run += 1
            longest = max(longest, run)
        else:
            run = 0
    return longest


def fill_gaps_locf(
    rows: list[WeeklySeries],
    max_consecutive_gap: int = DEFAULT_MAX_GAP,
) -> tuple[PricePanel, list[Exclusion]]:
    """Assemble the dense price panel, excluding assets with long gaps.

    An asset survives when its weekly series starts with an actual
    observation and every missing run is at most ``max_consecutive_gap``
    weeks long; surviving gaps are LOCF-filled.  Excluded assets are
    reported, not raised.
    """
    if not rows:
        raise DataError("no weekly series supplied")
    grid = rows[0].weeks
    for r in rows[1:]:
        if r.weeks != grid:
            raise DataError(f"{r.asset_id}: weekly grid differs from panel grid")

    kept_ids: list[str] = []
    kept_rows: list[np.ndarray] = []
    excluded: list[Exclusion] = []
    for r in rows:
        if np.all(np.isnan(r.values)):
            excluded.append(Exclusion(r.asset_id, "no_observations", len(r.values)))
            continue
        if np.isnan(r.values[0]):
            lead = int(np.argmax(~np.isnan(r.values)))
            excluded.append(Exclusion(r.asset_id, "missing_at_start", lead))
            continue
        gap = longest_nan_run(r.values)
        if gap > max_consecutive_gap:
            excluded.append(Exclusion(r.asset_id, "gap_too_long", gap))
            continue
        kept_ids.append(r.asset_id)
        kept_rows.append(locf_fill(r.values))
    if not kept_ids:
        raise DataError("all assets excluded by the gap rule")
    panel = PricePanel(
        assets=tuple(kept_ids),
        week_grid=grid,
        prices=np.vstack(kept_rows),
    )
    return panel, excluded


def log_returns(panel: PricePanel) -> ReturnPanel:
    """Natural-log weekly returns; week t carries the date of the later price."""
    if panel.prices.shape[1] < 2:
        raise DataError("need at least 2 weeks of prices for returns")
    rets = np.log(panel.prices[:, 1:] / panel.prices[:, :-1])
    return ReturnPanel(assets=panel.assets, weeks=panel.week_grid[1:], returns=rets)


def _stem(path) -> str:
    text = str(path)
    base = text.rsplit("/", 1)[-1]
    return base.rsplit(".", 1)[0] if "." in base else base


def write_panel_csv(panel: PricePanel, path) -> None:
    """Wide CSV: one row per week, one column per asset."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["week", *panel.assets])
        for j, week in enumerate(panel.week_grid):
            writer.writerow([week.isoformat(), *[repr(float(v)) for v in panel.prices[:, j]]])


def read_panel_csv(path) -> PricePanel:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assets = tuple(rows[0][1:])
    weeks = tuple(_parse_date(r[0]) for r in rows[1:])
    prices = np.array([[float(v) for v in r[1:]] for r in rows[1:]]).T
    return PricePanel(assets=assets, week_grid=weeks, prices=prices)


def write_returns_csv(panel: ReturnPanel, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["week", *panel.assets])
        for j, week in enumerate(panel.weeks):
            writer.writerow([week.isoformat(), *[repr(float(v)) for v in panel.returns[:, j]]])


def read_returns_csv(path) -> ReturnPanel:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assets = tuple(rows[0][1:])
    weeks = tuple(_parse_date(r[0]) for r in rows[1:])
    returns = np.array([[float(v) for v in r[1:]] for r in rows[1:]]).T
    return ReturnPanel(assets=assets, weeks=weeks, returns=returns)


def write_exclusions_json(exclusions: list[Exclusion], path) -> None:
    with open(path, "w") as fh:
        json.dump([e.to_dict() for e in exclusions], fh, indent=2, sort_keys=True)
        fh.write("\n")
