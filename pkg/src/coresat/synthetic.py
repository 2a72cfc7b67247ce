"""Synthetic asset universe with a planted core, written as ingestible CSVs.

Twenty assets share one yearly profile of (mean, std, tail index) up to small
jitter; seven follow individually divergent profiles (volatility explosions,
tail-index flips, drift swings); two optional extras carry long data gaps so
the exclusion rule has something to bite on.  Weekly log returns are drawn
from stable laws per the profile, cumulated into weekly prices and spread
onto a Tue/Fri/Sun daily pattern, with a weekday-only FX series alongside.
"""

from __future__ import annotations

import csv
import datetime as dt
import math
import os
from dataclasses import dataclass

import numpy as np

from .ingest import week_grid_for, WEEKDAY_NAMES
from .stable import cms_sample

DEFAULT_SEED = 31415
WINDOW_START = dt.date(2014, 1, 1)
WINDOW_END = dt.date(2019, 6, 1)
YEARS = (2014, 2015, 2016, 2017, 2018, 2019)

# yearly (mean %, std %, alpha) shared by every core asset before jitter
CORE_PROFILE = (
    (-6.0, 20.0, 1.70),
    (0.0, 24.0, 1.65),
    (0.5, 12.0, 1.75),
    (4.0, 30.0, 1.70),
    (-3.0, 21.0, 1.80),
    (1.0, 18.0, 1.70),
)

# seven individually divergent profiles: vol spikes, tail flips, drift swings;
# most years sit at levels outside the core envelope, which warping cannot align away
OUTSIDER_PROFILES = (
    ((-12.0, 45.0, 1.90), (9.0, 38.0, 0.90), (-8.0, 6.0, 2.00), (14.0, 5.0, 2.00), (-10.0, 42.0, 1.10), (7.0, 48.0, 2.00)),
    ((-9.0, 19.0, 2.00), (-2.0, 20.0, 1.45), (1.0, 59.0, 0.65), (7.0, 45.0, 1.20), (-3.0, 29.0, 1.50), (6.0, 104.0, 0.90)),
    ((14.0, 95.0, 0.80), (-11.0, 70.0, 1.00), (9.0, 50.0, 1.10), (0.5, 5.0, 2.00), (0.3, 4.0, 2.00), (0.4, 4.0, 2.00)),
    ((5.0, 6.0, 2.00), (-8.0, 55.0, 0.70), (6.0, 7.0, 2.00), (-9.0, 60.0, 0.70), (5.0, 6.0, 2.00), (-8.0, 50.0, 0.70)),
    ((18.0, 38.0, 1.30), (-14.0, 42.0, 1.35), (12.0, 36.0, 1.25), (-11.0, 40.0, 1.40), (15.0, 39.0, 1.30), (-13.0, 44.0, 1.35)),
    ((0.8, 4.0, 2.00), (1.2, 5.0, 2.00), (0.6, 6.0, 1.90), (-10.0, 75.0, 0.90), (11.0, 90.0, 0.75), (-9.0, 100.0, 0.70)),
    ((-13.0, 60.0, 1.00), (7.0, 7.0, 1.95), (-12.0, 65.0, 0.85), (8.0, 6.0, 1.90), (-14.0, 70.0, 0.80), (9.0, 8.0, 1.85)),
)

# weekly log returns are capped so cumulated prices stay representable
RETURN_CAP = 2.5


@dataclass(frozen=True)
class PlantedUniverse:
    data_dir: str
    fx_file: str
    core_ids: tuple[str, ...]
    outsider_ids: tuple[str, ...]
    excluded_ids: tuple[str, ...]

    @property
    def all_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.core_ids + self.outsider_ids))


def _weekly_returns(profile, weeks, rng: np.random.Generator) -> np.ndarray:
    """One capped stable draw per week, parameters switching by calendar year."""
    by_year = dict(zip(YEARS, profile))
    out = np.empty(len(weeks))
    for i, w in enumerate(weeks):
        mean_pct, std_pct, alpha = by_year[w.year]
        gamma = (std_pct / 100.0) / math.sqrt(2.0)
        draw = cms_sample(alpha, 0.0, gamma, mean_pct / 100.0, 1, rng)[0]
        out[i] = float(np.clip(draw, -RETURN_CAP, RETURN_CAP))
    return out


def _jitter_profile(profile, rng: np.random.Generator):
    jittered = []
    for mean_pct, std_pct, alpha in profile:
        jittered.append(
            (
                mean_pct + rng.uniform(-0.4, 0.4),
                std_pct * math.exp(rng.uniform(-0.06, 0.06)),
                float(np.clip(alpha + rng.uniform(-0.04, 0.04), 0.6, 2.0)),
            )
        )
    return tuple(jittered)


def _write_price_csv(path, weeks, weekly_prices, skip_weeks: set[int] | None = None) -> None:
    """Spread weekly closes onto Tue/Fri/Sun observations via geometric interpolation."""
    skip_weeks = skip_weeks or set()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "close"])
        prev = weekly_prices[0]
        for i, (week, price) in enumerate(zip(weeks, weekly_prices)):
            if i in skip_weeks:
                prev = price
                continue
            ratio = price / prev if prev > 0 else 1.0
            for offset, frac in ((-5, 2.0 / 7.0), (-2, 5.0 / 7.0), (0, 1.0)):
                d = week + dt.timedelta(days=offset)
                if d < WINDOW_START or d > WINDOW_END:
                    continue
                value = prev * ratio**frac
                writer.writerow([d.isoformat(), repr(float(value))])
            prev = price


def _write_fx_csv(path, start: dt.date, end: dt.date) -> None:
    """Weekday-only USD->EUR style rates with a slow sinusoidal drift."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "rate"])
        d = start
        k = 0
        while d <= end:
            if d.weekday() < 5:
                rate = 0.90 + 0.004 * math.sin(2.0 * math.pi * k / 250.0)
                writer.writerow([d.isoformat(), repr(rate)])
                k += 1
            d += dt.timedelta(days=1)


def build_planted_universe(
    out_dir,
    seed: int = DEFAULT_SEED,
    n_core: int = 20,
    with_gap_assets: bool = True,
) -> PlantedUniverse:
    """Write the synthetic universe under ``out_dir`` and describe it.

    Produces ``out_dir/prices/<ID>.csv`` for every asset plus
    ``out_dir/fx.csv``.  Core assets are named C01.., divergent ones X01..;
    gap-ridden extras G01/G02 carry a seven-week observation hole and should
    be excluded by ingestion.
    """
    rng = np.random.default_rng(seed)
    prices_dir = os.path.join(out_dir, "prices")
    os.makedirs(prices_dir, exist_ok=True)

    anchor = WEEKDAY_NAMES["sunday"]
    weeks = week_grid_for(WINDOW_START, WINDOW_END, anchor)

    core_ids = tuple(f"C{i + 1:02d}" for i in range(n_core))
    outsider_ids = tuple(f"X{i + 1:02d}" for i in range(len(OUTSIDER_PROFILES)))
    excluded_ids = ("G01", "G02") if with_gap_assets else ()

    for asset in core_ids:
        profile = _jitter_profile(CORE_PROFILE, rng)
        rets = _weekly_returns(profile, weeks, rng)
        prices = 100.0 * np.exp(np.cumsum(rets))
        _write_price_csv(os.path.join(prices_dir, f"{asset}.csv"), weeks, prices)

    for asset, profile in zip(outsider_ids, OUTSIDER_PROFILES):
        rets = _weekly_returns(profile, weeks, rng)
        prices = 100.0 * np.exp(np.cumsum(rets))
        _write_price_csv(os.path.join(prices_dir, f"{asset}.csv"), weeks, prices)

    for idx, asset in enumerate(excluded_ids):
        profile = _jitter_profile(CORE_PROFILE, rng)
        rets = _weekly_returns(profile, weeks, rng)
        prices = 100.0 * np.exp(np.cumsum(rets))
        hole_start = 40 + 30 * idx
        skip = set(range(hole_start, hole_start + 7))
        _write_price_csv(os.path.join(prices_dir, f"{asset}.csv"), weeks, prices, skip_weeks=skip)

    fx_file = os.path.join(out_dir, "fx.csv")
    _write_fx_csv(fx_file, WINDOW_START - dt.timedelta(days=7), WINDOW_END)

    return PlantedUniverse(
        data_dir=prices_dir,
        fx_file=fx_file,
        core_ids=core_ids,
        outsider_ids=outsider_ids,
        excluded_ids=excluded_ids,
    )
