"""Pipeline orchestration: config, staged artifacts, manifest.

Each stage persists its outputs as human-diffable CSV/JSON into the output
directory and the next stage reads them back, so running the stages one by
one produces the same files as a single ``run`` (the manifest, which carries
wall-clock timings, is the only exception).
"""

from __future__ import annotations

import csv
import datetime as dt
import glob
import hashlib
import json
import logging
import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from . import ingest, plots, rbf, segmentation, seriation, stats
from .dtw import (
    DistanceMatrix,
    LocalMetric,
    pairwise_matrix,
    read_distance_csv,
    standardize_panel,
    write_distance_csv,
    write_distance_json,
)
from .errors import ConfigError, CoresatError, KinkNotFoundError, PipelineError
from .segmentation import (
    LOWER_KINK_WINDOW,
    UPPER_KINK_WINDOW,
    MetricCore,
    SegmentationResult,
)

log = logging.getLogger("coresat")

ALL_METRICS = ("manhattan", "euclidean", "sqeuclidean")


@dataclass(frozen=True)
class RbfSettings:
    """Surface-model knobs; frame_spacing None means N/6 at fit time."""

    frame_spacing: float | None = None
    residual_p: float = 0.5
    reg_alpha: float = 0.0
    constant_term: bool = True


@dataclass(frozen=True)
class PipelineConfig:
    data_dir: str
    output_dir: str
    date_start: dt.date
    date_end: dt.date
    fx_file: str | None = None
    weekly_anchor: str = "sunday"
    max_gap: int = ingest.DEFAULT_MAX_GAP
    metrics: tuple[str, ...] = ALL_METRICS
    standardize: bool = True
    rbf: RbfSettings = field(default_factory=RbfSettings)
    kink_mode: str = "upper"
    kink_window: tuple[float, float] | None = None
    fixed_p: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.date_start >= self.date_end:
            raise ConfigError(f"empty date window: {self.date_start}..{self.date_end}")
        if self.weekly_anchor.lower() not in ingest.WEEKDAY_NAMES:
            raise ConfigError(f"unknown weekly_anchor '{self.weekly_anchor}'")
        if self.max_gap < 0:
            raise ConfigError(f"max_gap must be >= 0, got {self.max_gap}")
        if not self.metrics:
            raise ConfigError("metrics list must not be empty")
        for m in self.metrics:
            try:
                LocalMetric.from_name(m)
            except CoresatError as exc:
                raise ConfigError(str(exc)) from exc
        if not 0.0 < self.rbf.residual_p < 1.0:
            raise ConfigError(f"rbf.residual_p must be in (0, 1), got {self.rbf.residual_p}")
        if not 0.0 <= self.rbf.reg_alpha < 100.0:
            raise ConfigError(f"rbf.reg_alpha must be in [0, 100), got {self.rbf.reg_alpha}")
        if self.rbf.frame_spacing is not None and self.rbf.frame_spacing <= 0.0:
            raise ConfigError("rbf.frame_spacing must be positive")
        if self.kink_mode not in ("upper", "lower"):
            raise ConfigError(f"kink_mode must be 'upper' or 'lower', got '{self.kink_mode}'")
        if self.kink_window is not None:
            lo, hi = self.kink_window
            if not 0.0 < lo < hi < 1.0:
                raise ConfigError(f"invalid kink_window {self.kink_window}")
        for m, p in self.fixed_p.items():
            try:
                LocalMetric.from_name(m)
            except CoresatError as exc:
                raise ConfigError(str(exc)) from exc
            if not 0.0 < p < 1.0:
                raise ConfigError(f"fixed p for {m} must be in (0, 1), got {p}")

    @property
    def effective_kink_window(self) -> tuple[float, float]:
        if self.kink_window is not None:
            return self.kink_window
        return UPPER_KINK_WINDOW if self.kink_mode == "upper" else LOWER_KINK_WINDOW

    def to_dict(self) -> dict:
        return {
            "data_dir": self.data_dir,
            "output_dir": self.output_dir,
            "date_window": {"start": self.date_start.isoformat(), "end": self.date_end.isoformat()},
            "fx_file": self.fx_file,
            "weekly_anchor": self.weekly_anchor,
            "max_gap": self.max_gap,
            "metrics": list(self.metrics),
            "standardize": self.standardize,
            "rbf": {
                "frame_spacing": self.rbf.frame_spacing,
                "residual_p": self.rbf.residual_p,
                "reg_alpha": self.rbf.reg_alpha,
                "constant_term": self.rbf.constant_term,
            },
            "kink": {"mode": self.kink_mode, "window": list(self.effective_kink_window)},
            "fixed_p": dict(self.fixed_p),
        }

    @classmethod
    def from_dict(cls, raw: dict, base_dir: str = ".") -> "PipelineConfig":
        known = {
            "data_dir", "output_dir", "date_window", "fx_file", "weekly_anchor",
            "max_gap", "metrics", "standardize", "rbf", "kink", "fixed_p",
        }
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for key in ("data_dir", "output_dir", "date_window"):
            if key not in raw:
                raise ConfigError(f"missing required config key '{key}'")
        window = raw["date_window"]
        try:
            start = _as_date(window["start"])
            end = _as_date(window["end"])
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad date_window: {exc}") from exc
        rbf_raw = raw.get("rbf", {}) or {}
        unknown = set(rbf_raw) - {"frame_spacing", "residual_p", "reg_alpha", "constant_term"}
        if unknown:
            raise ConfigError(f"unknown rbf config keys: {sorted(unknown)}")
        kink_raw = raw.get("kink", {}) or {}
        unknown = set(kink_raw) - {"mode", "window"}
        if unknown:
            raise ConfigError(f"unknown kink config keys: {sorted(unknown)}")
        window_setting = kink_raw.get("window")
        return cls(
            data_dir=_resolve(base_dir, raw["data_dir"]),
            output_dir=_resolve(base_dir, raw["output_dir"]),
            date_start=start,
            date_end=end,
            fx_file=_resolve(base_dir, raw["fx_file"]) if raw.get("fx_file") else None,
            weekly_anchor=raw.get("weekly_anchor", "sunday"),
            max_gap=int(raw.get("max_gap", ingest.DEFAULT_MAX_GAP)),
            metrics=tuple(raw.get("metrics", ALL_METRICS)),
            standardize=bool(raw.get("standardize", True)),
            rbf=RbfSettings(
                frame_spacing=rbf_raw.get("frame_spacing"),
                residual_p=float(rbf_raw.get("residual_p", 0.5)),
                reg_alpha=float(rbf_raw.get("reg_alpha", 0.0)),
                constant_term=bool(rbf_raw.get("constant_term", True)),
            ),
            kink_mode=kink_raw.get("mode", "upper"),
            kink_window=tuple(float(x) for x in window_setting) if window_setting else None,
            fixed_p={k: float(v) for k, v in (raw.get("fixed_p") or {}).items()},
        )

    @classmethod
    def from_yaml(cls, path) -> "PipelineConfig":
        import yaml

        with open(path) as fh:
            raw = yaml.safe_load(fh)
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: config must be a mapping")
        return cls.from_dict(raw, base_dir=os.path.dirname(os.path.abspath(path)))


EXAMPLE_CONFIG = """\
# coresat pipeline configuration (all defaults shown)
data_dir: data/prices        # one CSV per asset: columns date, close
fx_file: data/fx.csv         # optional: columns date, rate; omit to skip conversion
output_dir: out
date_window:
  start: 2014-01-01
  end: 2019-06-01
weekly_anchor: sunday        # week-end day for resampling
max_gap: 4                   # longest LOCF-fillable run; longer gaps exclude the asset
metrics: [manhattan, euclidean, sqeuclidean]
standardize: true            # pooled z-scoring of (mean, std, alpha) before DTW
rbf:
  frame_spacing: null        # center spacing R; null = N/6
  residual_p: 0.5            # kernel value at distance R
  reg_alpha: 0.0             # Tikhonov weight, [0, 100)
  constant_term: true
kink:
  mode: upper                # upper = core kink; lower = tight-core kink
  window: [0.60, 0.90]       # probability window searched for the kink
fixed_p: {}                  # e.g. {sqeuclidean: 0.75} to override kink detection
"""


def _as_date(v) -> dt.date:
    if isinstance(v, dt.date):
        return v
    return dt.date.fromisoformat(str(v))


def _resolve(base_dir: str, path: str) -> str:
    return path if os.path.isabs(path) else os.path.normpath(os.path.join(base_dir, path))


def _out(cfg: PipelineConfig, name: str) -> str:
    return os.path.join(cfg.output_dir, name)


def _require(cfg: PipelineConfig, name: str, produced_by: str) -> str:
    path = _out(cfg, name)
    if not os.path.exists(path):
        raise PipelineError(f"missing artifact '{name}': run the '{produced_by}' stage first")
    return path


def _input_files(cfg: PipelineConfig) -> list[str]:
    files = sorted(glob.glob(os.path.join(cfg.data_dir, "*.csv")))
    if cfg.fx_file:
        files.append(cfg.fx_file)
    return files


def stage_ingest(cfg: PipelineConfig) -> ingest.PricePanel:
    """Prices + FX -> dense weekly panel, log returns, exclusion report."""
    os.makedirs(cfg.output_dir, exist_ok=True)
    paths = sorted(glob.glob(os.path.join(cfg.data_dir, "*.csv")))
    if not paths:
        raise PipelineError(f"[ingest] no price CSVs found in {cfg.data_dir}")
    fx = ingest.parse_fx_csv(cfg.fx_file) if cfg.fx_file else None
    anchor = ingest.WEEKDAY_NAMES[cfg.weekly_anchor.lower()]
    grid = ingest.week_grid_for(cfg.date_start, cfg.date_end, anchor)
    if len(grid) < 2:
        raise PipelineError(f"[ingest] date window {cfg.date_start}..{cfg.date_end} spans < 2 weeks")

    rows = []
    for path in paths:
        try:
            series = ingest.parse_price_csv(path)
            series = _clip_window(series, cfg.date_start, cfg.date_end)
            if len(series.dates) == 0:
                # nothing inside the window: an all-NaN row, excluded downstream
                rows.append(ingest.WeeklySeries(series.asset_id, grid, np.full(len(grid), np.nan)))
                continue
            if fx is not None:
                series = ingest.convert_currency(series, fx)
            rows.append(ingest.resample_weekly(series, anchor, grid))
        except CoresatError as exc:
            raise PipelineError(f"[ingest] {exc}") from exc
    panel, exclusions = ingest.fill_gaps_locf(rows, cfg.max_gap)
    returns = ingest.log_returns(panel)

    ingest.write_exclusions_json(exclusions, _out(cfg, "exclusions.json"))
    ingest.write_panel_csv(panel, _out(cfg, "panel_prices.csv"))
    ingest.write_returns_csv(returns, _out(cfg, "returns.csv"))
    log.info("ingest: %d assets kept, %d excluded, %d weeks", len(panel.assets), len(exclusions), len(grid))
    return panel


def _clip_window(series: ingest.RawPriceSeries, start: dt.date, end: dt.date) -> ingest.RawPriceSeries:
    keep = [i for i, d in enumerate(series.dates) if start <= d <= end]
    return ingest.RawPriceSeries(
        series.asset_id,
        tuple(series.dates[i] for i in keep),
        series.prices[keep],
    )


def stage_stats(cfg: PipelineConfig) -> list[stats.SampleVectorSeries]:
    """Weekly returns -> per-asset, per-year sample vectors."""
    path = _require(cfg, "returns.csv", "ingest")
    returns = ingest.read_returns_csv(path)
    try:
        series = stats.build_sample_series(returns)
    except CoresatError as exc:
        raise PipelineError(f"[stats] {exc}") from exc
    stats.write_sample_vectors_csv(series, _out(cfg, "sample_vectors.csv"))
    log.info("stats: %d assets x %d years", len(series), len(series[0].vectors))
    return series


def stage_dtw(cfg: PipelineConfig, only_metric: str | None = None) -> dict[str, DistanceMatrix]:
    """Sample vectors -> one DTW distance matrix per configured metric."""
    path = _require(cfg, "sample_vectors.csv", "stats")
    series = stats.read_sample_vectors_csv(path)
    if cfg.standardize:
        series = standardize_panel(series)
    names = [only_metric] if only_metric else list(cfg.metrics)
    out: dict[str, DistanceMatrix] = {}
    for name in names:
        metric = LocalMetric.from_name(name)
        try:
            dm = pairwise_matrix(series, metric)
        except CoresatError as exc:
            raise PipelineError(f"[dtw] {metric.value}: {exc}") from exc
        write_distance_csv(dm, _out(cfg, f"distance_{metric.value}.csv"))
        write_distance_json(dm, _out(cfg, f"distance_{metric.value}.json"))
        out[metric.value] = dm
        log.info("dtw: %s matrix %dx%d", metric.value, len(dm.labels), len(dm.labels))
    return out


def stage_segment(cfg: PipelineConfig) -> list[MetricCore]:
    """Distance matrices -> seriated surfaces, thresholds, per-metric cores."""
    cores: list[MetricCore] = []
    for name in cfg.metrics:
        metric = LocalMetric.from_name(name)
        path = _require(cfg, f"distance_{metric.value}.csv", "dtw")
        dm = read_distance_csv(path, metric)
        try:
            sm = seriation.seriate(dm)
            n = sm.size
            spacing = cfg.rbf.frame_spacing if cfg.rbf.frame_spacing is not None else n / 6.0
            centers = rbf.frame_centers(n, spacing)
            shape = rbf.shape_from_residual(spacing, cfg.rbf.residual_p)
            sample = rbf.SurfaceSample.from_seriated(sm)
            model = rbf.fit(sample, centers, shape, cfg.rbf.reg_alpha, cfg.rbf.constant_term)
            curve = segmentation.ecdf_upper_triangle(sm)
            if metric.value in cfg.fixed_p:
                p_used = cfg.fixed_p[metric.value]
                kink = None
            else:
                kink = segmentation.detect_kink(curve, cfg.effective_kink_window)
                p_used = kink.p
            d_bound = segmentation.threshold(curve, p_used)
            core = segmentation.core_block(model, sm, d_bound, metric, p_used)
        except KinkNotFoundError as exc:
            raise PipelineError(
                f"[segment] {metric.value}: {exc} (use fixed_p or --p {metric.value}=VALUE)"
            ) from exc
        except CoresatError as exc:
            raise PipelineError(f"[segment] {metric.value}: {exc}") from exc

        seriation.write_seriated_csv(sm, _out(cfg, f"seriated_{metric.value}.csv"))
        rbf.write_model_json(model, _out(cfg, f"rbf_model_{metric.value}.json"))
        _write_surface_csv(rbf.evaluate_grid(model, n), _out(cfg, f"surface_{metric.value}.csv"))
        _write_ecdf_csv(curve, _out(cfg, f"ecdf_{metric.value}.csv"))
        with open(_out(cfg, f"core_{metric.value}.json"), "w") as fh:
            json.dump(core.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

        plots.save_heatmap(sm, _out(cfg, f"heatmap_{metric.value}.svg"), title=f"seriated DTW distances ({metric.value})")
        plots.save_surface_contours(
            model, n, _out(cfg, f"surface_{metric.value}.svg"),
            d_bound=d_bound, title=f"modeled surface ({metric.value})",
        )
        plots.save_ecdf(
            curve, _out(cfg, f"ecdf_{metric.value}.svg"),
            kink=kink, window=cfg.effective_kink_window,
            title=f"distance ECDF ({metric.value})",
        )
        cores.append(core)
        log.info(
            "segment: %s p=%.3f d_bound=%.4f core=%d/%d",
            metric.value, p_used, d_bound, len(core.core_ids), n,
        )
    return cores


def stage_report(cfg: PipelineConfig) -> SegmentationResult:
    """Per-metric cores -> intersection labeling in Table form."""
    cores = []
    for name in cfg.metrics:
        metric = LocalMetric.from_name(name)
        path = _require(cfg, f"core_{metric.value}.json", "segment")
        with open(path) as fh:
            cores.append(MetricCore.from_dict(json.load(fh)))
    try:
        result = segmentation.intersect(cores)
    except CoresatError as exc:
        raise PipelineError(f"[report] {exc}") from exc
    segmentation.write_report_csv(result, _out(cfg, "report.csv"))
    segmentation.write_report_json(result, _out(cfg, "report.json"))
    log.info(
        "report: %d core / %d satellite",
        len(result.intersection_core), len(result.satellite),
    )
    return result


@dataclass(frozen=True)
class RunManifest:
    config: dict
    inputs: dict[str, str]
    stages: list[dict]
    artifacts: dict[str, str]
    version: str = __version__

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "inputs": self.inputs,
            "stages": self.stages,
            "artifacts": self.artifacts,
            "version": self.version,
        }


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(cfg: PipelineConfig, stage_timings: list[dict]) -> RunManifest:
    artifacts = {}
    for path in sorted(glob.glob(os.path.join(cfg.output_dir, "*"))):
        name = os.path.basename(path)
        if name == "run_manifest.json" or os.path.isdir(path):
            continue
        artifacts[name] = _sha256(path)
    manifest = RunManifest(
        config=cfg.to_dict(),
        inputs={os.path.basename(p): _sha256(p) for p in _input_files(cfg)},
        stages=stage_timings,
        artifacts=artifacts,
    )
    with open(_out(cfg, "run_manifest.json"), "w") as fh:
        json.dump(manifest.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


STAGES = (
    ("ingest", stage_ingest),
    ("stats", stage_stats),
    ("dtw", stage_dtw),
    ("segment", stage_segment),
    ("report", stage_report),
)


def run(cfg: PipelineConfig) -> SegmentationResult:
    """Execute every stage in order and write the run manifest."""
    timings = []
    result: SegmentationResult | None = None
    for name, fn in STAGES:
        t0 = time.perf_counter()
        out = fn(cfg)
        timings.append({"stage": name, "seconds": round(time.perf_counter() - t0, 6)})
        if name == "report":
            result = out
    write_manifest(cfg, timings)
    assert result is not None
    return result


def _write_surface_csv(grid: np.ndarray, path) -> None:
    n = grid.shape[0]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row", *[str(j) for j in range(1, n + 1)]])
        for i in range(n):
            writer.writerow([str(i + 1), *[repr(float(v)) for v in grid[i]]])


def _write_ecdf_csv(curve: segmentation.EcdfCurve, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["value", "probability"])
        for v, p in zip(curve.sorted_values, curve.probabilities):
            writer.writerow([repr(float(v)), repr(float(p))])
