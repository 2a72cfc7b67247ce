"""Core/satellite segmentation of an asset universe.

The pipeline tracks each asset's yearly (mean return, volatility, stable
tail index) vector, compares assets by dynamic time warping under three
metrics, and extracts the statistically homogeneous core from a seriated,
RBF-smoothed distance surface via an ECDF-derived threshold.
"""

__version__ = "0.1.0"

from .dtw import (
    DistanceMatrix,
    LocalMetric,
    dtw_distance,
    dtw_distance_brute,
    local_cost,
    local_cost_matrix,
    pairwise_matrix,
    standardize_panel,
)
from .errors import (
    ConfigError,
    CoresatError,
    DataError,
    DegenerateDataError,
    KinkNotFoundError,
    PipelineError,
    SingularSystemError,
)
from .ingest import (
    FxSeries,
    PricePanel,
    RawPriceSeries,
    ReturnPanel,
    WeeklySeries,
    convert_currency,
    fill_gaps_locf,
    log_returns,
    parse_fx_csv,
    parse_price_csv,
    resample_weekly,
)
from .pipeline import PipelineConfig, RbfSettings, RunManifest, run
from .rbf import (
    RbfModel,
    SurfaceSample,
    evaluate,
    evaluate_grid,
    fit,
    frame_centers,
    shape_from_residual,
)
from .segmentation import (
    EcdfCurve,
    MetricCore,
    SegmentationResult,
    core_block,
    detect_kink,
    ecdf_upper_triangle,
    intersect,
    threshold,
)
from .seriation import SeriatedMatrix, normalize_minmax, order_by_mean_distance, seriate
from .stable import StableParams, cms_sample, mcculloch_alpha
from .stats import (
    SampleVector,
    SampleVectorSeries,
    annual_buckets,
    build_sample_series,
    fit_tail_alpha,
    mean_and_std,
)
from .synthetic import PlantedUniverse, build_planted_universe

__all__ = [
    "__version__",
    "ConfigError", "CoresatError", "DataError", "DegenerateDataError",
    "KinkNotFoundError", "PipelineError", "SingularSystemError",
    "RawPriceSeries", "FxSeries", "WeeklySeries", "PricePanel", "ReturnPanel",
    "parse_price_csv", "parse_fx_csv", "convert_currency", "resample_weekly",
    "fill_gaps_locf", "log_returns",
    "StableParams", "cms_sample", "mcculloch_alpha",
    "SampleVector", "SampleVectorSeries", "annual_buckets", "mean_and_std",
    "fit_tail_alpha", "build_sample_series",
    "LocalMetric", "DistanceMatrix", "local_cost", "local_cost_matrix",
    "dtw_distance", "dtw_distance_brute", "pairwise_matrix", "standardize_panel",
    "SeriatedMatrix", "order_by_mean_distance", "normalize_minmax", "seriate",
    "RbfModel", "SurfaceSample", "frame_centers", "shape_from_residual",
    "fit", "evaluate", "evaluate_grid",
    "EcdfCurve", "MetricCore", "SegmentationResult", "ecdf_upper_triangle",
    "detect_kink", "threshold", "core_block", "intersect",
    "PipelineConfig", "RbfSettings", "RunManifest", "run",
    "PlantedUniverse", "build_planted_universe",
]
