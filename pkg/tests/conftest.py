import numpy as np
import pytest

from coresat.pipeline import PipelineConfig
from coresat.stats import SampleVector, SampleVectorSeries
from coresat.synthetic import build_planted_universe, WINDOW_END, WINDOW_START

# Published four-asset reference panel: yearly (mean %, std %, alpha) for
# 2014..2019.  DMD/FRC behave very differently from each other, XPM/ZET are
# near-twins; every pipeline that standardizes and warps these must rank
# d(XPM, ZET) far below d(DMD, FRC).
REFERENCE_PANEL = {
    "DMD": {
        "mean": [-4.52, 1.67, -0.73, 8.46, -5.50, 0.85],
        "std": [28.12, 22.96, 9.65, 20.00, 14.37, 16.48],
        "alpha": [1.81, 1.18, 2.00, 2.00, 1.30, 2.00],
    },
    "FRC": {
        "mean": [-7.10, -1.62, -0.25, 5.92, -1.97, 5.05],
        "std": [18.74, 20.27, 59.19, 44.84, 29.43, 104.04],
        "alpha": [2.00, 1.44, 0.63, 1.18, 1.51, 0.90],
    },
    "XPM": {
        "mean": [-7.27, -0.38, -0.58, 5.38, -2.98, 0.70],
        "std": [15.58, 24.28, 8.66, 26.47, 22.84, 13.35],
        "alpha": [1.67, 1.65, 1.79, 1.63, 1.76, 1.57],
    },
    "ZET": {
        "mean": [-5.74, 0.16, 0.51, 2.88, -3.73, 1.11],
        "std": [28.72, 24.63, 16.39, 35.35, 20.14, 24.01],
        "alpha": [1.65, 1.68, 1.72, 1.74, 1.83, 1.80],
    },
}
REFERENCE_YEARS = (2014, 2015, 2016, 2017, 2018, 2019)


def reference_series(asset_id: str) -> SampleVectorSeries:
    row = REFERENCE_PANEL[asset_id]
    vectors = tuple(
        SampleVector(
            year=y,
            mean_return=row["mean"][i],
            std_dev=row["std"][i],
            tail_alpha=row["alpha"][i],
        )
        for i, y in enumerate(REFERENCE_YEARS)
    )
    return SampleVectorSeries(asset_id=asset_id, vectors=vectors)


@pytest.fixture(scope="session")
def reference_panel_series() -> list[SampleVectorSeries]:
    return [reference_series(a) for a in ("DMD", "FRC", "XPM", "ZET")]


def random_series(rng: np.random.Generator, asset_id: str, t: int, start_year: int = 2014) -> SampleVectorSeries:
    """Random but valid sample-vector series for property tests."""
    vectors = tuple(
        SampleVector(
            year=start_year + i,
            mean_return=float(rng.normal(0.0, 5.0)),
            std_dev=float(rng.uniform(5.0, 60.0)),
            tail_alpha=float(rng.uniform(0.6, 2.0)),
        )
        for i in range(t)
    )
    return SampleVectorSeries(asset_id=asset_id, vectors=vectors)


@pytest.fixture(scope="session")
def planted(tmp_path_factory) -> dict:
    """Planted-core universe on disk plus the config to run it."""
    root = tmp_path_factory.mktemp("planted")
    uni = build_planted_universe(root)
    cfg = PipelineConfig(
        data_dir=uni.data_dir,
        output_dir=str(root / "out"),
        date_start=WINDOW_START,
        date_end=WINDOW_END,
        fx_file=uni.fx_file,
    )
    return {"universe": uni, "config": cfg, "root": root}


@pytest.fixture(scope="session")
def planted_run(planted) -> dict:
    """The planted universe plus a completed pipeline run over it."""
    from coresat.pipeline import run

    result = run(planted["config"])
    return {**planted, "result": result}
