import numpy as np
import pytest

from coresat.dtw import DistanceMatrix, LocalMetric
from coresat.errors import DataError, KinkNotFoundError
from coresat.rbf import RbfModel, SurfaceSample, fit, frame_centers, shape_from_residual
from coresat.segmentation import (
    EcdfCurve,
    MetricCore,
    core_block,
    detect_kink,
    ecdf_of_values,
    ecdf_upper_triangle,
    intersect,
    threshold,
    write_report_csv,
)
from coresat.seriation import seriate


def seriated_from(d):
    d = np.asarray(d, dtype=float)
    labels = tuple(f"A{i:02d}" for i in range(d.shape[0]))
    return seriate(DistanceMatrix(labels, d, LocalMetric.EUCLIDEAN))


def flat_model(height: float) -> RbfModel:
    return RbfModel(
        centers=np.array([[0.0, 0.0]]),
        weights=np.array([0.0]),
        shape=1.0,
        reg_alpha=0.0,
        has_constant_term=True,
        constant=height,
    )


def two_slope_curve(breakpoint_p=0.75, k=400):
    """Piecewise-linear ECDF: steep slope 5 up to the breakpoint, then 0.5."""
    probs = np.arange(1, k + 1) / k
    v_break = breakpoint_p / 5.0
    values = np.where(probs <= breakpoint_p, probs / 5.0, v_break + (probs - breakpoint_p) * 2.0)
    return EcdfCurve(sorted_values=values, probabilities=probs)


class TestEcdf:
    def test_pair_count_27_assets(self):
        rng = np.random.default_rng(0)
        d = rng.uniform(0.1, 1.0, size=(27, 27))
        d = (d + d.T) / 2.0
        np.fill_diagonal(d, 0.0)
        curve = ecdf_upper_triangle(seriated_from(d))
        assert len(curve.sorted_values) == 27 * 26 // 2 == 351

    def test_all_equal_entries_step_function(self):
        d = np.full((5, 5), 4.0)
        np.fill_diagonal(d, 0.0)
        curve = ecdf_upper_triangle(seriated_from(d))
        assert np.all(curve.sorted_values == 1.0)  # normalized
        assert curve.probabilities[-1] == 1.0

    def test_matches_sort_oracle(self):
        rng = np.random.default_rng(1)
        d = rng.uniform(0.0, 5.0, size=(8, 8))
        d = (d + d.T) / 2.0
        np.fill_diagonal(d, 0.0)
        sm = seriated_from(d)
        curve = ecdf_upper_triangle(sm)
        oracle = sorted(sm.d_norm[i, j] for i in range(8) for j in range(i + 1, 8))
        assert np.allclose(curve.sorted_values, oracle, atol=1e-15)


class TestThreshold:
    def test_uniform_grid(self):
        values = np.arange(1, 101) / 100.0
        curve = ecdf_of_values(values)
        assert threshold(curve, 0.75) == pytest.approx(0.75)

    def test_near_one_boundary_excludes_largest(self):
        values = np.arange(1, 101) / 100.0
        curve = ecdf_of_values(values)
        k = len(values)
        assert threshold(curve, 1.0 - 1.0 / k) == pytest.approx(0.99)

    def test_invalid_p(self):
        curve = ecdf_of_values(np.array([0.1, 0.2]))
        with pytest.raises(DataError):
            threshold(curve, 0.0)
        with pytest.raises(DataError):
            threshold(curve, 1.0)

    def test_quantile_consistency(self):
        rng = np.random.default_rng(2)
        values = np.sort(rng.uniform(0.0, 1.0, 97))
        curve = ecdf_of_values(values)
        for p in rng.uniform(0.02, 0.98, 25):
            t = threshold(curve, p)
            ecdf_at = np.searchsorted(values, t, side="right") / len(values)
            assert ecdf_at >= p
            prev = values[np.searchsorted(values, t) - 1]
            prev_ecdf = np.searchsorted(values, prev, side="right") / len(values)
            assert prev_ecdf < p


class TestDetectKink:
    def test_two_slope_breakpoint(self):
        kink = detect_kink(two_slope_curve(0.75))
        assert kink.p == pytest.approx(0.75, abs=0.01)

    def test_breakpoint_outside_centre_still_found(self):
        kink = detect_kink(two_slope_curve(0.8))
        assert kink.p == pytest.approx(0.8, abs=0.01)

    def test_strictly_linear_curve_raises(self):
        values = np.arange(1, 101) / 100.0
        with pytest.raises(KinkNotFoundError, match="explicit p"):
            detect_kink(ecdf_of_values(values))

    def test_flat_window_raises(self):
        values = np.concatenate([np.linspace(0.0, 0.2, 60), np.full(40, 0.2)])
        with pytest.raises(KinkNotFoundError):
            detect_kink(ecdf_of_values(values))

    def test_lower_window_finds_early_kink(self):
        # steep slope through p=0.2, then flat: the tight-core variant
        probs = np.arange(1, 401) / 400
        values = np.where(probs <= 0.2, probs / 10.0, 0.02 + (probs - 0.2) * 1.2)
        kink = detect_kink(EcdfCurve(values, probs), search_window=(0.05, 0.40))
        assert kink.p == pytest.approx(0.2, abs=0.01)

    def test_invalid_window(self):
        with pytest.raises(DataError):
            detect_kink(two_slope_curve(), search_window=(0.9, 0.6))


class TestCoreBlock:
    def make_sm(self, n=6):
        rng = np.random.default_rng(3)
        d = rng.uniform(0.3, 1.0, size=(n, n))
        d = (d + d.T) / 2.0
        np.fill_diagonal(d, 0.0)
        return seriated_from(d)

    def test_low_surface_everything_core(self):
        sm = self.make_sm()
        core = core_block(flat_model(0.1), sm, 0.357, LocalMetric.SQEUCLIDEAN, p_used=0.75)
        assert core.core_ids == sm.labels
        assert not core.is_empty

    def test_high_surface_empty_core(self):
        sm = self.make_sm()
        core = core_block(flat_model(0.9), sm, 0.357, LocalMetric.SQEUCLIDEAN, p_used=0.75)
        assert core.core_ids == ()
        assert core.is_empty

    def test_monotone_in_d_bound(self):
        rng = np.random.default_rng(4)
        sm = self.make_sm(10)
        centers = frame_centers(10, 10 / 6.0)
        shape = shape_from_residual(10 / 6.0, 0.5)
        model = fit(SurfaceSample.from_seriated(sm), centers, shape, 0.0, True)
        sizes = []
        for db in (0.1, 0.3, 0.5, 0.7, 0.9):
            core = core_block(model, sm, db, LocalMetric.EUCLIDEAN)
            sizes.append(len(core.core_ids))
        assert sizes == sorted(sizes)

    def test_d_bound_range_checked(self):
        sm = self.make_sm()
        with pytest.raises(DataError):
            core_block(flat_model(0.1), sm, 0.0, LocalMetric.EUCLIDEAN)


class TestIntersect:
    def mk(self, metric, core, universe=("A", "B", "C")):
        return MetricCore(metric=metric, p_used=0.75, d_bound=0.4,
                          core_ids=tuple(core), universe=tuple(universe))

    def test_set_algebra(self):
        cores = [
            self.mk(LocalMetric.MANHATTAN, ("A", "B", "C")),
            self.mk(LocalMetric.EUCLIDEAN, ("A", "B")),
            self.mk(LocalMetric.SQEUCLIDEAN, ("A", "C")),
        ]
        result = intersect(cores)
        assert result.intersection_core == ("A",)
        assert result.satellite == ("B", "C")

    def test_identical_cores(self):
        cores = [self.mk(m, ("A", "C")) for m in LocalMetric]
        result = intersect(cores)
        assert result.intersection_core == ("A", "C")

    def test_two_of_three_metrics_lands_satellite(self):
        # in the core for manhattan and euclidean but not sqeuclidean -> satellite
        cores = [
            self.mk(LocalMetric.MANHATTAN, ("A", "B")),
            self.mk(LocalMetric.EUCLIDEAN, ("A", "B")),
            self.mk(LocalMetric.SQEUCLIDEAN, ("A",)),
        ]
        result = intersect(cores)
        assert "B" in result.satellite

    def test_universe_mismatch(self):
        cores = [
            self.mk(LocalMetric.MANHATTAN, ("A",), universe=("A", "B")),
            self.mk(LocalMetric.EUCLIDEAN, ("A",), universe=("A", "C")),
        ]
        with pytest.raises(DataError, match="universe"):
            intersect(cores)

    def test_intersection_bounded_by_smallest_core(self):
        rng = np.random.default_rng(5)
        universe = tuple(f"A{i}" for i in range(10))
        for _ in range(20):
            cores = [
                self.mk(m, rng.choice(universe, size=rng.integers(0, 10), replace=False), universe)
                for m in LocalMetric
            ]
            result = intersect(cores)
            assert len(result.intersection_core) <= min(len(c.core_ids) for c in cores)
            for c in cores:
                assert set(result.intersection_core) <= set(c.core_ids)


class TestReportWriter:
    def test_columns_and_labels(self, tmp_path):
        cores = [
            MetricCore(LocalMetric.MANHATTAN, 0.75, 0.554, ("A", "B"), ("A", "B", "C")),
            MetricCore(LocalMetric.EUCLIDEAN, 0.75, 0.564, ("A", "B"), ("A", "B", "C")),
            MetricCore(LocalMetric.SQEUCLIDEAN, 0.75, 0.357, ("A",), ("A", "B", "C")),
        ]
        result = intersect(cores)
        path = tmp_path / "report.csv"
        write_report_csv(result, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "# metric,threshold,p_used"
        assert lines[1] == "# manhattan,0.554000,0.750000"
        assert lines[4] == "no,id,name,manhattan,euclidean,sqeuclidean,intersection"
        assert lines[5] == "1,A,A,1,1,1,C"
        assert lines[6] == "2,B,B,1,1,0,S"
        assert lines[7] == "3,C,C,0,0,0,S"
