import numpy as np
import pytest

from conftest import random_series
from coresat.dtw import DistanceMatrix, LocalMetric, pairwise_matrix
from coresat.errors import DataError, DegenerateDataError
from coresat.seriation import (
    SeriatedMatrix,
    normalize_minmax,
    order_by_mean_distance,
    read_seriated_csv,
    seriate,
    write_seriated_csv,
)


def dm_from(d, metric=LocalMetric.EUCLIDEAN):
    d = np.asarray(d, dtype=float)
    labels = tuple(chr(ord("A") + i) for i in range(d.shape[0]))
    return DistanceMatrix(labels, d, metric)


def random_symmetric(rng, n, scale=1.0):
    m = rng.uniform(0.0, scale, size=(n, n))
    m = (m + m.T) / 2.0
    np.fill_diagonal(m, 0.0)
    return m


class TestOrderByMeanDistance:
    def test_outlier_placed_last(self):
        d = np.array(
            [
                [0.0, 1.0, 9.0],
                [1.0, 0.0, 8.0],
                [9.0, 8.0, 0.0],
            ]
        )
        order = order_by_mean_distance(dm_from(d))
        assert order[-1] == 2

    def test_ties_preserve_input_order(self):
        d = np.full((4, 4), 2.0)
        np.fill_diagonal(d, 0.0)
        assert order_by_mean_distance(dm_from(d)) == (0, 1, 2, 3)

    def test_matches_row_sum_sort_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            d = random_symmetric(rng, 6)
            order = order_by_mean_distance(dm_from(d))
            sums = [sum(row) for row in d.tolist()]
            oracle = sorted(range(6), key=lambda i: sums[i])
            assert list(order) == oracle

    def test_needs_two_assets(self):
        with pytest.raises(DataError):
            order_by_mean_distance(dm_from(np.zeros((1, 1))))


class TestNormalizeMinmax:
    def test_max_cell_becomes_one(self):
        d = np.array(
            [
                [0.0, 1.06, 6.01],
                [1.06, 0.0, 5.03],
                [6.01, 5.03, 0.0],
            ]
        )
        sm = normalize_minmax(dm_from(d), (0, 1, 2))
        assert sm.max_raw == pytest.approx(6.01)
        assert sm.d_norm.max() == pytest.approx(1.0)
        assert sm.d_norm[1, 2] == pytest.approx(5.03 / 6.01)

    def test_idempotent(self):
        rng = np.random.default_rng(1)
        d = random_symmetric(rng, 5)
        sm = seriate(dm_from(d))
        again = normalize_minmax(dm_from(sm.d_norm), tuple(range(5)))
        assert np.allclose(again.d_norm, sm.d_norm, atol=1e-15)

    def test_scale_invariant(self):
        rng = np.random.default_rng(2)
        d = random_symmetric(rng, 5)
        a = seriate(dm_from(d))
        b = seriate(dm_from(10.0 * d))
        assert np.allclose(a.d_norm, b.d_norm, atol=1e-15)
        assert a.order == b.order

    def test_all_zero_matrix_raises(self):
        with pytest.raises(DegenerateDataError, match="identical assets"):
            normalize_minmax(dm_from(np.zeros((3, 3))), (0, 1, 2))

    def test_diagonal_stays_zero(self):
        rng = np.random.default_rng(3)
        sm = seriate(dm_from(random_symmetric(rng, 7)))
        assert np.all(np.diag(sm.d_norm) == 0.0)


class TestSeriationProperties:
    def test_row_sums_non_decreasing(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            sm = seriate(dm_from(random_symmetric(rng, 8)))
            sums = sm.d_norm.sum(axis=1)
            assert np.all(np.diff(sums) >= -1e-12)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(5)
        series = [random_series(rng, f"A{i}", 5) for i in range(7)]
        dm = pairwise_matrix(series, LocalMetric.MANHATTAN)
        sm = seriate(dm)

        perm = rng.permutation(7)
        shuffled = [series[i] for i in perm]
        sm2 = seriate(pairwise_matrix(shuffled, LocalMetric.MANHATTAN))
        assert sm2.labels == sm.labels
        assert np.allclose(sm2.d_norm, sm.d_norm, atol=1e-12)

    def test_invariant_validation(self):
        with pytest.raises(DataError, match="permutation"):
            SeriatedMatrix(("A", "B"), (0, 0), np.zeros((2, 2)), 1.0)

    def test_csv_round_trip(self, tmp_path):
        rng = np.random.default_rng(6)
        sm = seriate(dm_from(random_symmetric(rng, 5)))
        path = tmp_path / "s.csv"
        write_seriated_csv(sm, path)
        loaded = read_seriated_csv(path)
        assert loaded.labels == sm.labels
        assert np.array_equal(loaded.d_norm, sm.d_norm)
