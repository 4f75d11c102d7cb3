"""Tests for the empirical ultrametric variogram (padic_series.variogram)."""

import numpy as np
import pytest

from padic_series import fbm
from padic_series.errors import InvalidLengthError, InvalidParameterError
from padic_series.models import (
    CovarianceModel,
    NormValue,
    SampledSeries,
    SimulationConfig,
    VariogramTable,
)
from padic_series.padic import distance_exponent
from padic_series.variogram import empirical_variogram, fit_order


def _brute_force(values, p):
    n = len(values)
    sums, counts = {}, {}
    for x in range(n):
        for y in range(x + 1, n):
            e = distance_exponent(x, y, p)
            sums[e] = sums.get(e, 0.0) + abs(values[x] - values[y]) ** 2
            counts[e] = counts.get(e, 0) + 1
    return sums, counts


class TestEmpiricalVariogram:
    def test_two_points(self):
        table = empirical_variogram(SampledSeries(2, 0, [0.0, 1.0]))
        assert table.exponents.tolist() == [1]
        assert table.pair_counts.tolist() == [1]
        assert table.values.tolist() == pytest.approx([1.0])

    def test_matches_pairwise_sum(self):
        rng = np.random.default_rng(21)
        for p, n in ((2, 32), (3, 27), (5, 25)):
            values = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            table = empirical_variogram(SampledSeries(p, 0, values))
            sums, counts = _brute_force(values, p)
            assert table.exponents.tolist() == sorted(counts)
            for e, pairs, value in zip(table.exponents, table.pair_counts, table.values):
                assert pairs == counts[e]
                assert value == pytest.approx(sums[e] / counts[e], rel=1e-10)

    def test_level_shifts_exponents(self):
        table = empirical_variogram(SampledSeries(3, 2, np.arange(9.0)))
        assert table.exponents.tolist() == [3, 4]
        assert table.level == 2

    def test_constant_series(self):
        table = empirical_variogram(SampledSeries(2, 0, np.full(16, 3.0)))
        assert np.abs(table.values).max() <= 1e-12
        with pytest.raises(InvalidParameterError):
            fit_order(table)

    def test_length_must_be_power(self):
        with pytest.raises(InvalidLengthError):
            empirical_variogram(SampledSeries(2, 0, np.ones(12)))

    def test_simulated_paths_follow_model(self):
        model = CovarianceModel(2, 1.0)
        batch = fbm.simulate(SimulationConfig(2, 1.0, 6, realizations=400, seed=8))
        tables = [empirical_variogram(series) for series in batch]
        mean_values = np.mean([t.values for t in tables], axis=0)
        for e, value in zip(tables[0].exponents, mean_values):
            expected = fbm.variogram(NormValue.of(int(e)), model)
            assert value == pytest.approx(expected, rel=0.2)

        averaged = VariogramTable(2, 0, tables[0].exponents, tables[0].pair_counts, mean_values)
        fit = fit_order(averaged, min_exponent=2)
        assert abs(fit.alpha - 1.0) < 0.15
        assert fit.shells == 5


class TestFitOrder:
    def test_exact_power_law(self):
        exponents = np.arange(1, 7)
        values = (3.0**exponents) ** 0.4
        table = VariogramTable(3, 0, exponents, np.ones(6, dtype=int), values)
        fit = fit_order(table)
        assert fit.slope == pytest.approx(0.4)
        assert fit.alpha == pytest.approx(0.7)
        assert fit.intercept == pytest.approx(0.0, abs=1e-12)
        assert fit.shells == 6

    def test_min_exponent(self):
        exponents = np.arange(1, 5)
        values = np.array([100.0, 4.0, 8.0, 16.0])
        table = VariogramTable(2, 0, exponents, np.ones(4, dtype=int), values)
        fit = fit_order(table, min_exponent=2)
        assert fit.slope == pytest.approx(1.0)
        assert fit.shells == 3
