"""Tests for the analysis query API."""

import numpy as np
import pytest

from padic_series.errors import InvalidParameterError, ResourceLimitError
from padic_series.query_api import ANALYSIS_INSTRUCTIONS, create_analysis_functions


@pytest.fixture
def fns():
    return create_analysis_functions()


class TestSurface:
    def test_function_names(self, fns):
        assert set(fns) == {
            "distance",
            "rho",
            "covariance_matrix",
            "variogram_table",
            "transform",
            "derivative",
            "simulate_summary",
        }

    def test_instructions_mention_every_function(self, fns):
        for name in fns:
            assert f"{name}(" in ANALYSIS_INSTRUCTIONS


class TestDistance:
    def test_rows(self, fns):
        rows = fns["distance"](2, [[0, 1], [2, 3], [4, 4], [1, 6]])
        assert [r["exponent"] for r in rows] == [1, 1, None, 3]
        assert rows[0]["norm"] == "p^1"
        assert rows[2]["norm"] == "zero"

    def test_non_prime(self, fns):
        with pytest.raises(InvalidParameterError):
            fns["distance"](6, [[0, 1]])


class TestModels:
    def test_rho(self, fns):
        assert fns["rho"](2, 1.0, 1) == {"norm": "p^1", "rho": pytest.approx(1.0),
                                         "variogram": pytest.approx(2.0)}
        zero = fns["rho"](2, 1.0, None)
        assert zero["norm"] == "zero"
        assert zero["rho"] == 0.0

    def test_unknown_variant(self, fns):
        with pytest.raises(InvalidParameterError):
            fns["rho"](2, 1.0, 1, level=1, variant="other")

    def test_covariance_matrix(self, fns):
        result = fns["covariance_matrix"](2, 1.0, 2)
        assert result["size"] == 4
        assert np.allclose(np.diag(np.array(result["matrix"])), [0, 2, 5, 5])

    def test_covariance_cap(self):
        fns = create_analysis_functions(max_dense=4)
        with pytest.raises(ResourceLimitError):
            fns["covariance_matrix"](2, 1.0, 3)

    def test_variogram_table(self, fns):
        rows = fns["variogram_table"](2, 1.0, 2)
        assert [r["lag"] for r in rows] == [1, 2, 3]
        assert [r["variogram"] for r in rows] == pytest.approx([2.0, 5.0, 5.0])
        assert isinstance(rows[0]["norm_exponent"], int)


class TestSeries:
    def test_transform_energy(self, fns):
        values = [1.0, -2.0, 0.5, 3.0, 0.0, 1.5, -1.0, 2.0]
        result = fns["transform"](2, values)
        assert result["J"] == 3
        assert len(result["details"]) == 7
        assert result["energy"] == pytest.approx(sum(v * v for v in values))
        assert result["mean"][1] == 0.0

    def test_transform_complex_pairs(self, fns):
        result = fns["transform"](3, [[1.0, 1.0], [0.0, -1.0], [2.0, 0.0]])
        assert result["J"] == 1
        assert result["energy"] == pytest.approx(7.0)

    def test_derivative_of_constant(self, fns):
        result = fns["derivative"](3, 0.5, [4.0] * 9)
        assert result["mode"] == "finite-section"
        assert np.abs(np.array(result["values"])).max() <= 1e-12

    def test_derivative_pads(self, fns):
        result = fns["derivative"](2, 1.0, list(range(5)), pad="repeat-last")
        assert result["padding"] == {"policy": "repeat-last", "original_length": 5, "length": 8}
        assert len(result["values"]) == 8

    def test_derivative_empty(self, fns):
        with pytest.raises(InvalidParameterError):
            fns["derivative"](2, 1.0, [])


class TestSimulateSummary:
    def test_report(self, fns):
        result = fns["simulate_summary"](2, 1.0, 3, realizations=2000, seed=11)
        assert result["window_length"] == 8
        assert result["realizations"] == 2000
        assert result["max_abs_z"] <= 5.0
        assert result["exact_mismatches"] == 0
