# padic-series - p-adic analysis of time series
# Copyright (C) 2026 padic-series contributors
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU Affero General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the
# GNU Affero General Public License for more details.
#
# You should have received a copy of the GNU Affero General Public License
# along with this program. If not, see <https://www.gnu.org/licenses/>.

"""Analysis query API.

``create_analysis_functions`` returns a dict of plain callables over the
library. Every function takes JSON-friendly arguments and returns plain
dicts/lists, so the same surface serves a REPL and the tool server.
"""

from __future__ import annotations

from typing import Any, Callable

import numpy as np

from padic_series import fbm
from padic_series.errors import InvalidParameterError
from padic_series.models import (
    CovarianceModel,
    NormValue,
    OperatorConfig,
    SampledSeries,
    SimulationConfig,
    UltrametricIndex,
)
from padic_series.padic import index_distance
from padic_series.series_io import pad_to_power
from padic_series.vladimirov import apply_direct
from padic_series.wavelets import forward


def _samples(values: list[Any]) -> np.ndarray:
    """Real numbers, or [re, im] pairs."""
    if values and isinstance(values[0], (list, tuple)):
        return np.array([complex(re, im) for re, im in values], dtype=np.complex128)
    return np.asarray(values, dtype=np.float64).astype(np.complex128)


def _pairs(samples: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in samples]


def create_analysis_functions(max_dense: int | None = None) -> dict[str, Callable]:
    """Create analysis functions; ``max_dense`` caps dense matrices (env default)."""

    def distance(p: int, pairs: list[list[int]]) -> list[dict]:
        """Exact ultrametric distance of index pairs."""
        rows = []
        for m, n in pairs:
            norm = index_distance(UltrametricIndex(p, m), UltrametricIndex(p, n))
            rows.append({"m": m, "n": n, "exponent": norm.exponent, "norm": str(norm)})
        return rows

    def rho(
        p: int,
        alpha: float,
        exponent: int | None,
        level: int = 0,
        variant: str = "paper",
    ) -> dict:
        """rho_l at norm p^exponent (None is the zero norm)."""
        model = CovarianceModel(p, alpha, level, variant)  # type: ignore[arg-type]
        norm = NormValue.zero() if exponent is None else NormValue.of(exponent)
        return {
            "norm": str(norm),
            "rho": fbm.rho(norm, model),
            "variogram": fbm.variogram(norm, model),
        }

    def covariance_matrix(
        p: int, alpha: float, J: int, level: int = 0, variant: str = "paper"
    ) -> dict:
        """Model covariance over the window samples."""
        model = CovarianceModel(p, alpha, level, variant)  # type: ignore[arg-type]
        matrix = fbm.model_covariance_matrix(model, J, cap=max_dense)
        return {"size": int(matrix.shape[0]), "matrix": matrix.tolist()}

    def variogram_table(
        p: int, alpha: float, J: int, level: int = 0, variant: str = "paper"
    ) -> list[dict]:
        """Staircase variogram over real lags."""
        model = CovarianceModel(p, alpha, level, variant)  # type: ignore[arg-type]
        frame = fbm.variogram_table(model, J)
        return [
            {key: (float(v) if key == "variogram" else int(v)) for key, v in row.items()}
            for row in frame.to_dict(orient="records")
        ]

    def transform(p: int, values: list[Any], level: int = 0) -> dict:
        """p-adic wavelet coefficients of a p-power window."""
        coeffs = forward(SampledSeries(p, level, _samples(values)))
        details = [
            {"k": w.k, "j": w.j, "ball": w.ball, "value": [c.real, c.imag]}
            for w, c in coeffs.items()
        ]
        return {
            "J": coeffs.J,
            "level": coeffs.level,
            "mean": [coeffs.mean.real, coeffs.mean.imag],
            "details": details,
            "energy": coeffs.energy(),
        }

    def derivative(
        p: int,
        alpha: float,
        values: list[Any],
        mode: str = "finite-section",
        pad: str = "truncate",
    ) -> dict:
        """Fractional derivative of a series after padding to a p-power length."""
        if not values:
            raise InvalidParameterError("values must not be empty")
        padded, padding = pad_to_power(_samples(values), p, pad)  # type: ignore[arg-type]
        cfg = OperatorConfig(p, alpha, int(padded.size), mode)  # type: ignore[arg-type]
        out = apply_direct(SampledSeries(p, 0, padded), cfg)
        return {"padding": padding, "mode": cfg.mode, "values": _pairs(out.samples)}

    def simulate_summary(
        p: int,
        alpha: float,
        J: int,
        level: int = 0,
        realizations: int = 2000,
        seed: int = 0,
        variant: str = "paper",
    ) -> dict:
        """Simulate, estimate and verify in one call; returns the report."""
        config = SimulationConfig(p, alpha, J, level, realizations, seed)
        batch = fbm.simulate(config)
        empirical = fbm.estimate(batch)
        report = fbm.verify(config.model(variant), empirical)  # type: ignore[arg-type]
        result = report.to_dict()
        result["realizations"] = realizations
        result["window_length"] = config.window_length
        return result

    return {
        "distance": distance,
        "rho": rho,
        "covariance_matrix": covariance_matrix,
        "variogram_table": variogram_table,
        "transform": transform,
        "derivative": derivative,
        "simulate_summary": simulate_summary,
    }


ANALYSIS_INSTRUCTIONS = """\
Your REPL environment includes p-adic analysis functions for time series.
Indices are natural numbers read as elements of Q_p/Z_p; distances are exact.

GEOMETRY:
  distance(p, pairs) -> list[dict]                      # |m - n|_p for [[m, n], ...]

MODELS:
  rho(p, alpha, exponent, level?, variant?) -> dict      # rho_l and variogram at p^exponent
  covariance_matrix(p, alpha, J, level?, variant?) -> dict
  variogram_table(p, alpha, J, level?, variant?) -> list[dict]   # staircase over real lags

SERIES:
  transform(p, values, level?) -> dict                   # wavelet coefficients
  derivative(p, alpha, values, mode?, pad?) -> dict      # fractional derivative

SIMULATION:
  simulate_summary(p, alpha, J, level?, realizations?, seed?, variant?) -> dict
"""
