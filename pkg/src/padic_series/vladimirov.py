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

"""Discretized Vladimirov operator T_p^alpha on windows of p^J natural indices.

T f(x) = c sum_y (f(x) - f(y)) / |eta^-1(x) - eta^-1(y)|_p^(1+alpha),
c = (p^alpha - 1) / (1 - p^(-1-alpha)).

Two modes:

- ``finite-section``: y runs over the window only. Symmetric, positive
  semidefinite, annihilates constants.
- ``zero-extended``: f vanishes outside the window and y runs over all of N.
  The window is one ball, so every outside point sits in a shell at distance
  p^m, m > J, of size p^m - p^(m-1); the outside part collapses to the closed
  form c f(x) Tail(J). Window wavelets of scale j are exact eigenfunctions
  with eigenvalue p^(alpha (1-j)).
"""

from __future__ import annotations

import logging
import math
import os

import numpy as np

from padic_series.errors import (
    InvalidLengthError,
    InvalidParameterError,
    PreconditionError,
    ResourceLimitError,
)
from padic_series.models import OperatorConfig, SampledSeries, require_prime
from padic_series.padic import distance_exponent_matrix
from padic_series.wavelets import analyze, synthesize

logger = logging.getLogger(__name__)

DEFAULT_MAX_DENSE = 4096
MEAN_ZERO_TOLERANCE = 1e-10


def dense_cap() -> int:
    """Largest N for which dense N x N objects are built (PADIC_SERIES_MAX_DENSE)."""
    return int(os.environ.get("PADIC_SERIES_MAX_DENSE", DEFAULT_MAX_DENSE))


def normalization_constant(p: int, alpha: float) -> float:
    """(p^alpha - 1) / (1 - p^(-1-alpha))."""
    require_prime(p)
    _require_positive(alpha)
    return (p**alpha - 1.0) / (1.0 - p ** (-1.0 - alpha))


def tail_sum(p: int, alpha: float, J: int) -> float:
    """sum_{m > J} (p^m - p^(m-1)) p^(-m (1+alpha)) in closed form."""
    _require_positive(alpha)
    return (1.0 - 1.0 / p) * p ** (-(J + 1) * alpha) / (1.0 - p ** (-alpha))


def eigenvalue(p: int, alpha: float, j: int) -> float:
    """Eigenvalue of a scale-j wavelet under the zero-extended operator."""
    return p ** (alpha * (1 - j))


def _require_positive(alpha: float) -> None:
    if not alpha > 0:
        raise InvalidParameterError(f"alpha must be > 0, got {alpha}")


def _shell_weights(p: int, alpha: float, J: int) -> np.ndarray:
    # weights[e] = p^(-(1+alpha) e), from the exact integer exponent e
    e = np.arange(J + 1, dtype=np.float64)
    return np.exp(-(1.0 + alpha) * e * math.log(p))


def _check_length(series: SampledSeries, cfg: OperatorConfig) -> None:
    if series.prime != cfg.prime:
        raise InvalidParameterError(
            f"prime mismatch: series {series.prime}, operator {cfg.prime}"
        )
    if len(series) != cfg.length:
        raise InvalidLengthError(
            f"series length {len(series)} does not match the operator window {cfg.length}"
        )


def apply_direct(series: SampledSeries, cfg: OperatorConfig) -> SampledSeries:
    """Kernel sum of T_p^alpha, evaluated shell by shell.

    Points at distance exactly p^e from x are the ball of radius p^e around x
    minus the ball of radius p^(e-1), so sum_y K(x, y) f(y) needs only the ball
    sums at each scale: O(N J) work, exact up to rounding.
    """
    _check_length(series, cfg)
    p, J = cfg.prime, cfg.J
    f = series.samples
    weights = _shell_weights(p, cfg.alpha, J)
    c = normalization_constant(p, cfg.alpha)

    acc = np.zeros_like(f)
    inner = f
    row_sum = 0.0
    for e in range(1, J + 1):
        block = p**e
        outer = np.repeat(f.reshape(-1, block).sum(axis=1), block)
        acc += weights[e] * (outer - inner)
        row_sum += weights[e] * (block - block // p)
        inner = outer

    out = c * (row_sum * f - acc)
    if cfg.mode == "zero-extended":
        out = out + c * tail_sum(p, cfg.alpha, J) * f
    logger.debug("applied T_p^alpha directly: p=%d alpha=%g N=%d mode=%s", p, cfg.alpha,
                 cfg.length, cfg.mode)
    return series.with_samples(out)


def apply_spectral(series: SampledSeries, cfg: OperatorConfig) -> SampledSeries:
    """Diagonal action in the wavelet basis; requires a mean-zero window.

    Every detail coefficient at scale j is multiplied by p^(alpha (1-j)), the
    eigenvalue of the zero-extended operator, whatever ``cfg.mode`` says. The
    finite section differs from this by c Tail(J) times the input; see
    ``apply_direct``.
    """
    _check_length(series, cfg)
    f = series.samples
    rms = float(np.sqrt(np.mean(np.abs(f) ** 2)))
    mean = complex(np.mean(f))
    if abs(mean) > MEAN_ZERO_TOLERANCE * rms:
        raise PreconditionError(
            f"apply_spectral needs a mean-zero window (mean {mean:.3g}, rms {rms:.3g}): "
            "the constant mode is not a window wavelet, so its image depends on values "
            "outside the window; use apply_direct instead"
        )
    p = cfg.prime
    _, details = analyze(f, p)
    scaled = {s: block * eigenvalue(p, cfg.alpha, s) for s, block in details.items()}
    return series.with_samples(synthesize(np.zeros(()), scaled, p))


def operator_spectrum(cfg: OperatorConfig) -> list[tuple[int, float, int]]:
    """(scale, eigenvalue, multiplicity) of the window operator; scale 0 is the constants."""
    p, J, alpha = cfg.prime, cfg.J, cfg.alpha
    c_tail = normalization_constant(p, alpha) * tail_sum(p, alpha, J)
    shift = c_tail if cfg.mode == "finite-section" else 0.0
    spectrum = [(0, c_tail - shift, 1)]
    for j in range(1, J + 1):
        spectrum.append((j, eigenvalue(p, alpha, j) - shift, p ** (J - j) * (p - 1)))
    return spectrum


def operator_eigenvalues(cfg: OperatorConfig) -> np.ndarray:
    """Exact spectrum, ascending, each value repeated by its multiplicity."""
    values = [value for _, value, count in operator_spectrum(cfg) for _ in range(count)]
    return np.sort(np.array(values))


def kernel_matrix(p: int, alpha: float, size: int) -> np.ndarray:
    """K(x, y) = |x - y|^-(1+alpha) off the diagonal, 0 on it."""
    exps = distance_exponent_matrix(size, p)
    weights = _shell_weights(p, alpha, int(exps.max()) if size > 1 else 0)
    kernel = weights[exps]
    np.fill_diagonal(kernel, 0.0)
    return kernel


def build_matrix(cfg: OperatorConfig, cap: int | None = None) -> np.ndarray:
    """Dense matrix M with apply_direct(f) = M f."""
    cap = dense_cap() if cap is None else cap
    if cfg.length > cap:
        raise ResourceLimitError(
            f"dense operator of size {cfg.length} exceeds the cap of {cap} "
            "(set PADIC_SERIES_MAX_DENSE to raise it)"
        )
    c = normalization_constant(cfg.prime, cfg.alpha)
    kernel = kernel_matrix(cfg.prime, cfg.alpha, cfg.length)
    matrix = c * (np.diag(kernel.sum(axis=1)) - kernel)
    if cfg.mode == "zero-extended":
        matrix += c * tail_sum(cfg.prime, cfg.alpha, cfg.J) * np.eye(cfg.length)
    return matrix