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

"""Ultrametric variogram of measured series.

For every shell (pairs of samples at ultrametric distance exactly p^e) the
mean squared increment is computed from block sums: within a block of n
samples, sum_{x<y} |f_x - f_y|^2 = n sum |f|^2 - |sum f|^2, and the pairs
at distance p^e are those sharing a p^e block but not a p^(e-1) block. The
whole table costs O(N log_p N).
"""

from __future__ import annotations

import logging
import math

import numpy as np

from padic_series.errors import InvalidLengthError, InvalidParameterError
from padic_series.models import OrderFit, SampledSeries, VariogramTable, power_exponent

logger = logging.getLogger(__name__)


def empirical_variogram(series: SampledSeries) -> VariogramTable:
    """Mean |f(x) - f(y)|^2 over pairs at each distance p^(e+l), e = 1..J-l."""
    p = series.prime
    K = power_exponent(len(series), p)
    if K is None:
        raise InvalidLengthError(f"series length {len(series)} is not a power of {p}")
    f = series.samples
    power = np.abs(f) ** 2

    exponents, counts, values = [], [], []
    prev_pairs, prev_total = 0, 0.0
    for e in range(1, K + 1):
        n = p**e
        sums = f.reshape(-1, n).sum(axis=1)
        energy = power.reshape(-1, n).sum(axis=1)
        total = float(np.sum(n * energy - np.abs(sums) ** 2))
        pairs = (len(series) // n) * n * (n - 1) // 2
        shell_pairs = pairs - prev_pairs
        exponents.append(e + series.level)
        counts.append(shell_pairs)
        values.append((total - prev_total) / shell_pairs)
        prev_pairs, prev_total = pairs, total
    return VariogramTable(
        prime=p,
        level=series.level,
        exponents=np.array(exponents, dtype=np.int64),
        pair_counts=np.array(counts, dtype=np.int64),
        values=np.array(values),
    )


def fit_order(table: VariogramTable, min_exponent: int | None = None) -> OrderFit:
    """Regress log variogram on log distance; the slope estimates 2 alpha - 1.

    Shells below ``min_exponent`` are skipped, since the constant term of the
    model bends the curve at short range.
    """
    keep = (table.values > 0) & (table.pair_counts > 0)
    if min_exponent is not None:
        keep &= table.exponents >= min_exponent
    if np.count_nonzero(keep) < 2:
        raise InvalidParameterError("order fit needs at least two nonzero shells")
    x = table.exponents[keep] * math.log(table.prime)
    y = np.log(table.values[keep])
    slope, intercept = np.polyfit(x, y, 1)
    fit = OrderFit(
        slope=float(slope),
        intercept=float(intercept),
        alpha=float((slope + 1.0) / 2.0),
        shells=int(np.count_nonzero(keep)),
    )
    logger.info("Fitted variogram order: slope=%.4g alpha=%.4g over %d shells", fit.slope,
                fit.alpha, fit.shells)
    return fit
