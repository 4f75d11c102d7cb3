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

"""Synthetic pressure-like series with avalanche spikes.

A slowly drifting baseline carries cascades of spikes: each spike may trigger
children inside a window that shrinks by a constant factor per generation, so
bursts cluster hierarchically the way the field measurements do.
"""

from __future__ import annotations

import numpy as np

from padic_series.errors import InvalidParameterError

DEFAULT_LENGTH = 256


def synthetic_series(
    n: int = DEFAULT_LENGTH,
    seed: int = 0,
    *,
    roots: int = 4,
    branching: float = 1.6,
    shrink: float = 3.0,
    generations: int = 4,
) -> np.ndarray:
    """Deterministic real series of length n for a given seed."""
    if n < 1:
        raise InvalidParameterError(f"length must be >= 1, got {n}")
    if generations < 0 or roots < 0:
        raise InvalidParameterError("roots and generations must be nonnegative")
    rng = np.random.default_rng(seed)

    t = np.arange(n, dtype=np.float64)
    baseline = 10.0 + 0.02 * np.cumsum(rng.standard_normal(n)) + 0.5 * np.sin(2 * np.pi * t / n)
    spikes = np.zeros(n)

    parents = [(float(rng.uniform(0, n)), float(n) / 4.0, 1.0) for _ in range(roots)]
    for _ in range(generations + 1):
        children = []
        for center, width, height in parents:
            spot = int(center) % n
            spikes[spot] += height * rng.exponential(1.0)
            for _ in range(rng.poisson(branching)):
                offset = rng.uniform(0.0, width)
                children.append((center + offset, width / shrink, height * 0.7))
        parents = children
        if not parents:
            break
    return baseline + spikes
