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

"""Haar and p-adic wavelet analysis on finite windows.

Windows hold p^(J-l) samples at level l. The p-adic wavelet (k, j, b) with
l+1 <= j <= J lives on samples [b p^(j-l), (b+1) p^(j-l)) and takes the value
p^-((j-l)/2) exp(2 pi i k d / p) there, d being the base-p digit of the
sample index at position j-l-1. These samples are orthonormal under counting
measure, so Parseval holds exactly in the data representation.

The fast transform is a ball-by-ball p-point DFT climbing one scale at a
time; ``forward_dense`` keeps the O(N^2) Gram-matrix version as a reference.
"""

from __future__ import annotations

import logging
from fractions import Fraction

import numpy as np

from padic_series.errors import InvalidLengthError, InvalidParameterError
from padic_series.models import (
    SampledSeries,
    UltrametricIndex,
    WaveletCoefficients,
    WaveletIndex,
    power_exponent,
)
from padic_series.padic import add_index_arrays, character_of_fraction, index_fraction

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Real Haar wavelets on the integers
# ---------------------------------------------------------------------------


def haar_eval(j: int, n: int, x: int) -> float:
    """2^(-j/2) psi(2^-j x - n) with psi = 1 on [0, 1/2), -1 on [1/2, 1)."""
    if j <= 0:
        raise InvalidParameterError(f"Haar scale j must be >= 1, got {j}")
    offset = x - n * 2**j
    if offset < 0 or offset >= 2**j:
        return 0.0
    sign = 1.0 if offset < 2 ** (j - 1) else -1.0
    return sign * 2.0 ** (-j / 2)


def _block_mean(samples: np.ndarray, block: int) -> np.ndarray:
    if samples.size % block:
        raise InvalidLengthError(
            f"series length {samples.size} is not a multiple of the block size {block}"
        )
    return samples.reshape(-1, block).mean(axis=1)


def haar_project(series: SampledSeries, j: int) -> SampledSeries:
    """P_j: replace each sample by the mean of its dyadic block [n 2^j, (n+1) 2^j)."""
    if j < 0:
        raise InvalidParameterError(f"projection level must be >= 0, got {j}")
    block = 2**j
    means = _block_mean(series.samples, block)
    return series.with_samples(np.repeat(means, block))


def monna_project(series: SampledSeries, j: int) -> SampledSeries:
    """p^-j sum_{l in p^-j Z_p / Z_p} f(eta(eta^-1(x) + l)), evaluated with group addition."""
    if j < 0:
        raise InvalidParameterError(f"projection level must be >= 0, got {j}")
    p = series.prime
    block = p**j
    n = len(series)
    if n % block:
        raise InvalidLengthError(
            f"series length {n} is not a multiple of the block size {block}"
        )
    width = max(j, len(np.base_repr(n - 1, p)) if n > 1 else 0)
    targets = add_index_arrays(
        np.arange(n, dtype=np.int64)[:, None],
        np.arange(block, dtype=np.int64)[None, :],
        p,
        width,
    )
    return series.with_samples(series.samples[targets].mean(axis=1))


def pi_project(series: SampledSeries, target_level: int) -> SampledSeries:
    """Pi: average level-l samples into level-l' ball means (length shrinks by p^(l'-l))."""
    if target_level <= series.level:
        raise InvalidParameterError(
            f"target level {target_level} must exceed the series level {series.level}"
        )
    block = series.prime ** (target_level - series.level)
    return SampledSeries(series.prime, target_level, _block_mean(series.samples, block))


# ---------------------------------------------------------------------------
# p-adic wavelets
# ---------------------------------------------------------------------------


def padic_wavelet_eval(w: WaveletIndex, x: UltrametricIndex, J: int) -> complex:
    """psi_{k;jn}(x) = p^(-j/2) chi(p^-1 k (p^j x - n)) Omega(|p^j x - n|_p) at level 0."""
    p = x.prime
    if not 1 <= w.k < p or not 1 <= w.j <= J or not 0 <= w.ball < p ** (J - w.j):
        raise InvalidParameterError(f"wavelet {w} is not valid for p={p}, J={J}")
    if x.index >= p**J:
        raise InvalidParameterError(f"index {x.index} lies outside the window of {p**J}")
    shifted = index_fraction(x) * p**w.j
    residue = shifted - index_fraction(UltrametricIndex(p, w.ball))
    if residue.denominator != 1:
        return 0j
    return p ** (-w.j / 2) * character_of_fraction(Fraction(w.k, p) * residue)


def _window_exponent(n: int, p: int) -> int:
    K = power_exponent(n, p)
    if K is None:
        raise InvalidLengthError(f"window length {n} is not a power of {p}")
    return K


def wavelet_samples(p: int, J: int, level: int, w: WaveletIndex) -> np.ndarray:
    """Counting-measure orthonormal samples of wavelet w on the level-l window."""
    s = w.j - level
    if not 1 <= w.k < p or not 1 <= s <= J - level or not 0 <= w.ball < p ** (J - w.j):
        raise InvalidParameterError(f"wavelet {w} is not valid for p={p}, J={J}, l={level}")
    m = np.arange(p ** (J - level))
    digit = (m // p ** (s - 1)) % p
    values = p ** (-s / 2) * np.exp(2j * np.pi * w.k * digit / p)
    return np.where(m // p**s == w.ball, values, 0)


def wavelet_indices(p: int, J: int, level: int) -> list[WaveletIndex]:
    """Detail wavelets of a window in canonical order (j, ball, k ascending)."""
    return [
        WaveletIndex(k, j, b)
        for j in range(level + 1, J + 1)
        for b in range(p ** (J - j))
        for k in range(1, p)
    ]


def wavelet_basis(p: int, J: int, level: int = 0) -> np.ndarray:
    """Rows: normalized window indicator, then every detail wavelet in canonical order."""
    n = p ** (J - level)
    rows = [np.full(n, n**-0.5, dtype=np.complex128)]
    rows.extend(wavelet_samples(p, J, level, w) for w in wavelet_indices(p, J, level))
    return np.vstack(rows)


def analyze(values: np.ndarray, p: int) -> tuple[np.ndarray, dict[int, np.ndarray]]:
    """Fast transform over the last axis; details keyed by relative scale j - l.

    Leading axes are treated as a batch.
    """
    values = np.asarray(values, dtype=np.complex128)
    K = _window_exponent(values.shape[-1], p)
    lead = values.shape[:-1]
    sums = values
    details: dict[int, np.ndarray] = {}
    for s in range(1, K + 1):
        blocks = sums.reshape(*lead, -1, p)
        spectrum = np.fft.fft(blocks, axis=-1)
        details[s] = spectrum[..., 1:] * p ** (-s / 2)
        sums = blocks.sum(axis=-1)
        logger.debug("analyzed scale %d: %d balls", s, blocks.shape[-2])
    mean = sums[..., 0] * p ** (-K / 2)
    return mean, details


def synthesize(mean: np.ndarray, details: dict[int, np.ndarray], p: int) -> np.ndarray:
    """Inverse of ``analyze``."""
    mean = np.asarray(mean, dtype=np.complex128)
    K = len(details)
    lead = mean.shape
    sums = (mean * p ** (K / 2))[..., None]
    for s in range(K, 0, -1):
        spectrum = np.empty((*lead, sums.shape[-1], p), dtype=np.complex128)
        spectrum[..., 0] = sums
        spectrum[..., 1:] = details[s] * p ** (s / 2)
        sums = np.fft.ifft(spectrum, axis=-1).reshape(*lead, -1)
    return sums


def forward(window: SampledSeries) -> WaveletCoefficients:
    """Orthonormal p-adic wavelet coefficients of a window of p^(J-l) samples."""
    p, level = window.prime, window.level
    mean, details = analyze(window.samples, p)
    K = len(details)
    return WaveletCoefficients(
        prime=p,
        J=K + level,
        level=level,
        mean=complex(mean),
        details={s + level: block for s, block in details.items()},
    )


def inverse(coeffs: WaveletCoefficients) -> SampledSeries:
    relative = {j - coeffs.level: block for j, block in coeffs.details.items()}
    if sorted(relative) != list(range(1, coeffs.J - coeffs.level + 1)):
        raise InvalidParameterError("coefficient scales do not cover levels l+1..J")
    samples = synthesize(np.asarray(coeffs.mean), relative, coeffs.prime)
    return SampledSeries(coeffs.prime, coeffs.level, samples)


def coefficients_from_vector(
    vector: np.ndarray, p: int, J: int, level: int = 0
) -> WaveletCoefficients:
    """Inverse of ``WaveletCoefficients.to_vector``."""
    vector = np.asarray(vector, dtype=np.complex128)
    if vector.size != p ** (J - level):
        raise InvalidLengthError(
            f"expected {p ** (J - level)} coefficients, got {vector.size}"
        )
    details: dict[int, np.ndarray] = {}
    pos = 1
    for j in range(level + 1, J + 1):
        count = p ** (J - j) * (p - 1)
        details[j] = vector[pos : pos + count].reshape(p ** (J - j), p - 1)
        pos += count
    return WaveletCoefficients(p, J, level, complex(vector[0]), details)


def forward_dense(window: SampledSeries) -> WaveletCoefficients:
    """Reference O(N^2) transform: inner products against the dense basis."""
    p, level = window.prime, window.level
    K = _window_exponent(len(window), p)
    basis = wavelet_basis(p, K + level, level)
    return coefficients_from_vector(basis.conj() @ window.samples, p, K + level, level)
