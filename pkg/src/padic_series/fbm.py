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

"""Discretized fractional p-adic Brownian motion on finite windows.

The process solves D^alpha f = white noise. Expanded over p-adic wavelets,

    F(x) = sum_{j=l+1}^{J} sum_b sum_k p^(alpha (j-1)) d_{k,j,b} (psi_{k;j,b}(x) - I_{j,b}),

where I_{j,b} is the value of psi_{k;j,b} on the origin ball (zero unless
b = 0), so F(0) = 0. On a window of p^(J-l) level-l samples this finite sum is
exact: wavelets with j <= l average to zero over every level-l ball, and
wavelets with j > J are constant on the window and cancel against their
subtracted origin value.

The closed-form covariance is rho(x) + rho(y) - rho(x - y). For level l >= 1
two prefactors of the constant term are carried side by side ("paper":
p^-l, "alternative": p^((2 alpha - 1) l)); ``verify`` scores both against
simulated data rather than picking one.
"""

from __future__ import annotations

import cmath
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np
import pandas as pd

from padic_series.errors import (
    InvalidLengthError,
    InvalidParameterError,
    PreconditionError,
    ResourceLimitError,
)
from padic_series.models import (
    CovarianceModel,
    EmpiricalCovariance,
    ModelVariant,
    NormValue,
    SimulationBatch,
    SimulationConfig,
    UltrametricIndex,
    VariantScore,
    VerificationReport,
    WhitenessReport,
    power_exponent,
    require_prime,
)
from padic_series.padic import (
    distance_exponent,
    distance_exponent_matrix,
    group_sub,
    index_distance,
)
from padic_series.vladimirov import dense_cap
from padic_series.wavelets import analyze, wavelet_indices, wavelet_samples

logger = logging.getLogger(__name__)

_CHUNK = 512  # realizations per matrix product; fixed so output never depends on workers


# ---------------------------------------------------------------------------
# Closed-form covariance
# ---------------------------------------------------------------------------


def rho(norm: NormValue, model: CovarianceModel) -> float:
    """rho_l(x) for |x|_p = norm; rho(0) = 0."""
    if norm.is_zero:
        return 0.0
    assert norm.exponent is not None
    p, alpha, level, e = model.prime, model.alpha, model.level, norm.exponent
    if alpha == 0.5:
        if model.variant == "paper" and level >= 1:
            raise InvalidParameterError(
                "prefactor p^-l diverges at alpha = 1/2 for level >= 1"
            )
        # (q^l - q^e) / (1 - q) -> e - l as q = p^(2 alpha - 1) -> 1
        return (1.0 - 1.0 / p) * (e - level) + 1.0 / p
    power = 2.0 * alpha - 1.0
    denom = 1.0 - p**power
    if model.variant == "paper":
        prefactor = p ** (-level)
    else:
        prefactor = p ** (power * level)
    constant = prefactor * (1.0 - 1.0 / p) / denom
    return constant + p ** (power * e) * (p ** (-2.0 * alpha) - 1.0) / denom


def variogram(h: NormValue, model: CovarianceModel) -> float:
    """<|F(x) - F(y)|^2> for |x - y|_p = h."""
    return 2.0 * rho(h, model)


def _check_level_index(x: UltrametricIndex, model: CovarianceModel) -> None:
    if x.prime != model.prime:
        raise InvalidParameterError(f"prime mismatch: index {x.prime}, model {model.prime}")
    if x.index % model.prime**model.level:
        raise InvalidParameterError(
            f"index {x.index} does not represent a level-{model.level} ball "
            f"(not a multiple of {model.prime**model.level})"
        )


def covariance(x: UltrametricIndex, y: UltrametricIndex, model: CovarianceModel) -> float:
    """<conj F(x) F(y)> = rho(x) + rho(y) - rho(x - y), on level-0 indices."""
    _check_level_index(x, model)
    _check_level_index(y, model)
    origin = UltrametricIndex(model.prime, 0)
    diff = index_distance(group_sub(x, y), origin)
    return (
        rho(index_distance(x, origin), model)
        + rho(index_distance(y, origin), model)
        - rho(diff, model)
    )


def _rho_table(model: CovarianceModel, max_relative: int) -> np.ndarray:
    # entry t: rho at level-relative exponent t (absolute exponent t + l), entry 0 is rho(0)
    table = np.zeros(max_relative + 1)
    for t in range(1, max_relative + 1):
        table[t] = rho(NormValue.of(t + model.level), model)
    return table


def model_covariance_matrix(
    model: CovarianceModel, J: int, cap: int | None = None
) -> np.ndarray:
    """Covariance over the p^(J-l) window samples; sample m is index m p^l."""
    if J < model.level + 1:
        raise InvalidParameterError(f"J must be >= level + 1, got J={J}")
    size = model.prime ** (J - model.level)
    cap = dense_cap() if cap is None else cap
    if size > cap:
        raise ResourceLimitError(f"covariance matrix of size {size} exceeds the cap of {cap}")
    exps = distance_exponent_matrix(size, model.prime)
    table = _rho_table(model, J - model.level)
    to_origin = table[exps[0]]
    return to_origin[:, None] + to_origin[None, :] - table[exps]


def lag_variogram(h: int, model: CovarianceModel) -> float:
    """Variogram at real lag h (in level-l samples): 2 rho(|eta^-1(h)|_p)."""
    if h < 0:
        raise InvalidParameterError(f"lag must be nonnegative, got {h}")
    t = distance_exponent(h, 0, model.prime)
    return variogram(NormValue.zero() if t == 0 else NormValue.of(t + model.level), model)


def variogram_table(model: CovarianceModel, J: int) -> pd.DataFrame:
    """Model variogram over real lags 1 .. p^(J-l) - 1.

    Columns: lag, norm_exponent, variogram, run. The variogram is constant on
    each run of lags [p^i, p^(i+1)); ``run`` numbers those steps of the staircase.
    """
    lags = np.arange(1, model.prime ** (J - model.level), dtype=np.int64)
    exps = np.array([distance_exponent(int(h), 0, model.prime) for h in lags], dtype=np.int64)
    table = 2.0 * _rho_table(model, J - model.level)
    return pd.DataFrame(
        {
            "lag": lags,
            "norm_exponent": exps + model.level,
            "variogram": table[exps],
            "run": exps - 1,
        }
    )


def power_law_slope(model: CovarianceModel, J: int) -> float:
    """Log-log slope of the model variogram over lags p, p^2, ..., p^(J-1)."""
    lags = [model.prime**i for i in range(1, J)]
    if len(lags) < 2:
        raise InvalidParameterError("power-law slope needs J >= 3")
    values = [lag_variogram(h, model) for h in lags]
    slope, _ = np.polyfit(np.log(lags), np.log(values), 1)
    return float(slope)


def character_sum_identities(p: int) -> tuple[complex, complex]:
    """(sum_k |e^(2 pi i k/p) - 1|^2, sum_k (e^(-2 pi i k/p) - 1)), k = 1..p-1.

    They equal 2p and -p; the covariance derivation rests on both.
    """
    require_prime(p)
    roots = [cmath.exp(2j * math.pi * k / p) for k in range(1, p)]
    first = sum(abs(r - 1) ** 2 for r in roots)
    second = sum(r.conjugate() - 1 for r in roots)
    return complex(first), complex(second)


# ---------------------------------------------------------------------------
# Simulation
# ---------------------------------------------------------------------------


def noise_coefficients(config: SimulationConfig, m: int) -> np.ndarray:
    """Circular complex Gaussians d_{k,j,b} of realization m, canonical order.

    Philox is keyed by (seed, m) and each scale j starts its own counter block
    at j * 2^192. Within a scale, balls and then k are drawn in ascending
    order, so a larger window only appends draws: each value is a pure
    function of (seed, m, k, j, b), independent of J and of the level.
    """
    p = config.prime
    key = np.array([config.seed, m], dtype=np.uint64)
    parts = []
    for j in range(config.level + 1, config.J + 1):
        counter = np.array([0, 0, 0, j], dtype=np.uint64)
        gen = np.random.Generator(np.random.Philox(counter=counter, key=key))
        parts.append(gen.standard_normal((p ** (config.J - j) * (p - 1), 2)))
    z = np.concatenate(parts)
    return (z[:, 0] + 1j * z[:, 1]) / math.sqrt(2.0)


def synthesis_matrix(config: SimulationConfig) -> np.ndarray:
    """Row w: p^(alpha (j-1)) (psi_w - I_w) on the window samples."""
    p, J, level = config.prime, config.J, config.level
    rows = []
    for w in wavelet_indices(p, J, level):
        # level-l ball means of the L^2-normalized wavelet: p^(-j/2) on its support
        psi = wavelet_samples(p, J, level, w) * p ** (-level / 2)
        origin_value = psi[0] if w.ball == 0 else 0
        rows.append(p ** (config.alpha * (w.j - 1)) * (psi - origin_value))
    if not rows:
        return np.zeros((0, config.window_length), dtype=np.complex128)
    return np.vstack(rows)


def _noise_block(config: SimulationConfig, start: int, stop: int) -> np.ndarray:
    return np.vstack([noise_coefficients(config, m) for m in range(start, stop)])


def simulate(config: SimulationConfig, workers: int | None = None) -> SimulationBatch:
    """Exact realizations of the discretized process on the window."""
    if workers is None:
        workers = int(os.environ.get("PADIC_SERIES_WORKERS", "1"))
    synthesis = synthesis_matrix(config)
    bounds = [
        (start, min(start + _CHUNK, config.realizations))
        for start in range(0, config.realizations, _CHUNK)
    ]

    def run(bound: tuple[int, int]) -> np.ndarray:
        return _noise_block(config, *bound) @ synthesis

    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(run, bounds))
    else:
        blocks = [run(b) for b in bounds]
    paths = np.vstack(blocks)
    if config.output == "real-part":
        paths = paths.real.copy()
    logger.info(
        "Simulated %d realizations (p=%d alpha=%g J=%d l=%d, %d samples each)",
        config.realizations,
        config.prime,
        config.alpha,
        config.J,
        config.level,
        config.window_length,
    )
    return SimulationBatch(config, paths)


# ---------------------------------------------------------------------------
# Estimation and verification
# ---------------------------------------------------------------------------


def estimate(batch: SimulationBatch) -> EmpiricalCovariance:
    """Sample second moments (mean not subtracted) with standard errors."""
    paths = np.asarray(batch.realizations)
    M = paths.shape[0]
    if M == 0:
        raise PreconditionError("cannot estimate a covariance from an empty batch")
    if M < 2:
        raise PreconditionError("estimation needs at least 2 realizations")
    moment = paths.conj().T @ paths / M
    power = np.abs(paths) ** 2
    second = power.T @ power / M
    variance = np.clip(second - np.abs(moment) ** 2, 0.0, None) * M / (M - 1)
    se = np.sqrt(variance / M)
    if not np.iscomplexobj(paths):
        moment = moment.real
    return EmpiricalCovariance(moment, se, M, batch.config)


def _score(model_matrix: np.ndarray, empirical: EmpiricalCovariance, variant: str) -> tuple[
    VariantScore, int
]:
    delta = np.abs(empirical.matrix - model_matrix)
    se = empirical.standard_errors
    exact = se == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(exact, np.where(delta == 0, 0.0, np.inf), delta / np.where(exact, 1, se))
    mismatches = int(np.count_nonzero(exact & (delta != 0)))
    score = VariantScore(
        variant=variant,
        max_abs_z=float(z.max()),
        frac_within_2=float(np.mean(z <= 2.0)),
        frac_within_5=float(np.mean(z <= 5.0)),
        total_sq_z=float(np.sum(z**2)),
    )
    return score, mismatches


def _window_J(size: int, model: CovarianceModel) -> int:
    K = power_exponent(size, model.prime)
    if K is None or K < 1:
        raise InvalidLengthError(
            f"covariance of size {size} is not a window of {model.prime}^(J-l) samples"
        )
    return K + model.level


def verify(model: CovarianceModel, empirical: EmpiricalCovariance) -> VerificationReport:
    """Per-entry z-scores of the empirical covariance against the model."""
    matrix = np.asarray(empirical.matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise InvalidLengthError(f"empirical covariance must be square, got {matrix.shape}")
    if empirical.standard_errors.shape != matrix.shape:
        raise InvalidLengthError("standard errors and covariance shapes differ")
    J = _window_J(matrix.shape[0], model)
    factor = 0.5 if empirical.config is not None and empirical.config.output == "real-part" else 1.0

    def score(variant: ModelVariant) -> tuple[VariantScore, int]:
        candidate = replace(model, variant=variant)
        return _score(factor * model_covariance_matrix(candidate, J), empirical, variant)

    scored: dict[str, tuple[VariantScore, int]] = {}
    winner = None
    if model.level >= 1:
        variants: tuple[ModelVariant, ...] = ("paper", "alternative")
        for variant in variants:
            try:
                scored[variant] = score(variant)
            except InvalidParameterError as exc:
                logger.warning("Variant %s not scored: %s", variant, exc)
        if not scored:
            raise InvalidParameterError(f"no model variant is defined at alpha={model.alpha}")
        winner = min(scored.values(), key=lambda s: s[0].total_sq_z)[0].variant
    else:
        scored[model.variant] = score(model.variant)

    reported = model.variant if model.variant in scored else winner
    assert reported is not None
    if reported != model.variant:
        logger.warning("Variant %s is undefined here; reporting %s", model.variant, reported)
    primary, mismatches = scored[reported]
    report = VerificationReport(
        max_abs_z=primary.max_abs_z,
        frac_within_2=primary.frac_within_2,
        frac_within_5=primary.frac_within_5,
        entries=int(matrix.size),
        exact_mismatches=mismatches,
        variant_scores={name: s for name, (s, _) in scored.items()} if model.level >= 1 else {},
        winner=winner,
        variant=reported,
    )
    logger.info(
        "Verified %s model: max|z|=%.3g, %.1f%% within 2 SE%s",
        reported,
        report.max_abs_z,
        100.0 * report.frac_within_2,
        f", best variant {winner}" if winner else "",
    )
    return report


def recover_noise(batch: SimulationBatch, alpha: float | None = None) -> np.ndarray:
    """d-hat: detail coefficients of each path divided by p^(alpha (j-1)), shape (M, n)."""
    config = batch.config
    if config.level != 0:
        raise InvalidParameterError("noise recovery needs level-0 paths")
    if config.output != "complex":
        raise PreconditionError("noise recovery needs complex paths, not real parts")
    alpha = config.alpha if alpha is None else alpha
    p = config.prime
    _, details = analyze(batch.realizations, p)
    M = len(batch)
    parts = [
        (details[j] / p ** (alpha * (j - 1))).reshape(M, -1) for j in sorted(details)
    ]
    return np.concatenate(parts, axis=1)


def whiteness_check(
    batch: SimulationBatch, alpha: float, threshold: float = 3.0
) -> WhitenessReport:
    """Recovered coefficients should be iid with unit variance, zero mean, no correlation."""
    d = recover_noise(batch, alpha)
    M, n = d.shape
    if M < 2:
        raise PreconditionError("whiteness check needs at least 2 realizations")
    sqrt_m = math.sqrt(M)

    power = np.abs(d) ** 2
    variance = power.mean(axis=0)
    variance_z = np.abs(variance - 1.0) / (power.std(axis=0, ddof=1) / sqrt_m)

    mean = d.mean(axis=0)
    mean_se = np.sqrt((np.abs(d - mean) ** 2).sum(axis=0) / (M - 1)) / sqrt_m
    mean_z = np.abs(mean) / mean_se

    moment = d.conj().T @ d / M
    second = power.T @ power / M
    pair_se = np.sqrt(np.clip(second - np.abs(moment) ** 2, 0.0, None) * M / (M - 1)) / sqrt_m
    scale = np.sqrt(np.outer(variance, variance))
    upper = np.triu_indices(n, k=1)
    corr_z = (np.abs(moment) / scale)[upper] / (pair_se / scale)[upper]

    report = WhitenessReport(
        realizations=M,
        coefficients=n,
        max_variance_z=float(variance_z.max()),
        max_correlation_z=float(corr_z.max()) if corr_z.size else 0.0,
        max_mean_z=float(mean_z.max()),
        variance_outliers=int(np.count_nonzero(variance_z > threshold)),
        correlation_outliers=int(np.count_nonzero(corr_z > threshold)),
        mean_outliers=int(np.count_nonzero(mean_z > threshold)),
        threshold=threshold,
    )
    if not report.passed:
        logger.warning("Whiteness check found outliers: %s", report.to_dict())
    return report
