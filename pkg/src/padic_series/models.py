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

"""Domain models for p-adic series analysis."""

from __future__ import annotations

import math
from collections.abc import Iterator
from dataclasses import dataclass, field
from functools import total_ordering
from typing import Any, Literal

import numpy as np

from padic_series.errors import InvalidLengthError, InvalidParameterError

OperatorMode = Literal["finite-section", "zero-extended"]
ModelVariant = Literal["paper", "alternative"]
OutputMode = Literal["complex", "real-part"]

MANIFEST_SCHEMA = "v1"


def is_prime(n: int) -> bool:
    """Deterministic trial division; primes used here are small."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def require_prime(p: int) -> None:
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
        raise InvalidParameterError(f"p must be prime, got {p}")


def power_exponent(n: int, p: int) -> int | None:
    """Return J with n == p**J, or None when n is not an exact power of p."""
    if n < 1:
        return None
    J = 0
    while n % p == 0:
        n //= p
        J += 1
    return J if n == 1 else None


# ---------------------------------------------------------------------------
# p-adic values
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UltrametricIndex:
    """A natural number read as an element of Q_p/Z_p through the Monna map.

    Base-p digit d_j of ``index`` becomes the coefficient of p^-(j+1).
    """

    prime: int
    index: int

    def __post_init__(self) -> None:
        require_prime(self.prime)
        if self.index < 0:
            raise InvalidParameterError(f"index must be nonnegative, got {self.index}")

    def __int__(self) -> int:
        return self.index


@total_ordering
@dataclass(frozen=True)
class NormValue:
    """Exact ultrametric norm: zero, or p**exponent."""

    exponent: int | None = None  # None is the zero norm

    @classmethod
    def zero(cls) -> NormValue:
        return cls(None)

    @classmethod
    def of(cls, exponent: int) -> NormValue:
        return cls(int(exponent))

    @property
    def is_zero(self) -> bool:
        return self.exponent is None

    def to_float(self, p: int) -> float:
        if self.exponent is None:
            return 0.0
        return math.exp(self.exponent * math.log(p))

    def __lt__(self, other: object) -> bool:
        if not isinstance(other, NormValue):
            return NotImplemented
        if self.exponent is None:
            return other.exponent is not None
        if other.exponent is None:
            return False
        return self.exponent < other.exponent

    def __str__(self) -> str:
        return "zero" if self.exponent is None else f"p^{self.exponent}"


@dataclass(frozen=True)
class PAdicDigits:
    """Terminating p-adic expansion x = sum_{i=start}^{start+len-1} digits[i-start] p^i.

    Stored canonically: zero digits are trimmed at both ends; zero is
    ``start=0, digits=()``.
    """

    prime: int
    start: int
    digits: tuple[int, ...]

    def __post_init__(self) -> None:
        require_prime(self.prime)
        digits = tuple(int(d) for d in self.digits)
        for d in digits:
            if not 0 <= d < self.prime:
                raise InvalidParameterError(f"digit {d} outside 0..{self.prime - 1}")
        start = self.start
        lo = 0
        while lo < len(digits) and digits[lo] == 0:
            lo += 1
        hi = len(digits)
        while hi > lo and digits[hi - 1] == 0:
            hi -= 1
        digits = digits[lo:hi]
        start = start + lo if digits else 0
        object.__setattr__(self, "digits", digits)
        object.__setattr__(self, "start", start)

    @property
    def is_zero(self) -> bool:
        return not self.digits

    def digit(self, i: int) -> int:
        """Coefficient of p**i (zero outside the stored range)."""
        offset = i - self.start
        if 0 <= offset < len(self.digits):
            return self.digits[offset]
        return 0


# ---------------------------------------------------------------------------
# Series and wavelets
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SampledSeries:
    """Samples indexed 0..N-1; sample m is the mean over a ball of radius p**level."""

    prime: int
    level: int
    samples: np.ndarray

    def __post_init__(self) -> None:
        require_prime(self.prime)
        if self.level < 0:
            raise InvalidParameterError(f"level must be >= 0, got {self.level}")
        samples = np.array(self.samples, dtype=np.complex128).reshape(-1)
        if samples.size < 1:
            raise InvalidLengthError("series must contain at least one sample")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return int(self.samples.size)

    def with_samples(self, samples: np.ndarray, level: int | None = None) -> SampledSeries:
        return SampledSeries(self.prime, self.level if level is None else level, samples)

    @property
    def window_exponent(self) -> int | None:
        """J - level when the length is an exact power of p."""
        return power_exponent(len(self), self.prime)


@dataclass(frozen=True, order=True)
class WaveletIndex:
    """Wavelet (k, j, ball); the ball covers samples [b p^(j-l), (b+1) p^(j-l))."""

    k: int
    j: int
    ball: int


@dataclass(frozen=True, eq=False)
class WaveletCoefficients:
    """Orthonormal expansion of a window of p**(J-level) samples.

    ``details[j]`` has shape (p**(J-j), p-1); entry [b, k-1] is the
    coefficient of wavelet (k, j, b).
    """

    prime: int
    J: int
    level: int
    mean: complex
    details: dict[int, np.ndarray]

    def __getitem__(self, w: WaveletIndex) -> complex:
        if w.j not in self.details or not 1 <= w.k < self.prime:
            raise KeyError(w)
        block = self.details[w.j]
        if not 0 <= w.ball < block.shape[0]:
            raise KeyError(w)
        return complex(block[w.ball, w.k - 1])

    def items(self) -> Iterator[tuple[WaveletIndex, complex]]:
        """Detail coefficients in canonical order (j, ball, k ascending)."""
        for j in sorted(self.details):
            block = self.details[j]
            for b in range(block.shape[0]):
                for k in range(1, self.prime):
                    yield WaveletIndex(k, j, b), complex(block[b, k - 1])

    def __len__(self) -> int:
        return 1 + sum(int(block.size) for block in self.details.values())

    def to_vector(self) -> np.ndarray:
        """Mean coefficient followed by the details in canonical order."""
        parts = [np.array([self.mean], dtype=np.complex128)]
        parts.extend(self.details[j].reshape(-1) for j in sorted(self.details))
        return np.concatenate(parts)

    def energy(self) -> float:
        return float(np.sum(np.abs(self.to_vector()) ** 2))


# ---------------------------------------------------------------------------
# Operator and stochastic-model configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OperatorConfig:
    """Discretized Vladimirov operator on a window of ``length`` = p**J points."""

    prime: int
    alpha: float
    length: int
    mode: OperatorMode = "finite-section"

    def __post_init__(self) -> None:
        require_prime(self.prime)
        if not self.alpha > 0:
            raise InvalidParameterError(f"alpha must be > 0, got {self.alpha}")
        if self.mode not in ("finite-section", "zero-extended"):
            raise InvalidParameterError(f"unknown operator mode {self.mode!r}")
        if power_exponent(self.length, self.prime) is None:
            raise InvalidLengthError(
                f"window length {self.length} is not a power of {self.prime}"
            )

    @property
    def J(self) -> int:
        J = power_exponent(self.length, self.prime)
        assert J is not None
        return J


@dataclass(frozen=True)
class CovarianceModel:
    """Closed-form covariance of the discretized fractional Brownian motion.

    ``variant`` selects the constant-term prefactor at level >= 1:
    "paper" uses p^-l, "alternative" uses p^((2 alpha - 1) l).
    """

    prime: int
    alpha: float
    level: int = 0
    variant: ModelVariant = "paper"

    def __post_init__(self) -> None:
        require_prime(self.prime)
        if not self.alpha > 0:
            raise InvalidParameterError(f"alpha must be > 0, got {self.alpha}")
        if self.level < 0:
            raise InvalidParameterError(f"level must be >= 0, got {self.level}")
        if self.variant not in ("paper", "alternative"):
            raise InvalidParameterError(f"unknown model variant {self.variant!r}")


@dataclass(frozen=True)
class SimulationConfig:
    """Exact window simulation: p**(J-level) samples, ``realizations`` draws."""

    prime: int
    alpha: float
    J: int
    level: int = 0
    realizations: int = 1
    seed: int = 0
    output: OutputMode = "complex"

    def __post_init__(self) -> None:
        require_prime(self.prime)
        if not self.alpha > 0:
            raise InvalidParameterError(f"alpha must be > 0, got {self.alpha}")
        if self.level < 0:
            raise InvalidParameterError(f"level must be >= 0, got {self.level}")
        if self.J < self.level + 1:
            raise InvalidParameterError(f"J must be >= level + 1, got J={self.J}")
        if self.realizations < 1:
            raise InvalidParameterError("realizations must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise InvalidParameterError(f"seed must fit in 64 bits, got {self.seed}")
        if self.output not in ("complex", "real-part"):
            raise InvalidParameterError(f"unknown output mode {self.output!r}")

    @property
    def window_length(self) -> int:
        return self.prime ** (self.J - self.level)

    def model(self, variant: ModelVariant = "paper") -> CovarianceModel:
        return CovarianceModel(self.prime, self.alpha, self.level, variant)


@dataclass(frozen=True, eq=False)
class SimulationBatch:
    """M realizations stacked as rows of a (M, N) array."""

    config: SimulationConfig
    realizations: np.ndarray

    def __len__(self) -> int:
        return int(self.realizations.shape[0])

    def series(self, m: int) -> SampledSeries:
        return SampledSeries(self.config.prime, self.config.level, self.realizations[m])

    def __iter__(self) -> Iterator[SampledSeries]:
        for m in range(len(self)):
            yield self.series(m)


# ---------------------------------------------------------------------------
# Estimation and reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EmpiricalCovariance:
    """Sample second moments E[conj F(x) F(y)] with per-entry standard errors."""

    matrix: np.ndarray
    standard_errors: np.ndarray
    realizations: int
    config: SimulationConfig | None = None


@dataclass(frozen=True)
class VariantScore:
    variant: str
    max_abs_z: float
    frac_within_2: float
    frac_within_5: float
    total_sq_z: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "variant": self.variant,
            "max_abs_z": self.max_abs_z,
            "frac_within_2": self.frac_within_2,
            "frac_within_5": self.frac_within_5,
            "total_sq_z": self.total_sq_z,
        }


@dataclass(frozen=True)
class VerificationReport:
    """Model-vs-empirical z-score summary."""

    max_abs_z: float
    frac_within_2: float
    frac_within_5: float
    entries: int
    exact_mismatches: int
    variant_scores: dict[str, VariantScore] = field(default_factory=dict)
    winner: str | None = None
    variant: str | None = None

    @property
    def accepted_variants(self) -> list[str]:
        return sorted(v for v, s in self.variant_scores.items() if s.max_abs_z <= 5.0)

    def to_dict(self) -> dict[str, Any]:
        result: dict[str, Any] = {
            "max_abs_z": self.max_abs_z,
            "frac_within_2": self.frac_within_2,
            "frac_within_5": self.frac_within_5,
            "entries": self.entries,
            "exact_mismatches": self.exact_mismatches,
        }
        if self.variant is not None:
            result["variant"] = self.variant
        if self.variant_scores:
            result["variant_scores"] = {
                name: score.to_dict() for name, score in sorted(self.variant_scores.items())
            }
            result["winner"] = self.winner
            result["accepted_variants"] = self.accepted_variants
        return result


@dataclass(frozen=True)
class WhitenessReport:
    """Statistics of noise coefficients recovered from simulated paths."""

    realizations: int
    coefficients: int
    max_variance_z: float
    max_correlation_z: float
    max_mean_z: float
    variance_outliers: int
    correlation_outliers: int
    mean_outliers: int
    threshold: float = 3.0

    @property
    def passed(self) -> bool:
        return self.variance_outliers == 0 and self.correlation_outliers == 0 and (
            self.mean_outliers == 0
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "realizations": self.realizations,
            "coefficients": self.coefficients,
            "threshold": self.threshold,
            "max_variance_z": self.max_variance_z,
            "max_correlation_z": self.max_correlation_z,
            "max_mean_z": self.max_mean_z,
            "variance_outliers": self.variance_outliers,
            "correlation_outliers": self.correlation_outliers,
            "mean_outliers": self.mean_outliers,
            "passed": self.passed,
        }


@dataclass(frozen=True, eq=False)
class VariogramTable:
    """Empirical variogram of one series by ultrametric shell p**exponent."""

    prime: int
    level: int
    exponents: np.ndarray
    pair_counts: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class OrderFit:
    """Log-log fit of a variogram: slope ~ 2 alpha - 1."""

    slope: float
    intercept: float
    alpha: float
    shells: int


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce one CLI run byte for byte."""

    command: str
    parameters: dict[str, Any] = field(default_factory=dict)
    input_digest: str | None = None
    version: str = ""
    schema: str = MANIFEST_SCHEMA

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema": self.schema,
            "command": self.command,
            "parameters": dict(sorted(self.parameters.items())),
            "input_digest": self.input_digest,
            "version": self.version,
        }
