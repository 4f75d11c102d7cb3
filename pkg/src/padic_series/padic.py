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

"""Exact arithmetic on Q_p/Z_p through the Monna correspondence.

A natural number n = sum d_j p^j stands for the fraction
eta^-1(n) = sum d_j p^-(j+1) in Q_p/Z_p. The ultrametric norm of a difference
is decided by the highest base-p digit at which two indices differ, so blocks
of p^e consecutive naturals are exactly the balls of radius p^e.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction

import numpy as np

from padic_series.errors import InvalidParameterError
from padic_series.models import (
    NormValue,
    PAdicDigits,
    UltrametricIndex,
    is_prime,
    require_prime,
)

__all__ = [
    "add_index_arrays",
    "ball",
    "character",
    "character_of_fraction",
    "digits_of_index",
    "digits_to_index",
    "distance_exponent",
    "distance_exponent_matrix",
    "fractional_part",
    "group_add",
    "group_neg",
    "group_sub",
    "index_distance",
    "index_fraction",
    "index_from_digits",
    "index_to_digits",
    "is_prime",
    "monna_real",
    "padic_digits",
    "padic_norm",
    "padic_value",
    "shell_size",
    "valuation",
]


# ---------------------------------------------------------------------------
# Digits
# ---------------------------------------------------------------------------


def digits_of_index(n: int, p: int) -> list[int]:
    """Base-p digits of n, least significant first; [] for n = 0."""
    require_prime(p)
    if n < 0:
        raise InvalidParameterError(f"index must be nonnegative, got {n}")
    digits: list[int] = []
    while n:
        n, d = divmod(n, p)
        digits.append(d)
    return digits


def index_from_digits(digits: list[int] | tuple[int, ...], p: int) -> int:
    n = 0
    for d in reversed(digits):
        n = n * p + d
    return n


def index_fraction(x: UltrametricIndex) -> Fraction:
    """eta^-1(n) as an exact rational in [0, 1)."""
    p = x.prime
    total = Fraction(0)
    for j, d in enumerate(digits_of_index(x.index, p)):
        if d:
            total += Fraction(d, p ** (j + 1))
    return total


def index_to_digits(x: UltrametricIndex) -> PAdicDigits:
    """The fraction of an index as a p-adic expansion (digits at i <= -1)."""
    digits = digits_of_index(x.index, x.prime)
    return PAdicDigits(x.prime, -len(digits), tuple(reversed(digits)))


def digits_to_index(x: PAdicDigits) -> UltrametricIndex:
    """Index of the fractional part of x (its coset in Q_p/Z_p)."""
    n = 0
    for i in range(min(x.start, 0), 0):
        n += x.digit(i) * x.prime ** (-i - 1)
    return UltrametricIndex(x.prime, n)


# ---------------------------------------------------------------------------
# Terminating p-adic numbers
# ---------------------------------------------------------------------------


def valuation(r: Fraction | int, p: int) -> int | None:
    """p-adic valuation of a rational; None for zero."""
    r = Fraction(r)
    if r == 0:
        return None
    v = 0
    num, den = r.numerator, r.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def padic_norm(r: Fraction | int, p: int) -> NormValue:
    """|r|_p as an exact NormValue (exponent -v)."""
    v = valuation(r, p)
    return NormValue.zero() if v is None else NormValue.of(-v)


def padic_digits(r: Fraction | int, p: int) -> PAdicDigits:
    """Terminating expansion of a nonnegative rational with p-power denominator."""
    require_prime(p)
    r = Fraction(r)
    if r < 0:
        raise InvalidParameterError(f"{r} has no terminating {p}-adic expansion")
    den = r.denominator
    m = 0
    while den % p == 0:
        den //= p
        m += 1
    if den != 1:
        raise InvalidParameterError(f"denominator of {r} is not a power of {p}")
    # r.denominator == p**m here, so the numerator carries the digits
    return PAdicDigits(p, -m, tuple(digits_of_index(r.numerator, p)))


def padic_value(x: PAdicDigits) -> Fraction:
    """The rational sum x_i p^i."""
    total = Fraction(0)
    for offset, d in enumerate(x.digits):
        total += d * Fraction(x.prime) ** (x.start + offset)
    return total


def fractional_part(x: PAdicDigits) -> Fraction:
    """sum_{i<0} x_i p^i, a rational in [0, 1)."""
    total = Fraction(0)
    for i in range(x.start, 0):
        d = x.digit(i)
        if d:
            total += Fraction(d, x.prime ** (-i))
    return total


def monna_real(x: PAdicDigits) -> Fraction:
    """Monna map: sum x_i p^i -> sum x_i p^(-i-1), exactly."""
    total = Fraction(0)
    for offset, d in enumerate(x.digits):
        if d:
            total += d * Fraction(x.prime) ** (-(x.start + offset) - 1)
    return total


# ---------------------------------------------------------------------------
# Distance and group structure on indices
# ---------------------------------------------------------------------------


def _check_same_prime(m: UltrametricIndex, n: UltrametricIndex) -> int:
    if m.prime != n.prime:
        raise InvalidParameterError(f"prime mismatch: {m.prime} vs {n.prime}")
    return m.prime


def distance_exponent(m: int, n: int, p: int) -> int:
    """Smallest t with m // p^t == n // p^t; the distance is p^t (zero when t = 0)."""
    t = 0
    while m != n:
        m //= p
        n //= p
        t += 1
    return t


def index_distance(m: UltrametricIndex, n: UltrametricIndex) -> NormValue:
    """|eta^-1(m) - eta^-1(n)|_p."""
    p = _check_same_prime(m, n)
    t = distance_exponent(m.index, n.index, p)
    return NormValue.zero() if t == 0 else NormValue.of(t)


def distance_exponent_matrix(size: int, p: int) -> np.ndarray:
    """Exponents t(x, y) for all index pairs of 0..size-1 (0 on the diagonal)."""
    idx = np.arange(size, dtype=np.int64)
    a = np.broadcast_to(idx[:, None], (size, size))
    b = np.broadcast_to(idx[None, :], (size, size))
    exps = np.zeros((size, size), dtype=np.int64)
    while True:
        differ = a != b
        if not differ.any():
            return exps
        exps += differ
        a = a // p
        b = b // p


def _add_digits(a: int, b: int, p: int, sign: int) -> int:
    # carries run from high digit positions (small p-adic weight) toward position 0
    width = max(len(digits_of_index(a, p)), len(digits_of_index(b, p)))
    result = 0
    carry = 0
    for t in reversed(range(width)):
        s = (a // p**t) % p + sign * ((b // p**t) % p) + carry
        carry, digit = divmod(s, p)
        result += digit * p**t
    return result


def group_add(m: UltrametricIndex, n: UltrametricIndex) -> UltrametricIndex:
    """Index of eta^-1(m) + eta^-1(n) mod 1."""
    p = _check_same_prime(m, n)
    return UltrametricIndex(p, _add_digits(m.index, n.index, p, 1))


def group_sub(m: UltrametricIndex, n: UltrametricIndex) -> UltrametricIndex:
    """The unique c with group_add(c, n) == m."""
    p = _check_same_prime(m, n)
    return UltrametricIndex(p, _add_digits(m.index, n.index, p, -1))


def group_neg(n: UltrametricIndex) -> UltrametricIndex:
    return group_sub(UltrametricIndex(n.prime, 0), n)


def add_index_arrays(a: np.ndarray, b: np.ndarray, p: int, width: int) -> np.ndarray:
    """Vectorized group_add for indices below p**width."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    result = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.int64)
    carry = np.zeros_like(result)
    for t in reversed(range(width)):
        scale = p**t
        s = (a // scale) % p + (b // scale) % p + carry
        carry = s // p
        result += (s % p) * scale
    return result


def ball(center: UltrametricIndex, exponent: int) -> range:
    """Indices within distance p**exponent of center: one block of p**exponent naturals."""
    if exponent < 0:
        raise InvalidParameterError(f"ball exponent must be >= 0, got {exponent}")
    size = center.prime**exponent
    first = (center.index // size) * size
    return range(first, first + size)


def shell_size(exponent: int, p: int) -> int:
    """Number of indices at distance exactly p**exponent from a point (exponent >= 1)."""
    if exponent < 1:
        raise InvalidParameterError(f"shell exponent must be >= 1, got {exponent}")
    return p**exponent - p ** (exponent - 1)


# ---------------------------------------------------------------------------
# Additive character
# ---------------------------------------------------------------------------


def character_of_fraction(r: Fraction) -> complex:
    """exp(2 pi i frac(r)); for p-power denominators the real and p-adic fractional parts agree."""
    frac = r - math.floor(r)
    return cmath.exp(2j * math.pi * float(frac))


def character(x: PAdicDigits) -> complex:
    """chi(x) = exp(2 pi i sum_{i<0} x_i p^i)."""
    frac = fractional_part(x)
    if frac == 0:
        return 1 + 0j
    return cmath.exp(2j * math.pi * float(frac))
