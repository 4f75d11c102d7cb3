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

"""CSV ingestion and emission, length padding and run manifests.

Input series are `index,value` (real) or `index,re,im` (complex) with rows in
index order. Every float is written with 17 significant digits so a CSV
round-trip is lossless.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import re
import sys
from pathlib import Path
from typing import IO, Any, Literal

import numpy as np
import pandas as pd

from padic_series.errors import InputFormatError, InvalidParameterError
from padic_series.models import RunManifest, WaveletCoefficients, require_prime

logger = logging.getLogger(__name__)

PadPolicy = Literal["truncate", "repeat-last", "mean"]
PAD_POLICIES: tuple[str, ...] = ("truncate", "repeat-last", "mean")

FLOAT_FORMAT = "%.17g"

_SERIES_HEADERS = (["index", "value"], ["index", "re", "im"])
_BATCH_HEADERS = (["realization", "index", "value"], ["realization", "index", "re", "im"])
_COEFFICIENT_HEADER = ["k", "j", "ball", "re", "im"]
_PARSER_LINE = re.compile(r"line (\d+)")


# ---------------------------------------------------------------------------
# Reading
# ---------------------------------------------------------------------------


def _read_frame(source: str | Path | IO[str], headers: tuple[list[str], ...]) -> pd.DataFrame:
    try:
        frame = pd.read_csv(source, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise InputFormatError("input is empty", line=1) from None
    except pd.errors.ParserError as exc:
        match = _PARSER_LINE.search(str(exc))
        raise InputFormatError(
            f"malformed row: {exc}", line=int(match.group(1)) if match else None
        ) from None
    columns = [str(c).strip() for c in frame.columns]
    if columns not in [list(h) for h in headers]:
        expected = " or ".join(",".join(h) for h in headers)
        raise InputFormatError(f"header must be {expected}, got {','.join(columns)}", line=1)
    frame.columns = columns
    if frame.empty:
        raise InputFormatError("input contains no samples", line=2)
    return frame


def _numeric(frame: pd.DataFrame, column: str, integer: bool = False) -> np.ndarray:
    text = frame[column].str.strip()
    values = pd.to_numeric(text, errors="coerce")
    bad = values.isna() | ~np.isfinite(values.astype(float))
    if integer:
        bad |= values.astype(float) % 1 != 0
    if bad.any():
        row = int(np.flatnonzero(bad.to_numpy())[0])
        raise InputFormatError(
            f"column {column!r} has invalid value {frame[column].iloc[row]!r}", line=row + 2
        )
    if integer:
        return values.to_numpy().astype(np.int64)
    # to_numeric is not correctly rounded; astype(float) parses like float()
    return text.astype(np.float64).to_numpy()


def _check_order(index: np.ndarray, start_line: int = 2) -> None:
    expected = np.arange(index.size)
    wrong = np.flatnonzero(index != expected)
    if wrong.size:
        row = int(wrong[0])
        raise InputFormatError(
            f"index {index[row]} out of order (expected {row})", line=row + start_line
        )


def read_series(source: str | Path | IO[str]) -> tuple[np.ndarray, bool]:
    """Samples of an `index,value` or `index,re,im` CSV and whether they are complex."""
    frame = _read_frame(source, _SERIES_HEADERS)
    _check_order(_numeric(frame, "index", integer=True))
    if "value" in frame.columns:
        return _numeric(frame, "value").astype(np.complex128), False
    return _numeric(frame, "re") + 1j * _numeric(frame, "im"), True


def read_batch(source: str | Path | IO[str]) -> tuple[np.ndarray, bool]:
    """Stacked `realization,index,...` CSV as an (M, N) array."""
    frame = _read_frame(source, _BATCH_HEADERS)
    realization = _numeric(frame, "realization", integer=True)
    index = _numeric(frame, "index", integer=True)
    if "value" in frame.columns:
        values: np.ndarray = _numeric(frame, "value")
        is_complex = False
    else:
        values = _numeric(frame, "re") + 1j * _numeric(frame, "im")
        is_complex = True
    length = int(index.max()) + 1
    M = int(realization.max()) + 1
    if realization.size != M * length:
        raise InputFormatError(
            f"expected {M} realizations of {length} samples, got {realization.size} rows"
        )
    _check_order(realization * length + index)
    return values.reshape(M, length), is_complex


def read_coefficients(
    source: str | Path | IO[str], p: int, level: int = 0
) -> WaveletCoefficients:
    """Inverse of ``write_coefficients``: rows `k,j,ball,re,im`, mean at k=0, j=0."""
    require_prime(p)
    frame = _read_frame(source, (_COEFFICIENT_HEADER,))
    k = _numeric(frame, "k", integer=True)
    j = _numeric(frame, "j", integer=True)
    ball = _numeric(frame, "ball", integer=True)
    values = _numeric(frame, "re") + 1j * _numeric(frame, "im")

    count = len(frame)
    K = 0
    while p**K < count:
        K += 1
    if p**K != count:
        raise InputFormatError(f"{count} coefficients do not fill a window of {p}^K samples")
    J = K + level
    mean: complex | None = None
    details = {s: np.full((p ** (J - s), p - 1), np.nan + 0j) for s in range(level + 1, J + 1)}
    for row in range(count):
        line = row + 2
        if k[row] == 0 and j[row] == 0:
            if mean is not None:
                raise InputFormatError("duplicate mean coefficient", line=line)
            mean = complex(values[row])
            continue
        scale = int(j[row])
        if scale not in details or not 1 <= k[row] < p or not 0 <= ball[row] < p ** (J - scale):
            raise InputFormatError(
                f"coefficient (k={k[row]}, j={scale}, ball={ball[row]}) is outside the window",
                line=line,
            )
        details[scale][ball[row], k[row] - 1] = values[row]
    if mean is None:
        raise InputFormatError("mean coefficient (k=0, j=0) is missing")
    if any(np.isnan(block).any() for block in details.values()):
        raise InputFormatError("duplicate or missing detail coefficients")
    return WaveletCoefficients(p, J, level, mean, details)


def file_digest(path: str | Path) -> str:
    """sha256 of a file's bytes, as recorded in manifests."""
    digest = hashlib.sha256(Path(path).read_bytes()).hexdigest()
    return f"sha256:{digest}"


# ---------------------------------------------------------------------------
# Padding
# ---------------------------------------------------------------------------


def pad_to_power(
    values: np.ndarray, p: int, policy: PadPolicy = "truncate"
) -> tuple[np.ndarray, dict[str, Any]]:
    """Bring a series to a p-power length.

    ``truncate`` keeps the longest p-power prefix; ``repeat-last`` and ``mean``
    extend to the next p-power with the last sample or the series mean.
    """
    require_prime(p)
    if policy not in PAD_POLICIES:
        raise InvalidParameterError(f"unknown pad policy {policy!r}")
    n = int(values.size)
    if n < 1:
        raise InputFormatError("input contains no samples")
    lower = 1
    while lower * p <= n:
        lower *= p
    upper = lower if lower == n else lower * p

    if policy == "truncate":
        result = values[:lower]
    else:
        fill = values[-1] if policy == "repeat-last" else values.mean()
        result = np.concatenate([values, np.full(upper - n, fill, dtype=values.dtype)])
    info = {"policy": policy, "original_length": n, "length": int(result.size)}
    if result.size != n:
        logger.warning(
            "Series length %d is not a power of %d; %s gives length %d",
            n,
            p,
            policy,
            result.size,
        )
    return result, info


# ---------------------------------------------------------------------------
# Writing
# ---------------------------------------------------------------------------


def _emit(frame: pd.DataFrame, output: str | Path | None, index_label: str | None = None) -> None:
    text = frame.to_csv(
        index=index_label is not None,
        index_label=index_label,
        float_format=FLOAT_FORMAT,
        lineterminator="\n",
    )
    if output is None or str(output) == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


def series_frame(values: np.ndarray) -> pd.DataFrame:
    values = np.asarray(values, dtype=np.complex128)
    return pd.DataFrame(
        {"index": np.arange(values.size), "re": values.real, "im": values.imag}
    )


def write_series(values: np.ndarray, output: str | Path | None) -> None:
    """`index,re,im` CSV."""
    _emit(series_frame(values), output)


def write_batch(paths: np.ndarray, output: str | Path | None) -> None:
    """Stacked `realization,index,re,im` (or `...,value` for real paths) CSV."""
    M, N = paths.shape
    columns: dict[str, Any] = {
        "realization": np.repeat(np.arange(M), N),
        "index": np.tile(np.arange(N), M),
    }
    flat = paths.reshape(-1)
    if np.iscomplexobj(paths):
        columns["re"] = flat.real
        columns["im"] = flat.imag
    else:
        columns["value"] = flat
    _emit(pd.DataFrame(columns), output)


def coefficient_frame(coeffs: WaveletCoefficients) -> pd.DataFrame:
    rows = [(0, 0, 0, coeffs.mean.real, coeffs.mean.imag)]
    rows.extend((w.k, w.j, w.ball, c.real, c.imag) for w, c in coeffs.items())
    return pd.DataFrame(rows, columns=_COEFFICIENT_HEADER)


def write_coefficients(coeffs: WaveletCoefficients, output: str | Path | None) -> None:
    """`k,j,ball,re,im` CSV with the mean coefficient first as k=0, j=0."""
    _emit(coefficient_frame(coeffs), output)


def write_matrix(matrix: np.ndarray, output: str | Path | None) -> None:
    """Dense matrix as CSV: rows x, columns y."""
    _emit(pd.DataFrame(matrix), output, index_label="x")


def write_table(frame: pd.DataFrame, output: str | Path | None) -> None:
    _emit(frame, output)


def json_safe(value: Any) -> Any:
    """Copy of a JSON payload with non-finite floats spelled "inf", "-inf" or "nan"."""
    if isinstance(value, dict):
        return {key: json_safe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(item) for item in value]
    if isinstance(value, (float, np.floating)) and not math.isfinite(value):
        return str(float(value))
    return value


def write_json(payload: dict[str, Any], output: str | Path | None) -> None:
    text = json.dumps(json_safe(payload), indent=2, sort_keys=True, allow_nan=False) + "\n"
    if output is None or str(output) == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


def manifest_path(output: str | Path) -> Path:
    """Sidecar next to an output file: out.csv -> out.manifest.json."""
    path = Path(output)
    return path.with_name(f"{path.stem}.manifest.json")


def write_manifest(manifest: RunManifest, output: str | Path | None) -> Path | None:
    """Write the manifest sidecar of a file output; stdout runs get none."""
    if output is None or str(output) == "-":
        return None
    path = manifest_path(output)
    write_json(manifest.to_dict(), path)
    return path

