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

"""Error kinds raised by the library and mapped to CLI exit codes."""

from __future__ import annotations


class PadicSeriesError(Exception):
    """Base class for every error raised by padic-series."""


class InvalidParameterError(PadicSeriesError, ValueError):
    """A parameter is outside its domain (non-prime p, alpha <= 0, bad level...)."""


class InvalidLengthError(PadicSeriesError, ValueError):
    """A series length does not fit the requested block or window structure."""


class PreconditionError(PadicSeriesError, ValueError):
    """An input violates a documented precondition of an operation."""


class ResourceLimitError(PadicSeriesError, RuntimeError):
    """A dense object would exceed the configured size cap."""


class InputFormatError(PadicSeriesError, ValueError):
    """Ingested data is malformed. ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
