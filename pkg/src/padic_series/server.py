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

"""MCP server for p-adic series analysis.

Exposes the analysis query functions as MCP tools over stdio.

Usage:
    padic-series-mcp
    PADIC_SERIES_MAX_DENSE=8192 python -m padic_series.server
"""

from __future__ import annotations

import json
import sys
import time
import traceback
from typing import Any

import mcp.types as types
from mcp.server import Server
from mcp.server.stdio import stdio_server
from mcp.types import TextContent, Tool

from padic_series import __version__
from padic_series.query_api import create_analysis_functions
from padic_series.series_io import json_safe

# ---------------------------------------------------------------------------
# Module-level state
# ---------------------------------------------------------------------------

server = Server("padic-series")

_query_fns: dict | None = None

# Session usage stats
_session_start: float = time.time()
_tool_call_counts: dict[str, int] = {}
_total_chars_returned: int = 0


def _log(message: str) -> None:
    print(f"[padic-series] {message}", file=sys.stderr)


def _format_result(value: object) -> str:
    """Format a query result as readable text."""
    if isinstance(value, str):
        return value
    if isinstance(value, (dict, list)):
        return json.dumps(json_safe(value), indent=2, default=str, allow_nan=False)
    return str(value)


def _format_duration(seconds: float) -> str:
    seconds = int(seconds)
    if seconds < 60:
        return f"{seconds}s"
    minutes, seconds = divmod(seconds, 60)
    if minutes < 60:
        return f"{minutes}m {seconds}s"
    hours, minutes = divmod(minutes, 60)
    return f"{hours}h {minutes}m"


def _format_usage_stats() -> str:
    """Format session usage statistics."""
    elapsed = time.time() - _session_start
    total_calls = sum(_tool_call_counts.values())
    query_calls = total_calls - _tool_call_counts.get("get_usage_stats", 0)

    lines = [
        f"padic-series {__version__}",
        f"Session duration: {_format_duration(elapsed)}",
        f"Total queries: {query_calls}",
    ]
    if query_calls:
        lines.append("")
        lines.append("Queries by tool:")
        for tool_name, count in sorted(_tool_call_counts.items(), key=lambda x: -x[1]):
            if tool_name == "get_usage_stats":
                continue
            lines.append(f"  {tool_name}: {count}")
    lines.append("")
    lines.append(f"Total chars returned: {_total_chars_returned:,}")
    return "\n".join(lines)


def _ensure_functions() -> dict:
    global _query_fns
    if _query_fns is None:
        _query_fns = create_analysis_functions()
        _log(f"Analysis functions ready ({len(_query_fns)} tools)")
    return _query_fns


# ---------------------------------------------------------------------------
# Tool definitions
# ---------------------------------------------------------------------------

_P = {"type": "integer", "description": "Prime p."}
_ALPHA = {"type": "number", "description": "Order alpha > 0."}
_J = {"type": "integer", "description": "Window exponent: p^(J-level) samples."}
_LEVEL = {"type": "integer", "description": "Discretization level l (default 0)."}
_VARIANT = {
    "type": "string",
    "enum": ["paper", "alternative"],
    "description": "Constant-term prefactor at level >= 1 (default paper).",
}
_VALUES = {
    "type": "array",
    "description": "Samples: numbers, or [re, im] pairs.",
    "items": {},
}

TOOLS = [
    Tool(
        name="distance",
        description="Exact ultrametric distance |m - n|_p of natural-number index pairs.",
        inputSchema={
            "type": "object",
            "properties": {
                "p": _P,
                "pairs": {
                    "type": "array",
                    "description": "Index pairs [[m, n], ...].",
                    "items": {"type": "array", "items": {"type": "integer"}},
                },
            },
            "required": ["p", "pairs"],
        },
    ),
    Tool(
        name="rho",
        description="Quadratic correlation rho_l of the fractional p-adic Brownian motion.",
        inputSchema={
            "type": "object",
            "properties": {
                "p": _P,
                "alpha": _ALPHA,
                "exponent": {
                    "type": ["integer", "null"],
                    "description": "Norm exponent e (norm p^e); null for the zero norm.",
                },
                "level": _LEVEL,
                "variant": _VARIANT,
            },
            "required": ["p", "alpha", "exponent"],
        },
    ),
    Tool(
        name="covariance_matrix",
        description="Closed-form covariance matrix over the window samples.",
        inputSchema={
            "type": "object",
            "properties": {"p": _P, "alpha": _ALPHA, "J": _J, "level": _LEVEL, "variant": _VARIANT},
            "required": ["p", "alpha", "J"],
        },
    ),
    Tool(
        name="variogram_table",
        description="Model variogram over real lags; constant on equal-norm runs (staircase).",
        inputSchema={
            "type": "object",
            "properties": {"p": _P, "alpha": _ALPHA, "J": _J, "level": _LEVEL, "variant": _VARIANT},
            "required": ["p", "alpha", "J"],
        },
    ),
    Tool(
        name="transform",
        description="Orthonormal p-adic wavelet coefficients of a window of p^K samples.",
        inputSchema={
            "type": "object",
            "properties": {"p": _P, "values": _VALUES, "level": _LEVEL},
            "required": ["p", "values"],
        },
    ),
    Tool(
        name="derivative",
        description="Fractional derivative (Vladimirov operator) of a series.",
        inputSchema={
            "type": "object",
            "properties": {
                "p": _P,
                "alpha": _ALPHA,
                "values": _VALUES,
                "mode": {
                    "type": "string",
                    "enum": ["finite-section", "zero-extended"],
                    "description": "Operator mode (default finite-section).",
                },
                "pad": {
                    "type": "string",
                    "enum": ["truncate", "repeat-last", "mean"],
                    "description": "How to reach a p-power length (default truncate).",
                },
            },
            "required": ["p", "alpha", "values"],
        },
    ),
    Tool(
        name="simulate_summary",
        description="Simulate the process, estimate its covariance and verify it against the model.",
        inputSchema={
            "type": "object",
            "properties": {
                "p": _P,
                "alpha": _ALPHA,
                "J": _J,
                "level": _LEVEL,
                "realizations": {"type": "integer", "description": "Realizations (default 2000)."},
                "seed": {"type": "integer", "description": "Master seed (default 0)."},
                "variant": _VARIANT,
            },
            "required": ["p", "alpha", "J"],
        },
    ),
    Tool(
        name="get_usage_stats",
        description="Session stats: tool calls and characters returned.",
        inputSchema={
            "type": "object",
            "properties": {},
        },
    ),
]

_TOOL_NAMES = {tool.name for tool in TOOLS}


# ---------------------------------------------------------------------------
# MCP handlers
# ---------------------------------------------------------------------------


@server.list_tools()
async def list_tools() -> list[Tool]:
    return TOOLS


@server.call_tool()
async def call_tool(name: str, arguments: dict[str, Any]) -> list[types.TextContent]:
    global _total_chars_returned

    _tool_call_counts[name] = _tool_call_counts.get(name, 0) + 1

    try:
        if name == "get_usage_stats":
            return [TextContent(type="text", text=_format_usage_stats())]
        if name not in _TOOL_NAMES:
            return [TextContent(type="text", text=f"Error: unknown tool '{name}'")]

        result = _ensure_functions()[name](**(arguments or {}))

        formatted = _format_result(result)
        _total_chars_returned += len(formatted)
        return [TextContent(type="text", text=formatted)]

    except Exception as e:
        tb = traceback.format_exc()
        _log(f"Error in {name}: {tb}")
        return [TextContent(type="text", text=f"Error: {e}")]


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


async def main() -> None:
    _log(f"Starting padic-series {__version__} over stdio")
    async with stdio_server() as (read_stream, write_stream):
        await server.run(
            read_stream,
            write_stream,
            server.create_initialization_options(),
        )


def main_sync() -> None:
    """Synchronous entry point for console_scripts."""
    import asyncio

    asyncio.run(main())


if __name__ == "__main__":
    main_sync()
