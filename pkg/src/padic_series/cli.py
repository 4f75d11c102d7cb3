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

"""Command-line interface.

Every command writes its main result to ``--output`` (stdout when omitted or
``-``). File outputs get a ``<stem>.manifest.json`` sidecar recording every
effective parameter; JSON outputs embed the manifest instead.

Exit codes: 0 ok, 2 bad parameters, 3 bad input, 4 computation error, 5 I/O.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from padic_series import __version__, fbm
from padic_series.errors import InputFormatError, InvalidParameterError, PadicSeriesError
from padic_series.models import (
    CovarianceModel,
    OperatorConfig,
    RunManifest,
    SampledSeries,
    SimulationBatch,
    SimulationConfig,
    UltrametricIndex,
    power_exponent,
    require_prime,
)
from padic_series.padic import index_distance
from padic_series.series_io import (
    PAD_POLICIES,
    file_digest,
    pad_to_power,
    read_batch,
    read_coefficients,
    read_series,
    write_batch,
    write_coefficients,
    write_json,
    write_manifest,
    write_matrix,
    write_series,
    write_table,
)
from padic_series.synthetic import DEFAULT_LENGTH, synthetic_series
from padic_series.variogram import empirical_variogram, fit_order
from padic_series.vladimirov import apply_direct
from padic_series.wavelets import forward, inverse

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PARAMETER = 2
EXIT_INPUT = 3
EXIT_COMPUTATION = 4
EXIT_IO = 5

_MODES = {
    "finite": "finite-section",
    "finite-section": "finite-section",
    "extended": "zero-extended",
    "zero-extended": "zero-extended",
}


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _is_stdout(output: str | None) -> bool:
    return output is None or output == "-"


def _manifest(args: argparse.Namespace, **extra: Any) -> RunManifest:
    parameters: dict[str, Any] = {
        "p": args.p,
        "alpha": args.alpha,
        "level": args.level,
        "J": args.J,
        "realizations": args.realizations,
        "seed": args.seed,
        "mode": _MODES[args.mode],
        "pad": args.pad,
        "variant": args.variant,
    }
    parameters.update(extra)
    digest = file_digest(args.input) if getattr(args, "input", None) else None
    return RunManifest(args.command, parameters, digest, __version__)


def _require_input(args: argparse.Namespace) -> Path:
    if not args.input:
        raise InvalidParameterError(f"{args.command} needs --input")
    return Path(args.input)


def _require_J(args: argparse.Namespace) -> int:
    if args.J is None:
        raise InvalidParameterError(f"{args.command} needs --J")
    return int(args.J)


def _load_padded(args: argparse.Namespace) -> tuple[np.ndarray, dict[str, Any]]:
    values, _ = read_series(_require_input(args))
    return pad_to_power(values, args.p, args.pad)


def _load_or_simulate(args: argparse.Namespace) -> SimulationBatch:
    """A batch from ``--input`` (stacked CSV) or a fresh simulation."""
    if args.input:
        paths, is_complex = read_batch(_require_input(args))
        K = power_exponent(paths.shape[1], args.p)
        if K is None or K < 1:
            raise InputFormatError(
                f"realizations of {paths.shape[1]} samples are not a window of {args.p}^K"
            )
        config = SimulationConfig(
            args.p,
            args.alpha,
            K + args.level,
            args.level,
            paths.shape[0],
            args.seed,
            "complex" if is_complex else "real-part",
        )
        return SimulationBatch(config, paths)
    return fbm.simulate(_simulation_config(args), workers=args.workers)


def _simulation_config(args: argparse.Namespace) -> SimulationConfig:
    return SimulationConfig(
        args.p,
        args.alpha,
        _require_J(args),
        args.level,
        args.realizations,
        args.seed,
        "real-part" if args.real_part else "complex",
    )


def _parse_pairs(text: str) -> list[tuple[int, int]]:
    pairs = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        left, sep, right = item.partition(":")
        if not sep:
            raise InvalidParameterError(f"pair {item!r} is not of the form m:n")
        try:
            pairs.append((int(left), int(right)))
        except ValueError:
            raise InvalidParameterError(f"pair {item!r} is not of the form m:n") from None
    if not pairs:
        raise InvalidParameterError("--pairs is empty")
    return pairs


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_distance(args: argparse.Namespace) -> int:
    if not args.pairs:
        raise InvalidParameterError("distance needs --pairs m:n,...")
    rows = []
    for m, n in _parse_pairs(args.pairs):
        norm = index_distance(UltrametricIndex(args.p, m), UltrametricIndex(args.p, n))
        rows.append({"m": m, "n": n, "exponent": "zero" if norm.is_zero else norm.exponent})
    write_table(pd.DataFrame(rows, columns=["m", "n", "exponent"]), args.output)
    write_manifest(_manifest(args, pairs=args.pairs), args.output)
    return EXIT_OK


def cmd_derivative(args: argparse.Namespace) -> int:
    values, padding = _load_padded(args)
    mode = _MODES[args.mode]
    cfg = OperatorConfig(args.p, args.alpha, int(values.size), mode)  # type: ignore[arg-type]
    out = apply_direct(SampledSeries(args.p, 0, values), cfg)
    logger.info("Applied T_p^alpha to %d samples (mode %s)", values.size, cfg.mode)
    write_series(out.samples, args.output)
    write_manifest(_manifest(args, padding=padding), args.output)
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    config = _simulation_config(args)
    batch = fbm.simulate(config, workers=args.workers)
    write_batch(batch.realizations, args.output)
    write_manifest(_manifest(args, J=config.J, output_mode=config.output), args.output)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    batch = _load_or_simulate(args)
    model = CovarianceModel(args.p, args.alpha, args.level, args.variant)
    report = fbm.verify(model, fbm.estimate(batch))
    payload = report.to_dict()
    payload["manifest"] = _manifest(
        args, J=batch.config.J, realizations=len(batch), output_mode=batch.config.output
    ).to_dict()
    write_json(payload, args.output)
    return EXIT_OK


def cmd_whiteness(args: argparse.Namespace) -> int:
    batch = _load_or_simulate(args)
    report = fbm.whiteness_check(batch, args.alpha)
    payload = report.to_dict()
    payload["manifest"] = _manifest(args, J=batch.config.J, realizations=len(batch)).to_dict()
    write_json(payload, args.output)
    return EXIT_OK


def cmd_covariance(args: argparse.Namespace) -> int:
    J = _require_J(args)
    model = CovarianceModel(args.p, args.alpha, args.level, args.variant)
    matrix = fbm.model_covariance_matrix(model, J)
    table = fbm.variogram_table(model, J)
    write_matrix(matrix, args.output)
    if args.variogram_output:
        write_table(table, args.variogram_output)
    elif _is_stdout(args.output):
        sys.stdout.write("\n")
        write_table(table, None)
    else:
        path = Path(args.output)
        write_table(table, path.with_name(f"{path.stem}.variogram.csv"))
    write_manifest(_manifest(args), args.output)
    return EXIT_OK


def cmd_transform(args: argparse.Namespace) -> int:
    values, padding = _load_padded(args)
    coeffs = forward(SampledSeries(args.p, args.level, values))
    write_coefficients(coeffs, args.output)
    write_manifest(_manifest(args, J=coeffs.J, padding=padding), args.output)
    return EXIT_OK


def cmd_inverse(args: argparse.Namespace) -> int:
    coeffs = read_coefficients(_require_input(args), args.p, args.level)
    write_series(inverse(coeffs).samples, args.output)
    write_manifest(_manifest(args, J=coeffs.J), args.output)
    return EXIT_OK


def cmd_variogram(args: argparse.Namespace) -> int:
    values, padding = _load_padded(args)
    table = empirical_variogram(SampledSeries(args.p, args.level, values))
    fit = fit_order(table, min_exponent=args.min_exponent)
    frame = pd.DataFrame(
        {
            "norm_exponent": table.exponents,
            "pairs": table.pair_counts,
            "variogram": table.values,
            "fitted": np.exp(fit.intercept + fit.slope * table.exponents * np.log(args.p)),
        }
    )
    write_table(frame, args.output)
    fit_record = {
        "slope": fit.slope,
        "intercept": fit.intercept,
        "alpha": fit.alpha,
        "shells": fit.shells,
    }
    write_manifest(_manifest(args, padding=padding, fit=fit_record), args.output)
    return EXIT_OK


def cmd_synthetic(args: argparse.Namespace) -> int:
    values = synthetic_series(args.length, args.seed)
    write_table(pd.DataFrame({"index": np.arange(values.size), "value": values}), args.output)
    write_manifest(_manifest(args, length=args.length), args.output)
    return EXIT_OK


_COMMANDS = {
    "distance": (cmd_distance, "Exact ultrametric distances of index pairs."),
    "derivative": (cmd_derivative, "Fractional derivative of a CSV series."),
    "simulate": (cmd_simulate, "Simulate fractional p-adic Brownian motion on a window."),
    "verify": (cmd_verify, "Check simulated covariances against the closed-form model."),
    "whiteness": (cmd_whiteness, "Check that recovered noise coefficients are white."),
    "covariance": (cmd_covariance, "Model covariance matrix and staircase variogram table."),
    "transform": (cmd_transform, "p-adic wavelet coefficients of a CSV series."),
    "inverse": (cmd_inverse, "Reconstruct a series from transform output."),
    "variogram": (cmd_variogram, "Empirical ultrametric variogram and fitted order."),
    "synthetic": (cmd_synthetic, "Write the bundled synthetic pressure-like series."),
}


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=2, help="prime p (default 2)")
    common.add_argument("--alpha", type=float, default=1.0, help="order alpha > 0 (default 1)")
    common.add_argument("--level", type=int, default=0, help="discretization level l")
    common.add_argument("--J", type=int, default=None, help="window exponent (p^(J-l) samples)")
    common.add_argument(
        "--realizations", "--M", dest="realizations", type=int, default=1000,
        help="realization count M (default 1000)",
    )
    common.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    common.add_argument("--mode", choices=sorted(_MODES), default="finite",
                        help="operator mode (default finite)")
    common.add_argument("--pad", choices=PAD_POLICIES, default="truncate",
                        help="length policy for non p-power inputs (default truncate)")
    common.add_argument("--variant", choices=["paper", "alternative"], default="paper",
                        help="constant-term prefactor at level >= 1")
    common.add_argument("--input", default=None, help="input CSV")
    common.add_argument("--output", default=None, help="output path (default stdout)")
    common.add_argument("--verbose", action="store_true", help="log progress")
    common.add_argument("--debug", action="store_true", help="log per-scale detail")

    parser = argparse.ArgumentParser(
        prog="padic-series", description="p-adic analysis of time series."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    parsers = {
        name: sub.add_parser(name, parents=[common], help=text, description=text)
        for name, (_, text) in _COMMANDS.items()
    }
    parsers["distance"].add_argument("--pairs", default=None, help="pairs m:n,m:n,...")
    for name in ("simulate", "verify", "whiteness"):
        parsers[name].add_argument("--workers", type=int, default=None,
                                   help="simulation threads (PADIC_SERIES_WORKERS)")
        parsers[name].add_argument("--real-part", action="store_true",
                                   help="keep only Re F (covariance halves)")
    parsers["covariance"].add_argument("--variogram-output", default=None,
                                       help="path for the variogram table")
    parsers["variogram"].add_argument("--min-exponent", type=int, default=None,
                                      help="smallest shell exponent used by the fit")
    parsers["synthetic"].add_argument("--length", type=int, default=DEFAULT_LENGTH,
                                      help=f"series length (default {DEFAULT_LENGTH})")
    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.DEBUG if args.debug else logging.INFO if args.verbose else logging.WARNING
    logging.basicConfig(
        level=level,
        format="[padic-series] %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def _fail(message: str, code: int) -> int:
    print(f"[padic-series] error: {message}", file=sys.stderr)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args)
    handler = _COMMANDS[args.command][0]
    try:
        require_prime(args.p)
        return handler(args)
    except InvalidParameterError as e:
        return _fail(str(e), EXIT_PARAMETER)
    except InputFormatError as e:
        return _fail(str(e), EXIT_INPUT)
    except PadicSeriesError as e:
        return _fail(str(e), EXIT_COMPUTATION)
    except OSError as e:
        return _fail(str(e), EXIT_IO)


if __name__ == "__main__":
    sys.exit(main())
