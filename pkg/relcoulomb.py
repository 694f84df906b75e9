#!/usr/bin/env python3
"""
Relativistic Coulomb Green's Matrix CLI
=======================================
Command-line interface for level tables, pole scans, Green's matrices and
Sturmian sampling.

Usage:
    python relcoulomb.py table1
    python relcoulomb.py spectrum --level 2P3/2 --Z 1
    python relcoulomb.py green --binding -0.3 --rank 2
    python relcoulomb.py basis --n 0 --u 0 --eta 1 --r 1.0
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

# Add the repository root to the path so the src package imports
sys.path.insert(0, str(Path(__file__).parent))

from src.core.basis import RadialGrid, SturmianParams, overlap_numeric, sturmian_eval
from src.core.exceptions import (
    BracketError,
    ConfigurationError,
    ContinuedFractionError,
    DomainError,
    NearPoleError,
    QuadratureError,
    SingularTruncationError,
)
from src.core.greens import CONDITION_FLOOR, green_matrix, truncated_inverse_oracle
from src.core.model import Channel, PhysicalConstants
from src.core.spectrum import PoleSearchConfig, find_poles, solve_channel_level, solve_level, table1
from src.utils import export
from src.utils.config import OUTPUT_FORMATS, Settings, load_settings
from src.utils.labels import parse_level_label

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NONCONVERGENCE = 3
EXIT_TOLERANCE = 4
EXIT_NUMERIC = 5

BIORTHOGONALITY_TOLERANCE = 1e-9


def _is_negative_value(token: str) -> bool:
    """True for "-1e-10" or "-0.6:-0.01", which argparse would take for flags."""
    if not token.startswith("-") or len(token) < 2:
        return False
    try:
        for part in token.split(":"):
            float(part)
    except ValueError:
        return False
    return True


def _normalize_argv(argv: List[str]) -> List[str]:
    """Glue negative values to their option, e.g. "--binding -1e-10" -> "--binding=-1e-10"."""
    out = []
    i = 0
    while i < len(argv):
        token = argv[i]
        if (token.startswith("-") and "=" not in token and not _is_negative_value(token)
                and i + 1 < len(argv) and _is_negative_value(argv[i + 1])):
            out.append(f"{token}={argv[i + 1]}")
            i += 2
            continue
        out.append(token)
        i += 1
    return out


def _parse_window(text: str):
    try:
        lower, upper = (float(part) for part in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must look like -0.6:-0.01, got {text!r}")
    return lower, upper


def build_parser() -> argparse.ArgumentParser:
    # shared flags go after the subcommand name
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=float, help="Fine-structure constant (default: 1/137.0359895)")
    common.add_argument("--mass", type=float, help="Particle mass in atomic units (default: 1)")
    common.add_argument("--eta", help="Sturmian scale eta, or 'auto' for seeded solves")
    common.add_argument("--rank", "-N", type=int, help="Rank N of the Green's matrix (default: 2)")
    common.add_argument("--tol", type=float, help="Continued-fraction tolerance (default: 1e-15)")
    common.add_argument("--max-terms", type=int, help="Continued-fraction term cap (default: 1000000)")
    common.add_argument("--format", "-f", choices=OUTPUT_FORMATS, dest="output_format",
                        help="Output format (default: table)")
    common.add_argument("--out", "-o", help="Write output to this file instead of stdout")
    common.add_argument("--digits", type=int, default=10, help="Decimals for energies (default: 10)")
    common.add_argument("--workers", type=int, help="Threads for table rows (default: 4)")
    common.add_argument("--env-file", help="Read RELCOULOMB_* settings from this .env file")
    common.add_argument("--verbose", "-v", action="store_true", help="Debug logging on stderr")

    channel = argparse.ArgumentParser(add_help=False)
    channel.add_argument("--Z", type=float, default=1.0, help="Nuclear charge (default: 1)")
    channel.add_argument("--equation", choices=("dirac", "kg"), default="dirac",
                         help="Second-order Dirac or Klein-Gordon (default: dirac)")
    channel.add_argument("--two-j", type=int, default=1, help="2j for Dirac channels (default: 1)")
    channel.add_argument("--branch", choices=("plus", "minus"), default="plus",
                         help="Dirac spin branch (default: plus)")
    channel.add_argument("--l", type=int, default=0, help="Orbital l for Klein-Gordon channels (default: 0)")

    parser = argparse.ArgumentParser(
        description="Relativistic Coulomb Green's matrices on the Coulomb-Sturmian basis",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s table1
  %(prog)s table1 --format json --out table1.json
  %(prog)s spectrum --Z 1 --equation dirac --two-j 1 --branch plus --window -0.6:-0.01
  %(prog)s spectrum --level 50P3/2 --Z 1
  %(prog)s spectrum --equation kg --l 0 --Z 1 --window -0.6:-0.01
  %(prog)s green --binding -0.3 --rank 2 --compare-oracle 2000
  %(prog)s basis --n 0 --u 0 --eta 1 --r 1.0 --check
        """
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("table1", parents=[common], help="Reproduce the hydrogen/uranium level table")

    spectrum = sub.add_parser("spectrum", parents=[common, channel], help="Find poles in a channel")
    spectrum.add_argument("--level", help="Solve one level, e.g. 2P3/2 (Dirac plus branch)")
    spectrum.add_argument("--n-index", type=int, help="Solve the pole with this Sturmian index")
    spectrum.add_argument("--window", type=_parse_window, default=(-0.6, -0.01),
                          help="Binding-energy scan window lo:hi (default: -0.6:-0.01)")
    spectrum.add_argument("--grid-points", type=int, default=400, help="Scan grid size (default: 400)")
    spectrum.add_argument("--spacing", choices=("geometric", "linear"), default="geometric",
                          help="Scan grid spacing (default: geometric)")

    green = sub.add_parser("green", parents=[common, channel], help="Evaluate a Green's matrix")
    green.add_argument("--binding", type=float, required=True, help="Binding energy in Hartree")
    green.add_argument("--imag", type=float, default=0.0, help="Imaginary part of the energy")
    green.add_argument("--strict", action="store_true", help="Fail instead of warning near a pole")
    green.add_argument("--compare-oracle", type=int, metavar="K",
                       help="Also invert the K x K truncation and report the difference")

    basis = sub.add_parser("basis", parents=[common, channel], help="Sample a Coulomb-Sturmian")
    basis.add_argument("--n", type=int, default=0, help="Sturmian index (default: 0)")
    basis.add_argument("--u", type=float, help="Angular parameter u (default: from channel flags)")
    basis.add_argument("--r", type=float, nargs="+", help="Explicit radii to sample")
    basis.add_argument("--r-min", type=float, default=0.1, help="First radius (default: 0.1)")
    basis.add_argument("--r-max", type=float, default=30.0, help="Last radius (default: 30)")
    basis.add_argument("--step", type=float, default=0.1, help="Radial step (default: 0.1)")
    basis.add_argument("--check", action="store_true", help="Run the biorthogonality self-test")
    basis.add_argument("--check-size", type=int, default=10, help="Largest index checked (default: 10)")

    return parser


class Console:
    """Status lines on stdout for tables, on stderr when stdout carries data."""

    def __init__(self, output_format: str, out: Optional[str]):
        self.output_format = output_format
        self.out = out
        self.stream = sys.stdout if output_format == "table" else sys.stderr

    def status(self, message: str):
        print(message, file=self.stream)

    def emit(self, text: str):
        if self.out:
            Path(self.out).parent.mkdir(parents=True, exist_ok=True)
            Path(self.out).write_text(text, encoding="utf-8")
            self.status(f"✅ Wrote {self.out}")
        else:
            sys.stdout.write(text)


def _pick(flag, default):
    return default if flag is None else flag


def _eta_flag(args) -> Optional[str]:
    if args.eta is None:
        return None
    if args.eta.strip().lower() == "auto":
        return "auto"
    try:
        value = float(args.eta)
    except ValueError:
        raise ConfigurationError(f"--eta must be a positive number or 'auto', got {args.eta!r}")
    if not value > 0:
        raise ConfigurationError(f"--eta must be positive, got {value}")
    return value


def _seeded_eta(args) -> Optional[float]:
    flag = _eta_flag(args)
    return None if flag in (None, "auto") else flag


def _scan_eta(args, settings: Settings) -> float:
    flag = _eta_flag(args)
    if flag == "auto":
        raise ConfigurationError("--eta auto only applies to seeded level solves")
    if flag is not None:
        return flag
    return settings.eta if settings.eta is not None else 1.0


def _build_channel(args, constants: PhysicalConstants) -> Channel:
    if args.equation == "kg":
        return Channel.klein_gordon(args.Z, args.l, constants)
    return Channel.dirac(args.Z, args.two_j, args.branch, constants)


def _search_config(args, settings: Settings, eta: Optional[float], **overrides) -> PoleSearchConfig:
    return PoleSearchConfig(
        rank=_pick(args.rank, settings.rank),
        eta=eta,
        cf_tol=_pick(args.tol, settings.tol),
        max_terms=_pick(args.max_terms, settings.max_terms),
        **overrides,
    )


def cmd_table1(args, settings: Settings, constants: PhysicalConstants, console: Console) -> int:
    console.status("🔬 Hydrogen-like levels from Green's-matrix poles")
    console.status("=" * 48)

    config = _search_config(args, settings, _seeded_eta(args))
    records = table1(constants, config, workers=_pick(args.workers, settings.workers))

    if console.output_format == "json":
        console.emit(export.levels_to_json(records))
    elif console.output_format == "csv":
        console.emit(export.levels_to_csv(records, args.digits))
    else:
        console.emit(export.levels_to_table(records, args.digits))

    failed = [r for r in records if not r.passed]
    for record in failed:
        reason = record.error or f"rel_err {record.rel_err:.2e} above tolerance"
        console.status(f"❌ {record.system} {record.label}: {reason}")
    if failed:
        return EXIT_TOLERANCE
    console.status(f"✅ All {len(records)} levels agree with the Sommerfeld formula")
    return EXIT_OK


def cmd_spectrum(args, settings: Settings, constants: PhysicalConstants, console: Console) -> int:
    if args.level and args.n_index is not None:
        raise ConfigurationError("--level and --n-index are mutually exclusive")

    if args.level:
        label = parse_level_label(args.level)
        config = _search_config(args, settings, _seeded_eta(args))
        record = solve_level(label, args.Z, constants, config, system=f"Z={args.Z:g}")
        console.status(f"🔬 Level {label} for Z={args.Z:g}")
        if console.output_format == "json":
            console.emit(export.levels_to_json([record]))
        elif console.output_format == "csv":
            console.emit(export.levels_to_csv([record], args.digits))
        else:
            console.emit(export.levels_to_table([record], args.digits))
        return EXIT_OK if record.passed else EXIT_TOLERANCE

    channel = _build_channel(args, constants)
    console.status(f"🔬 {channel.describe()}, u = {channel.u:.12g}")

    if args.n_index is not None:
        config = _search_config(args, settings, _seeded_eta(args))
        refined = solve_channel_level(channel, args.n_index, config)
        rows = [{
            "n_index": refined.n_index,
            "binding": refined.binding,
            "exact": refined.exact_binding,
            "rel_err": refined.rel_err,
            "eta": refined.eta,
        }]
    else:
        config = _search_config(args, settings, _scan_eta(args, settings), window=args.window,
                                grid_points=args.grid_points, spacing=args.spacing)
        rows = []
        for binding in find_poles(channel, config):
            n_index = channel.nearest_index(binding)
            exact = channel.exact_binding(n_index)
            rows.append({
                "n_index": n_index,
                "binding": binding,
                "exact": exact,
                "rel_err": abs(binding - exact) / abs(exact),
            })
        console.status(f"📝 {len(rows)} poles in [{args.window[0]}, {args.window[1]}]")

    columns = ("n_index", "binding", "exact", "rel_err")
    if console.output_format == "json":
        console.emit(export.records_to_json(rows))
    elif console.output_format == "csv":
        console.emit(export.rows_to_csv(columns, rows, args.digits))
    else:
        console.emit(export.rows_to_table(columns, rows, args.digits))
    return EXIT_OK


def cmd_green(args, settings: Settings, constants: PhysicalConstants, console: Console) -> int:
    channel = _build_channel(args, constants)
    eta = _scan_eta(args, settings)
    rank = _pick(args.rank, settings.rank)
    binding = complex(args.binding, args.imag) if args.imag else args.binding

    result = green_matrix(channel, eta, binding, rank,
                          tol=_pick(args.tol, settings.tol),
                          max_terms=_pick(args.max_terms, settings.max_terms),
                          strict=args.strict)
    if result.condition > CONDITION_FLOOR:
        console.status(f"⚠️ Near a pole: condition number {result.condition:.3e}")

    extra = {}
    if args.compare_oracle:
        oracle = truncated_inverse_oracle(channel, eta, binding, args.compare_oracle, rank)
        extra["oracle_K"] = args.compare_oracle
        extra["oracle_max_diff"] = float(np.max(np.abs(result.green_matrix - oracle)))
        console.status(f"📝 Max difference from the {args.compare_oracle}x{args.compare_oracle} "
                       f"truncation: {extra['oracle_max_diff']:.3e}")

    if console.output_format == "json":
        console.emit(export.green_to_json(result, **extra))
    elif console.output_format == "csv":
        console.emit(export.green_to_csv(result))
    else:
        console.emit(export.green_to_table(result, args.digits))
    return EXIT_OK


def cmd_basis(args, settings: Settings, constants: PhysicalConstants, console: Console) -> int:
    u = args.u if args.u is not None else _build_channel(args, constants).u
    params = SturmianParams(eta=_scan_eta(args, settings), u=u)

    if args.r:
        radii = np.array(args.r, dtype=float)
    else:
        radii = RadialGrid.uniform(args.r_min, args.r_max, args.step).nodes
    values = sturmian_eval(args.n, params, radii)

    if console.output_format == "json":
        console.emit(export.records_to_json(
            [{"r": float(r), "value": float(v)} for r, v in zip(radii, values)]))
    else:
        console.emit(export.samples_to_csv(radii, values))

    if not args.check:
        return EXIT_OK

    size = args.check_size
    grid = RadialGrid.gauss_laguerre(params, size=2 * size + 32)
    deviation = max(
        abs(overlap_numeric(n, m, params, grid).value - (1.0 if n == m else 0.0))
        for n in range(size + 1) for m in range(n, size + 1)
    )
    console.status(f"📝 Biorthogonality max deviation for n, m <= {size}: {deviation:.3e}")
    if deviation > BIORTHOGONALITY_TOLERANCE:
        console.status("❌ Biorthogonality check failed")
        return EXIT_TOLERANCE
    console.status("✅ Biorthogonality check passed")
    return EXIT_OK


COMMANDS = {
    "table1": cmd_table1,
    "spectrum": cmd_spectrum,
    "green": cmd_green,
    "basis": cmd_basis,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(_normalize_argv(list(sys.argv[1:] if argv is None else argv)))
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    console = Console(args.output_format or "table", args.out)
    try:
        settings = load_settings(args.env_file)
        if args.output_format is None:
            console = Console(settings.output_format, args.out)
        constants = PhysicalConstants(alpha=_pick(args.alpha, settings.alpha),
                                      mass=_pick(args.mass, settings.mass))
        return COMMANDS[args.command](args, settings, constants, console)
    except (ConfigurationError, DomainError) as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ContinuedFractionError as exc:
        print(f"❌ {exc} (terms used: {exc.terms_used})", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (NearPoleError, BracketError, SingularTruncationError, QuadratureError) as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
