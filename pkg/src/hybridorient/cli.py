"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .observables import DEFAULT_GAMMA, DEFAULT_RESOLUTION, orientation_trace, revival_stats, trace_from_series
from .operators import AngularBasis, InvalidBasisError, build_cos2_theta, build_cos_theta, build_j_squared
from .optimal import approx_optimal_state, exact_optimal_states, optimal_duration
from .output import RunManifest, render, write_text
from .propagator import (
    DEFAULT_AUDIT_TOL,
    ENVELOPES,
    FinitePulseSpec,
    KickAreas,
    NumericalError,
    kick_level,
    validate_impulsive,
)
from .scan import GRID_COLUMNS, LINE_COLUMNS, Axis, LineScanSpec, ScanSpec, line_scan, scan_max_orientation
from .thermal import ThermalConfig, thermal_series
from .units import ENVELOPE_FACTORS, convert_physical_to_areas

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _axis(text: str) -> Axis:
    try:
        return Axis.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _bool(text: str) -> bool:
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


def build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key=value file mirroring the flags; flags win")

    table = _Parser(add_help=False)
    table.add_argument("--out", help="output file (default: stdout)")
    table.add_argument("--format", choices=("csv", "json"), default="csv")

    physics = _Parser(add_help=False)
    physics.add_argument("--ttilde", type=float, default=None, help="kT/B; enables thermal averaging")
    physics.add_argument("--gamma", type=float, default=DEFAULT_GAMMA)
    physics.add_argument("--resolution", type=int, default=DEFAULT_RESOLUTION)

    parser = _Parser(prog="hybridorient", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("operators", parents=[common, table], help="dump cos, cos^2 and J^2 matrices")
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--jmax", type=int, default=None)

    p = sub.add_parser("validate", parents=[common], help="finite-pulse oracle vs impulsive kick")
    p.add_argument("--ahcp", type=float, default=None)
    p.add_argument("--al", type=float, default=None)
    p.add_argument("--tau", type=float, default=0.002, help="pulse length in rotational periods")
    p.add_argument("--envelope", choices=ENVELOPES, default="sine-squared")
    p.add_argument("--jmax", type=int, default=None)

    p = sub.add_parser("trace", parents=[common, table, physics], help="<cos theta>(s) over one period")
    p.add_argument("--ahcp", type=float, default=None)
    p.add_argument("--al", type=float, default=None)

    p = sub.add_parser("optimal", parents=[common], help="optimal target states")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--approx", type=_bool, nargs="?", const=True, default=False)
    p.add_argument("--gamma", type=float, default=DEFAULT_GAMMA)

    p = sub.add_parser("scan2d", parents=[common, table, physics], help="grid over (A_L, A_HCP)")
    p.add_argument("--al", type=_axis, default=Axis(0.0, 6.0, 121))
    p.add_argument("--ahcp", type=_axis, default=Axis(0.0, 10.0, 121))
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("linescan", parents=[common, table, physics], help="scan along A_L = A_HCP/ratio")
    p.add_argument("--ahcp", type=_axis, default=Axis(0.25, 6.0, 48))
    p.add_argument("--ratio", type=float, default=2.5)
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("convert-units", parents=[common], help="physical pulses to kick areas")
    p.add_argument("--b-cm1", type=float, default=None)
    p.add_argument("--mu0-debye", type=float, default=None)
    p.add_argument("--e-hcp-kv-cm", type=float, default=None)
    p.add_argument("--hcp-duration-ps", type=float, default=None)
    p.add_argument("--delta-alpha-a3", type=float, default=None)
    p.add_argument("--intensity-w-cm2", type=float, default=None)
    p.add_argument("--laser-duration-ps", type=float, default=None)
    p.add_argument("--hcp-envelope", choices=sorted(ENVELOPE_FACTORS), default="flat-top")
    p.add_argument("--laser-envelope", choices=sorted(ENVELOPE_FACTORS), default="flat-top")
    p.add_argument("--target-al", type=float, default=None)
    return parser


def _subparser(parser: argparse.ArgumentParser, name: str) -> argparse.ArgumentParser:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


def load_config(path: str, sub: argparse.ArgumentParser) -> dict:
    """Parse key=value lines into typed defaults for ``sub``."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc.strerror}") from None
    actions = {a.dest: a for a in sub._actions if a.dest not in ("help", "config")}
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = (x.strip() for x in line.split("=", 1))
        dest = key.lstrip("-").replace("-", "_")
        if dest not in actions:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        action = actions[dest]
        try:
            conv = action.type(value) if action.type else value
        except (argparse.ArgumentTypeError, ValueError) as exc:
            raise UsageError(f"{path}:{lineno}: bad value {value!r} for {key}: {exc}") from None
        if action.choices is not None and conv not in action.choices:
            raise UsageError(f"{path}:{lineno}: {key} must be one of {list(action.choices)}")
        out[dest] = conv
    return out


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        raise UsageError("missing subcommand; see --help")
    if getattr(args, "config", None):
        sub = _subparser(parser, args.command)
        sub.set_defaults(**load_config(args.config, sub))
        args = parser.parse_args(argv)
    return args


def _require(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"missing --{name.replace('_', '-')}")


def _emit(args, rows, columns, manifest: RunManifest):
    text = render(rows, columns, args.format)
    manifest.finish()
    if args.out:
        write_text(args.out, text)
        manifest.write_beside(args.out)
    else:
        sys.stdout.write(text)


def _params(args) -> dict:
    out = {k: (str(v) if isinstance(v, Axis) else v) for k, v in vars(args).items()}
    out["audit_tol"] = DEFAULT_AUDIT_TOL
    return out


def _areas(args) -> KickAreas:
    _require(args, "ahcp", "al")
    try:
        return KickAreas(args.ahcp, args.al)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _check_physics(args):
    if not 0 < args.gamma <= 1:
        raise UsageError(f"--gamma must lie in (0, 1], got {args.gamma}")
    if args.resolution < 64:
        raise UsageError(f"--resolution must be >= 64, got {args.resolution}")
    if args.ttilde is not None and args.ttilde < 0:
        raise UsageError(f"--ttilde must be nonnegative, got {args.ttilde}")


def cmd_operators(args):
    _require(args, "jmax")
    try:
        basis = AngularBasis(args.m, args.jmax)
    except InvalidBasisError as exc:
        raise UsageError(str(exc)) from None
    rows = []
    for op in (build_cos_theta(basis), build_cos2_theta(basis), build_j_squared(basis)):
        for j, jp, value in sorted(op.entries()):
            rows.append({"operator": op.name, "m": basis.m, "j": j, "j_prime": jp, "value": value})
    _emit(args, rows, ("operator", "m", "j", "j_prime", "value"), RunManifest("operators", _params(args)))


def cmd_validate(args):
    areas = _areas(args)
    try:
        spec = FinitePulseSpec(args.tau, areas, args.envelope)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rep = validate_impulsive(spec, args.jmax)
    print(f"overlap          {rep.overlap:.12f}")
    print(f"norm_drift       {rep.norm_drift:.3e}")
    print(f"tail_population  {rep.tail_population:.3e}")
    print(f"steps            {rep.n_steps}")
    print(f"j_max            {rep.j_max}")


def cmd_trace(args):
    _check_physics(args)
    areas = _areas(args)
    manifest = RunManifest("trace", _params(args))
    if args.ttilde:
        ts = thermal_series(areas, ThermalConfig(args.ttilde))
        trace = trace_from_series(ts.series, args.resolution)
        manifest.j_max_used = sorted(set(ts.j_max_used))
    else:
        res = kick_level(areas)
        trace = orientation_trace(res.state, args.resolution)
        manifest.j_max_used = list(res.j_max_history)
    stats = revival_stats(trace, args.gamma)
    rows = [{"s": float(s), "cos_expectation": float(v)} for s, v in zip(trace.s, trace.values)]
    _emit(args, rows, ("s", "cos_expectation"), manifest)
    if args.out:
        print(f"max_abs {stats.max_abs:.6f} at s={stats.s_at_max:.6f} (signed {stats.signed_value:+.6f}), "
              f"duration {stats.duration:.6f} above {args.gamma}")


def cmd_optimal(args):
    _require(args, "n")
    if not 2 <= args.n <= 64:
        raise UsageError(f"--n must lie in [2, 64], got {args.n}")
    if args.approx:
        states = (approx_optimal_state(args.n, "minus"), approx_optimal_state(args.n, "plus"))
    else:
        states = exact_optimal_states(args.n)
    kind = "approximate" if args.approx else "exact"
    print(f"N = {args.n} ({kind})")
    for st in states:
        amps = " ".join(f"{a:+.6f}" for a in st.amplitudes)
        print(f"chi_{st.sign}: eigenvalue {st.eigenvalue:+.6f}")
        print(f"  amplitudes j=0..{args.n - 1}: {amps}")
    print(f"Delta_N (gamma={args.gamma}) = {optimal_duration(args.n, args.gamma):.6f}")


def _scan_common(args):
    _check_physics(args)
    if args.workers is not None and args.workers < 1:
        raise UsageError(f"--workers must be >= 1, got {args.workers}")


def cmd_scan2d(args):
    _scan_common(args)
    try:
        spec = ScanSpec(args.al, args.ahcp, args.ttilde, args.gamma, args.resolution)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    manifest = RunManifest("scan2d", _params(args))
    rows = scan_max_orientation(spec, args.workers)
    manifest.j_max_used = sorted({r["j_max"] for r in rows})
    _emit(args, rows, GRID_COLUMNS, manifest)


def cmd_linescan(args):
    _scan_common(args)
    try:
        spec = LineScanSpec(args.ahcp, args.ratio, args.ttilde, args.gamma, args.resolution)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    manifest = RunManifest("linescan", _params(args))
    rows = line_scan(spec, args.workers)
    manifest.j_max_used = sorted({r["j_max"] for r in rows})
    _emit(args, rows, LINE_COLUMNS, manifest)


def cmd_convert(args):
    _require(args, "b_cm1")
    try:
        conv = convert_physical_to_areas(
            args.b_cm1, args.mu0_debye, args.e_hcp_kv_cm, args.hcp_duration_ps, args.delta_alpha_a3,
            args.intensity_w_cm2, args.laser_duration_ps, args.hcp_envelope, args.laser_envelope,
            args.target_al,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    def show(x):
        return "n/a" if x is None else f"{x:.6g}"

    print(f"tau_rot_ps {show(conv.tau_rot_ps)}")
    print(f"a_hcp {show(conv.a_hcp)}")
    print(f"a_l {show(conv.a_l)}")
    if conv.implied_delta_alpha_a3 is not None:
        print(f"implied_delta_alpha_a3 {show(conv.implied_delta_alpha_a3)}")


COMMANDS = {
    "operators": cmd_operators,
    "validate": cmd_validate,
    "trace": cmd_trace,
    "optimal": cmd_optimal,
    "scan2d": cmd_scan2d,
    "linescan": cmd_linescan,
    "convert-units": cmd_convert,
}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse_args(argv)
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
