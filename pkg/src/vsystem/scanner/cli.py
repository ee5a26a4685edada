"""Command-line entry point.

Subcommands: steady, scan, peaks, poles, regime, border, figure, selftest.
Exit codes: 0 success, 2 parameter error, 3 numerical failure,
4 unknown command or figure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path

import numpy as np

from .. import BACKEND, __version__
from ..core import SystemParams, convert_mapping, params_from_mapping, read_mapping
from ..errors import NumericalError, ParameterError, UnknownFigure
from ..master import build_generator, steady_state
from . import io
from .figures import CAPTIONS, figure, pole_table
from .peaks import find_peaks
from .report import border_table, regime_report
from .scan import OBSERVABLES, parse_grid, scan

log = logging.getLogger("vsystem")

COMMANDS = ("steady", "scan", "peaks", "poles", "regime", "border", "figure", "selftest")
EXIT_OK, EXIT_PARAM, EXIT_NUMERIC, EXIT_UNKNOWN = 0, 2, 3, 4
PARAM_FIELDS = ("gamma1", "nu", "gamma_l", "eps1", "eps2", "delta1", "delta2")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ParameterError(message)


def _add_param_flags(sp, figure_mode=False):
    sp.add_argument("--params", type=Path, help="flat JSON parameter file")
    sp.add_argument("--units", choices=("gamma1", "hz"), default="gamma1",
                    help="units of the frequency flags (hz requires --gamma1 in Hz)")
    for name in PARAM_FIELDS:
        sp.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float, default=None)
    sp.add_argument("--threads", type=int, default=None, help="worker threads (default: all cores)")


def _add_output(sp):
    sp.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vsystem", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"vsystem {__version__} ({BACKEND})")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    sp = sub.add_parser("steady", help="steady state at one parameter point")
    _add_param_flags(sp)
    _add_output(sp)

    for name, help_ in (("scan", "spectrum over a delta2 grid"), ("peaks", "peak report of a scan")):
        sp = sub.add_parser(name, help=help_)
        _add_param_flags(sp)
        sp.add_argument("--grid", default=None, help="[log:]start:stop:n (default: adaptive)")
        sp.add_argument("--method", choices=("numeric", "closedform"), default="numeric")
        if name == "peaks":
            sp.add_argument("--column", choices=OBSERVABLES, default="rho11")
        _add_output(sp)

    sp = sub.add_parser("poles", help="poles of rho11(delta2), optionally along a sweep")
    _add_param_flags(sp)
    sp.add_argument("--sweep", choices=("eps2", "delta1", "eps1"), default=None)
    sp.add_argument("--grid", default=None, help="[log:]start:stop:n for the sweep")
    _add_output(sp)

    sp = sub.add_parser("regime", help="ATS/CIC regime report")
    _add_param_flags(sp)
    _add_output(sp)

    sp = sub.add_parser("border", help="critical eps2 as a function of eps1")
    _add_param_flags(sp)
    sp.add_argument("--grid", default="log:0.1:100:100", help="[log:]start:stop:n in eps1")
    _add_output(sp)

    sp = sub.add_parser("figure", help="reproduce the data of one figure panel")
    sp.add_argument("name", help=f"one of {', '.join(CAPTIONS)}")
    _add_param_flags(sp)
    sp.add_argument("--outdir", type=Path, default=Path("."))

    sub.add_parser("selftest", help="quick numerical self-checks")
    return parser


def _mapping(args) -> dict:
    """Parameter file merged with command-line flags, still in input units."""
    data = read_mapping(args.params) if args.params else {}
    hz = args.units == "hz"
    if hz:
        if args.gamma1 is None:
            raise ParameterError("--units hz requires --gamma1 (in Hz)")
        data["gamma1_hz"] = args.gamma1
    for name in PARAM_FIELDS:
        value = getattr(args, name)
        if value is None or (hz and name == "gamma1"):
            continue
        data[f"{name}_hz" if hz else name] = value
    return data


def _params(args) -> SystemParams:
    return params_from_mapping(_mapping(args))


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        out.write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")


def _emit_csv(args, header, rows, meta):
    if args.out is None:
        sys.stdout.write(io.csv_text(header, rows))
    else:
        io.write_csv(args.out, header, rows, meta)


def cmd_steady(args):
    p = _params(args)
    g = build_generator(p)
    s = steady_state(g)
    _emit(io.dumps({"params": p.as_dict(), "state": s.as_dict(), "residual": g.residual(s)}), args.out)


def _scan(args):
    p = _params(args)
    grid = parse_grid(args.grid) if args.grid else None
    return p, scan(p, grid, method=args.method, threads=args.threads)


def cmd_scan(args):
    p, s = _scan(args)
    rows = np.column_stack([s.grid, s.rows])
    meta = {"params": p.as_dict(), "method": s.method, "grid": s.grid_spec}
    _emit_csv(args, ("delta2",) + OBSERVABLES, rows, meta)


def cmd_peaks(args):
    _, s = _scan(args)
    _emit(io.dumps(find_peaks(s, column=args.column).as_dict()), args.out)


def cmd_poles(args):
    from .. import poleatlas

    p = _params(args)
    if args.sweep is None:
        ps = poleatlas.physical_poles(p)
        payload = {
            "params": p.as_dict(),
            "denom_coeffs": ps.denom_coeffs,
            "poles": [{"pole": [z.real, z.imag], "residue": [r.real, r.imag], "cancelled": bool(c)}
                      for z, r, c in zip(ps.poles, ps.residues, ps.cancelled)],
        }
        _emit(io.dumps(payload), args.out)
        return
    if not args.grid:
        raise ParameterError("--sweep needs --grid")
    grid = parse_grid(args.grid)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        sets = poleatlas.track(p, args.sweep, grid, threads=args.threads)
    header, rows = pole_table(grid, sets)
    meta = {"params": p.as_dict(), "method": "poleatlas",
            "grid": {"variable": args.sweep, "spec": args.grid},
            "warnings": sorted({str(w.message) for w in caught})}
    _emit_csv(args, header, rows, meta)


def cmd_regime(args):
    _emit(io.dumps(regime_report(_params(args))), args.out)


def cmd_border(args):
    p = _params(args)
    rows = border_table(parse_grid(args.grid), p)
    meta = {"params": p.as_dict(), "method": "closedform", "grid": {"variable": "eps1", "spec": args.grid}}
    _emit_csv(args, ("eps1", "eps2_c", "eps2_c_strong"), rows, meta)


def cmd_figure(args):
    if args.name not in CAPTIONS:
        raise UnknownFigure(f"unknown figure {args.name!r}; choose from {', '.join(CAPTIONS)}")
    for path in figure(args.name, convert_mapping(_mapping(args)), args.outdir, threads=args.threads):
        print(path)


def cmd_selftest(args):
    from .selftest import run

    ok = run(print)
    if not ok:
        raise NumericalError("self-test failed")


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    first = next((a for a in argv if not a.startswith("-")), None)
    if first is not None and first not in COMMANDS:
        print(f"vsystem: unknown command {first!r}; choose from {', '.join(COMMANDS)}", file=sys.stderr)
        return EXIT_UNKNOWN
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        if args.command is None:
            parser.print_help(sys.stderr)
            return EXIT_UNKNOWN
        HANDLERS[args.command](args)
    except UnknownFigure as exc:
        print(f"vsystem: {exc.args[0]}", file=sys.stderr)
        return EXIT_UNKNOWN
    except (ParameterError, ValueError) as exc:
        print(f"vsystem: parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"vsystem: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
