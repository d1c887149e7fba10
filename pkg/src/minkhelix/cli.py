"""Command-line front end (``mhl``).

Exit codes: 0 success or PASS, 1 verification FAIL, 2 usage or input error.
Tables are CSV (``s,x1,x2,x3`` plus optional invariant columns) or JSON; all
numbers carry 12 significant digits and files are replaced atomically.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np

from .builder import (ConstructionParams, Family, KProfile, construct_alpha, profile_from_dict,
                      slant_profile_from_dict)
from .curves import SampleGrid, load_curve_spec
from .detect import run_theorem, slant_values, sphericity_values
from .errors import MinkHelixError
from .frenet import invariants
from .lorentz import causal_character
from .sabban import geodesic_curvature, synthesize_spherical_curve

__all__ = ["main", "run", "UsageError"]

COLUMN_ORDER = ("kappa", "tau", "nu", "kg", "sigma", "sph")
EXAMPLES = {
    1: dict(theorem=2, generator="example1_gamma", b=2.0, b1=0.0, b2=1.0),
    2: dict(theorem=1, generator="example2_gamma", kg=1 / math.sqrt(2), b=2.0, b1=0.0, b2=1.0),
    3: dict(theorem=3, generator="example3_gamma", b=2.0, b1=0.0, b2=1.0),
}


class UsageError(Exception):
    pass


def _num(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.12g}"


def _triple(text: str) -> np.ndarray:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"expected x,y,z, got {text!r}") from None
    if len(vals) != 3 or not all(math.isfinite(v) for v in vals):
        raise UsageError(f"expected three finite numbers, got {text!r}")
    return np.array(vals)


def _json_arg(text: str) -> dict:
    """Inline JSON or a path to a JSON file."""
    if os.path.exists(text):
        with open(text, encoding="utf-8") as fh:
            text = fh.read()
    try:
        value = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON: {exc}") from None
    if not isinstance(value, dict):
        raise UsageError("JSON argument must be an object")
    return value


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".mhl-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_table(s, points, columns: dict, fmt: str = "csv") -> str:
    names = ["s", "x1", "x2", "x3"] + [c for c in COLUMN_ORDER if c in columns]
    data = [np.asarray(s, dtype=float)] + [points[:, i] for i in range(3)] + \
        [np.asarray(columns[c], dtype=float) for c in names[4:]]
    rows = list(zip(*data))
    if fmt == "json":
        def clean(x):
            x = float(x)
            return float(f"{x:.12g}") if math.isfinite(x) else None
        body = {"columns": names, "rows": [[clean(v) for v in r] for r in rows]}
        return json.dumps(body, indent=2) + "\n"
    lines = [",".join(names)] + [",".join(_num(v) for v in r) for r in rows]
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _grid(args) -> SampleGrid:
    if args.samples < 9:
        raise UsageError("--samples must be at least 9")
    if not args.s0 < args.s1:
        raise UsageError("--s0 must be smaller than --s1")
    return SampleGrid(args.s0, args.s1, args.samples)


def _tol(args):
    if getattr(args, "tol", None) is not None:
        return args.tol
    env = os.environ.get("MHL_TOL")
    if env:
        try:
            return float(env)
        except ValueError:
            raise UsageError(f"MHL_TOL is not a number: {env!r}") from None
    return None


def _hint(args) -> None:
    if getattr(args, "gnuplot_hint", False):
        target = args.out or "table.csv"
        print(f"gnuplot -p -e \"set datafile separator ','; set key autotitle columnhead; "
              f"splot '{target}' using 2:3:4 with lines\"", file=sys.stderr)


def _invariant_columns(curve, s, with_slant=True) -> dict:
    inv = invariants(curve, s)
    cols = {"kappa": inv.kappa, "tau": inv.tau, "nu": inv.nu}
    if with_slant:
        cols["sigma"] = slant_values(curve, s)[0]
        cols["sph"] = sphericity_values(curve, s)[0]
    return cols


# ---------------------------------------------------------------------------
# commands

def cmd_classify(args) -> int:
    print(str(causal_character(_triple(args.vec))))
    return 0


def cmd_frenet(args) -> int:
    curve = load_curve_spec(args.curve)
    grid = _grid(args)
    s = grid.nodes
    _emit(format_table(s, curve.eval(s, 0), _invariant_columns(curve, s), args.format), args.out)
    _hint(args)
    return 0


def cmd_sabban(args) -> int:
    curve = load_curve_spec(args.curve)
    grid = _grid(args)
    s = grid.nodes
    cols = _invariant_columns(curve, s, with_slant=False)
    cols["kg"] = geodesic_curvature(curve, s)
    _emit(format_table(s, curve.eval(s, 0), cols, args.format), args.out)
    _hint(args)
    return 0


def _profile(text: str | None) -> KProfile:
    if text is None:
        return KProfile(Family.ZERO)
    try:
        return profile_from_dict(_json_arg(text))
    except (KeyError, ValueError) as exc:
        raise UsageError(f"bad profile: {exc}") from None


def cmd_construct(args) -> int:
    gamma = load_curve_spec(args.gamma)
    grid = _grid(args)
    a = _triple(args.a) if args.a else np.zeros(3)
    params = ConstructionParams(b=args.b, a=tuple(a))
    alpha = construct_alpha(gamma, _profile(args.profile), params, grid)
    s = grid.nodes
    _emit(format_table(s, alpha.eval(s, 0), _invariant_columns(alpha, s), args.format), args.out)
    _hint(args)
    return 0


def cmd_synth(args) -> int:
    grid = _grid(args)
    if (args.slant is None) == (args.kg is None):
        raise UsageError("synth needs exactly one of --slant m,n,branch or --kg value")
    if args.slant is not None:
        parts = args.slant.split(",")
        if len(parts) not in (2, 3):
            raise UsageError("--slant expects m,n[,plus|minus]")
        try:
            prof = slant_profile_from_dict({"m": parts[0], "n": parts[1],
                                            "branch": parts[2] if len(parts) == 3 else "plus"})
        except ValueError as exc:
            raise UsageError(f"bad --slant: {exc}") from None
        kg, dkg = prof, prof.derivative
    else:
        kg, dkg = args.kg, (lambda x: np.zeros(np.shape(x)))
    gamma = synthesize_spherical_curve(args.surface, args.char, kg, grid, step=args.step,
                                       kg_derivative=dkg)
    s = grid.nodes
    cols = {"kg": geodesic_curvature(gamma, s)}
    _emit(format_table(s, gamma.eval(s, 0), cols, args.format), args.out)
    _hint(args)
    return 0


def cmd_verify(args) -> int:
    params = _json_arg(args.params) if args.params else {}
    report = run_theorem(args.theorem, params, _tol(args)).report
    if args.report:
        write_atomic(args.report, report.to_json())
    else:
        sys.stdout.write(report.to_json())
    print(report.summary(), file=sys.stderr)
    return 0 if report.passed else 1


def cmd_example(args) -> int:
    setup = dict(EXAMPLES[args.id])
    theorem = setup.pop("theorem")
    setup.update(s0=args.s0, s1=args.s1, samples=args.samples)
    _grid(args)
    run = run_theorem(theorem, setup, _tol(args))
    out = args.out
    s = run.report.grid.nodes
    if run.gamma is not None:
        cols = {"kg": geodesic_curvature(run.gamma, s)}
        write_atomic(os.path.join(out, "generator.csv"), format_table(s, run.gamma.eval(s, 0), cols))
    if run.alpha is not None:
        write_atomic(os.path.join(out, "alpha.csv"),
                     format_table(s, run.alpha.eval(s, 0), _invariant_columns(run.alpha, s)))
    write_atomic(os.path.join(out, "report.json"), run.report.to_json())
    print(run.report.summary())
    return 0 if run.report.passed else 1


# ---------------------------------------------------------------------------
# parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_grid(p, samples=201):
    p.add_argument("--s0", type=float, default=-1.0)
    p.add_argument("--s1", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=samples)


def _add_output(p):
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--gnuplot-hint", action="store_true",
                   help="print a gnuplot command for the table to stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mhl", description="Helices and slant helices in Minkowski 3-space.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", help="causal character of a vector")
    p.add_argument("--vec", required=True, help="x,y,z")
    p.set_defaults(func=cmd_classify)

    for name, func, helptext in (("frenet", cmd_frenet, "Frenet invariants along a curve"),
                                 ("sabban", cmd_sabban, "geodesic curvature of a spherical curve")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--curve", required=True, help="builtin name, JSON spec or CSV file")
        _add_grid(p)
        _add_output(p)
        p.set_defaults(func=func)

    p = sub.add_parser("construct", help="build alpha from a spherical generator")
    p.add_argument("--gamma", required=True, help="builtin name, JSON spec or CSV file")
    p.add_argument("--profile", help='JSON, e.g. {"family":"tanh","kg":0.7071,"b2":1}')
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--a", help="translation x,y,z")
    _add_grid(p)
    _add_output(p)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("synth", help="integrate a spherical curve from its geodesic curvature")
    p.add_argument("--surface", required=True, choices=("S12", "H02"))
    p.add_argument("--char", required=True, choices=("spacelike", "timelike"))
    p.add_argument("--slant", help="m,n[,plus|minus]")
    p.add_argument("--kg", type=float, help="constant geodesic curvature")
    p.add_argument("--step", type=float, default=1e-3)
    _add_grid(p)
    _add_output(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("verify", help="run a theorem pipeline")
    p.add_argument("--theorem", required=True, type=int, choices=range(1, 7))
    p.add_argument("--params", help="JSON object or file")
    p.add_argument("--report", help="report path (default: stdout)")
    p.add_argument("--tol", type=float)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("example", help="reproduce a worked example")
    p.add_argument("--id", required=True, type=int, choices=(1, 2, 3))
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--tol", type=float)
    _add_grid(p)
    p.set_defaults(func=cmd_example)
    return parser


def run(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"mhl: error: {exc}", file=sys.stderr)
        return 2
    except (MinkHelixError, ValueError, KeyError, OSError) as exc:
        print(f"mhl: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
