"""Command-line interface: ``dfk <command> ...``.

Exit status is 0 on success, 1 on invalid input (bad flags, malformed or
empty shape files) and 2 when an iterative solver fails to converge.
Shapes are given as a path to a text/JSON shape file, or as a built-in name
such as ``plus``, ``square:5``, ``rect:3x2``, ``path:4`` or ``disk:100``.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .errors import CapExceededError, ConvergenceError, ShapeError
from .io import SCHEMA, load_shape, parse_json, shape_to_json

log = logging.getLogger("discrete_fk")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; 2 is reserved for non-convergence here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _pos_int(s: str) -> int:
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s!r}")
    return v


def _nonneg_int(s: str) -> int:
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {s!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {s!r}")
    return v


def _pos_float(s: str) -> float:
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {s!r}") from None
    if not v > 0 or v != v or v == float("inf"):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {s!r}")
    return v


def _int_list(s: str) -> list[int]:
    try:
        out = [int(t) for t in s.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}") from None
    if not out or any(v < 1 for v in out):
        raise argparse.ArgumentTypeError(f"expected comma-separated positive integers, got {s!r}")
    return out


def _cell(s: str) -> tuple[int, int]:
    try:
        x, y = (int(t) for t in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected X,Y, got {s!r}") from None
    return x, y


def threads() -> int:
    """Worker cap from FK_THREADS (default: machine parallelism)."""
    raw = os.environ.get("FK_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        v = int(raw)
    except ValueError:
        raise UsageError(f"FK_THREADS must be a positive integer, got {raw!r}") from None
    if v < 1:
        raise UsageError(f"FK_THREADS must be a positive integer, got {raw!r}")
    return v


def resolve_shape(spec: str):
    from .shapes import by_name

    p = Path(spec)
    if p.exists():
        return load_shape(p)
    try:
        return by_name(spec)
    except ValueError:
        raise ShapeError(f"no such shape file or built-in shape: {spec!r}") from None


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write(args, text: str) -> None:
    if args.output and args.output != "-":
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _envelope(command: str, **body) -> dict:
    return {"schema": SCHEMA, "command": command, **body}


# ---------------------------------------------------------------- commands


def cmd_spectrum(args) -> int:
    from .spectral import (
        automorphism_symmetry_residual,
        boundary_identity_residual,
        lambda_d,
    )
    from .grid import is_connected

    g = resolve_shape(args.shape)
    rep = lambda_d(g, args.tol, method=args.method)
    out = _envelope("spectrum", n=len(g), shape=shape_to_json(g)["cells"], **rep.to_json())
    if is_connected(g):
        out["boundary_identity_residual"] = boundary_identity_residual(g, rep)
        out["automorphism_symmetry_residual"] = automorphism_symmetry_residual(g, rep)
    _write(args, _dump(out))
    return 0


def cmd_symmetrize(args) -> int:
    from .symmetry import symmetrize

    g = resolve_shape(args.shape)
    oc = symmetrize(g, args.axis, args.sign, tol=args.tol)
    if args.svg:
        from .render import render_panels

        Path(args.svg).write_text(
            render_panels([(oc.input, None, "before"), (oc.output, None, "after")])
        )
    _write(args, _dump(_envelope("symmetrize", **oc.to_json())))
    return 0


def cmd_search(args) -> int:
    from .search import find_minimizers, is_strictly_decreasing, minimizer_table

    if args.table:
        recs = minimizer_table(args.n, args.mode, args.tol)
    else:
        recs = [find_minimizers(args.n, args.mode, args.tol)]
    if args.svg_dir:
        from .render import render_panels

        d = Path(args.svg_dir)
        d.mkdir(parents=True, exist_ok=True)
        for r in recs:
            panels = [(g, None, f"n={r.n} #{i}") for i, g in enumerate(r.minimizers)]
            (d / f"minimizers_n{r.n:02d}.svg").write_text(render_panels(panels))
    body = {"records": [r.to_json() for r in recs]}
    if args.table:
        body["strictly_decreasing"] = is_strictly_decreasing(recs)
    _write(args, _dump(_envelope("search", **body)))
    return 0


def cmd_disk(args) -> int:
    from .continuum import DISK_TARGET, disk_convergence

    reps = disk_convergence(args.n_list, args.m, args.samples)
    body = {"target": DISK_TARGET, "m": args.m, "reports": [r.to_json() for r in reps]}
    _write(args, _dump(_envelope("disk", **body)))
    return 0


def cmd_sandwich(args) -> int:
    from .continuum import build_mask, sandwich_check

    g = resolve_shape(args.shape)
    rep = sandwich_check(g, args.m, args.tol)
    if args.pgm:
        Path(args.pgm).write_bytes(build_mask(g, args.m).to_pgm())
    _write(args, _dump(_envelope("sandwich", **rep.to_json())))
    return 0


def cmd_walk(args) -> int:
    from .walk import central_cell, decay_ratio, mc_band, survival_exact, survival_mc

    g = resolve_shape(args.shape)
    if args.other:
        h = resolve_shape(args.other)
        rep = decay_ratio(g, h, args.k)
        _write(args, _dump(_envelope("walk", mode="decay_ratio", **rep.to_json())))
        return 0
    start = args.start if args.start is not None else central_cell(g)
    ex = survival_exact(g, start, args.k)
    mc = survival_mc(g, start, args.k, args.trials, args.seed)
    band = mc_band(ex.probabilities, args.trials)
    rows = list(zip(range(args.k + 1), ex.probabilities, mc.probabilities, band))
    if args.csv:
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "p_exact", "p_mc", "band"])
        for k, a, b, c in rows:
            w.writerow([k, repr(float(a)), repr(float(b)), repr(float(c))])
        Path(args.csv).write_text(buf.getvalue())
    inside = sum(abs(b - a) <= c for _, a, b, c in rows)
    body = {
        "mode": "survival",
        "start": list(ex.start),
        "seed": args.seed,
        "trials": args.trials,
        "rng": "Philox4x64",
        "decay_estimate": ex.decay_estimate,
        "within_band": int(inside),
        "k_values": args.k + 1,
        "curve": [
            {"k": k, "p_exact": float(a), "p_mc": float(b), "band": float(c)} for k, a, b, c in rows
        ],
    }
    _write(args, _dump(_envelope("walk", **body)))
    return 0


def cmd_render(args) -> int:
    from .grid import Subgraph
    from .render import render_panels, render_svg

    p = Path(args.input)
    data = None
    if p.suffix == ".json" and p.exists():
        try:
            data = json.loads(p.read_text())
        except json.JSONDecodeError as exc:
            raise ShapeError(f"invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from None
    if isinstance(data, dict) and data.get("command") == "spectrum":
        vals = {(x, y): v for x, y, v in data["eigenfunction"]}
        g = Subgraph(vals)
        svg = render_svg(g, vals if args.eigenfunction else None, f"lambda_D = {data['lambda_d']:.10g}")
    elif isinstance(data, dict) and data.get("command") == "symmetrize":
        svg = render_panels(
            [(Subgraph(data["before"]), None, "before"), (Subgraph(data["after"]), None, "after")]
        )
    elif data is not None:
        svg = _render_shape(parse_json(p.read_text()), args.eigenfunction, args.tol)
    else:
        svg = _render_shape(resolve_shape(args.input), args.eigenfunction, args.tol)
    _write(args, svg)
    return 0


def _render_shape(g, eigen: bool, tol: float) -> str:
    from .render import render_svg
    from .spectral import lambda_d

    if eigen:
        rep = lambda_d(g, tol)
        return render_svg(g, rep.eigenfunction, f"lambda_D = {rep.lambda_d:.10g}")
    return render_svg(g)


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="dfk", description="Dirichlet eigenvalues and symmetrizations of lattice subgraphs.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def common(p, tol=True):
        p.add_argument("-o", "--output", help="write the main output here instead of stdout")
        if tol:
            p.add_argument("--tol", type=_pos_float, default=1e-10, help="eigensolver residual tolerance")

    p = sub.add_parser("spectrum", help="lambda_D and principal eigenfunction of a shape")
    p.add_argument("shape")
    p.add_argument("--method", choices=("power", "dense"), default="power")
    common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("symmetrize", help="apply a discrete Steiner symmetrization")
    p.add_argument("shape")
    p.add_argument("--axis", choices=("horizontal", "vertical", "diagonal"), default="horizontal")
    p.add_argument("--sign", choices=("positive", "negative"), default="positive")
    p.add_argument("--svg", help="also write a before/after SVG")
    common(p)
    p.set_defaults(func=cmd_symmetrize)

    p = sub.add_parser("search", help="exhaustive lambda_D minimizers among n-ominoes")
    p.add_argument("--n", type=_pos_int, required=True)
    p.add_argument("--mode", choices=("exhaustive", "pruned"), default="exhaustive")
    p.add_argument("--table", action="store_true", help="report every size 1..n")
    p.add_argument("--svg-dir", help="write one SVG of minimizers per size")
    common(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("disk", help="discrete disk eigenvalue convergence")
    p.add_argument("--n-list", type=_int_list, default=[100, 400, 1600])
    p.add_argument("--m", type=_pos_int, default=4, help="FD refinement per lattice cell")
    p.add_argument("--samples", type=_pos_int, default=8, help="symmetric-difference samples per unit")
    common(p, tol=False)
    p.set_defaults(func=cmd_disk)

    p = sub.add_parser("sandwich", help="check the discrete/continuum eigenvalue sandwich")
    p.add_argument("shape")
    p.add_argument("--m", type=_pos_int, default=16)
    p.add_argument("--pgm", help="export the m-refined domain mask as PGM")
    common(p)
    p.set_defaults(func=cmd_sandwich)

    p = sub.add_parser("walk", help="absorbing random-walk survival")
    p.add_argument("shape")
    p.add_argument("other", nargs="?", help="second shape: report the survival decay ratio")
    p.add_argument("--k", type=_nonneg_int, default=20, help="number of steps")
    p.add_argument("--trials", type=_pos_int, default=100000)
    p.add_argument("--seed", type=_nonneg_int, default=0)
    p.add_argument("--start", type=_cell, help="start cell X,Y (default: most central cell)")
    p.add_argument("--csv", help="write k,p_exact,p_mc,band rows here")
    common(p, tol=False)
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser("render", help="SVG of a shape or of a spectrum/symmetrize JSON report")
    p.add_argument("input")
    p.add_argument("--eigenfunction", action="store_true", help="colour cells by the eigenfunction")
    common(p)
    p.set_defaults(func=cmd_render)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse: usage errors, --help, --version
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        threads()
        if args.command == "walk" and args.other and args.k < 4:
            raise UsageError("--k must be at least 4 for a decay ratio")
        return args.func(args)
    except ConvergenceError as exc:
        print(f"dfk: {exc} (best estimate {exc.best_estimate})", file=sys.stderr)
        return 2
    except (ShapeError, CapExceededError, UsageError, ValueError, OSError) as exc:
        print(f"dfk: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
