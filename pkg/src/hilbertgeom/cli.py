"""
Command-line front end.

Bodies are given with ``--body`` as a JSON file (see ``body_from_json``) or
one of the names ``square``, ``triangle``, ``disk``, ``random`` (a polygon
drawn from ``--seed``) and ``random-smooth`` (an ellipse drawn from
``--seed``).  Tables are CSV with 12 significant digits, reports are JSON,
figures are SVG.  Exit status: 0 success or passed check, 1 failed check,
2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from typing import List, Optional

import numpy as np

from .errors import HilbertGeometryError
from .extremal import john_ellipse, loewner_ellipse
from .hilbert_core import ball_area, finsler_norm, hilbert_distance, unit_ball
from .measure import (
    IdealTriangle,
    QuadratureOptions,
    corner_divergence_probe,
    ideal_triangle_area,
    region_area,
)
from .planar_convex import (
    ConvexBody,
    load_body,
    standard_triangle,
    unit_disk,
    unit_square,
)
from .plotting import render_curve, render_svg
from .simplex import ideal_area_closed, t_alpha_vertices, t_of_alpha
from .verify import CHECKS, NEEDS_SMOOTH, random_body, run_check


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".12g")
    return str(x)


def parse_point(text: str) -> np.ndarray:
    try:
        parts = [float(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse point {text!r}; expected x,y")
    if len(parts) != 2:
        raise UsageError(f"a point needs two coordinates, got {text!r}")
    return np.array(parts)


def resolve_body(spec: Optional[str], seed: int, smooth: bool = False) -> ConvexBody:
    if spec is None:
        raise UsageError("--body is required")
    stock = {"square": unit_square, "triangle": standard_triangle, "disk": unit_disk}
    if spec in stock:
        return stock[spec]()
    if spec == "random":
        return random_body(np.random.default_rng(seed), smooth=smooth)
    if spec == "random-smooth":
        return random_body(np.random.default_rng(seed), smooth=True)
    return load_body(spec)


def csv_text(header: List[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def write_svg(svg: str, path: Optional[str]):
    if path:
        with open(path, "w") as fh:
            fh.write(svg)


def options(args) -> QuadratureOptions:
    return QuadratureOptions(rel_tol=args.rel_tol, abs_tol=args.abs_tol)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_dist(args):
    body = resolve_body(args.body, args.seed)
    p, q = parse_point(args.p), parse_point(args.q)
    emit(fmt(hilbert_distance(body, p, q)) + "\n", args.out)
    return 0


def cmd_norm(args):
    body = resolve_body(args.body, args.seed)
    p, v = parse_point(args.p), parse_point(args.v)
    emit(fmt(finsler_norm(body, p, v)) + "\n", args.out)
    return 0


def cmd_ball(args):
    body = resolve_body(args.body, args.seed)
    p = parse_point(args.p)
    ball = unit_ball(body, p)
    area, err = ball_area(body, p)
    if args.out and args.out.endswith(".json"):
        emit(json_text({"point": p.tolist(), "area": area, "error": err, **ball.to_json()}), args.out)
    else:
        rows = [[area, err, ball.shape_name, len(ball.corners())]]
        emit(csv_text(["area", "error", "shape", "corners"], rows), args.out)
    write_svg(render_svg(body, balls=[ball.vertices], points=p), args.svg)
    return 0


def _area_row(res):
    return [res.value, res.error, str(res.verdict), res.cells]


def cmd_area(args):
    body = resolve_body(args.body, args.seed)
    if not args.tri or len(args.tri) < 3:
        raise UsageError("area needs --tri with at least three points")
    region = np.array([parse_point(t) for t in args.tri])
    res = region_area(body, region, options(args))
    emit(csv_text(["value", "error", "verdict", "cells"], [_area_row(res)]), args.out)
    write_svg(render_svg(body, triangles=[region]), args.svg)
    return 0


def cmd_ideal(args):
    body = resolve_body(args.body, args.seed)
    if not args.tri or len(args.tri) != 3:
        raise UsageError("ideal needs --tri with exactly three points")
    pts = [parse_point(t) for t in args.tri]
    tri = IdealTriangle.from_points(body, *pts)
    res = ideal_triangle_area(body, tri, options(args))
    emit(csv_text(["value", "error", "verdict", "cells"], [_area_row(res)]), args.out)
    write_svg(render_svg(body, triangles=[tri.vertices]), args.svg)
    return 0


def _extremal(args, solver):
    body = resolve_body(args.body, args.seed)
    res = solver(body)
    emit(json_text(res.to_json()), args.out)
    write_svg(render_svg(body, ellipses=[(res.ellipse, res.contacts)]), args.svg)
    return 0


def cmd_john(args):
    return _extremal(args, john_ellipse)


def cmd_loewner(args):
    return _extremal(args, loewner_ellipse)


def cmd_sweep_alpha(args):
    if not (0 < args.start <= args.stop <= 0.5) or args.steps < 1:
        raise UsageError("need 0 < --from <= --to <= 0.5 and --steps >= 1")
    tri_body = standard_triangle()
    opts = options(args)
    alphas = np.linspace(args.start, args.stop, args.steps) if args.steps > 1 else np.array([args.start])
    rows = []
    for a in alphas:
        closed = ideal_area_closed(a)
        quad = ideal_triangle_area(tri_body, t_alpha_vertices(a), opts).value
        rows.append([a, t_of_alpha(a), closed, quad, abs(closed - quad)])
    emit(csv_text(["alpha", "t", "area_closed", "area_quadrature", "abs_diff"], rows), args.out)
    if args.svg:
        r = np.array(rows)
        svg = render_curve(r[:, 0], {"closed form": r[:, 2], "quadrature": r[:, 3]}, "alpha", "area")
        write_svg(svg, args.svg)
    return 0


def cmd_verify(args):
    name = args.check
    body = None
    if name in ("circle-chords", "half-chord-height", "square-sandwich") and args.body is None:
        body = unit_square()
    else:
        body = resolve_body(args.body, args.seed, smooth=name in NEEDS_SMOOTH)
    opts = QuadratureOptions(rel_tol=args.rel_tol if args.rel_tol_given else 1e-4, abs_tol=args.abs_tol)
    report = run_check(name, body, seed=args.seed, opts=opts)
    emit(json_text(report), args.out)
    return 0 if report["pass"] else 1


def cmd_probe(args):
    body = resolve_body(args.body, args.seed)
    omega = parse_point(args.omega)
    p = parse_point(args.p)
    q = parse_point(args.q) if args.q else None
    ts = tuple(float(t) for t in args.t.split(","))
    res = corner_divergence_probe(body, omega, p, q, truncations=ts, opts=options(args))
    emit(json_text(res.to_json()), args.out)
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--body", help="body JSON file or square|triangle|disk|random|random-smooth")
    common.add_argument("--seed", type=int, default=0, help="seed of the random generator (default 0)")
    common.add_argument("--rel-tol", type=float, default=None, help="relative tolerance of area quadrature")
    common.add_argument("--abs-tol", type=float, default=1e-9, help="absolute tolerance of area quadrature")
    common.add_argument("--out", help="write the table or report to this file instead of stdout")
    common.add_argument("--svg", help="write a figure to this SVG file")

    parser = argparse.ArgumentParser(prog="hilbert", description="Hilbert geometry of planar convex bodies")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("dist", parents=[common], help="Hilbert distance between two points")
    s.add_argument("--p", required=True)
    s.add_argument("--q", required=True)
    s.set_defaults(func=cmd_dist)

    s = sub.add_parser("norm", parents=[common], help="Finsler norm of a vector at a point")
    s.add_argument("--p", required=True)
    s.add_argument("--v", required=True)
    s.set_defaults(func=cmd_norm)

    s = sub.add_parser("ball", parents=[common], help="tangent unit ball at a point")
    s.add_argument("--p", required=True)
    s.set_defaults(func=cmd_ball)

    s = sub.add_parser("area", parents=[common], help="Hilbert area of an interior convex polygon")
    s.add_argument("--tri", nargs="+", help="polygon vertices x,y ...")
    s.set_defaults(func=cmd_area)

    s = sub.add_parser("ideal", parents=[common], help="Hilbert area of a (possibly ideal) triangle")
    s.add_argument("--tri", nargs="+", help="three vertices x,y x,y x,y")
    s.set_defaults(func=cmd_ideal)

    s = sub.add_parser("john", parents=[common], help="maximal inscribed ellipse of a polygon")
    s.set_defaults(func=cmd_john)

    s = sub.add_parser("loewner", parents=[common], help="minimal enclosing ellipse of a polygon")
    s.set_defaults(func=cmd_loewner)

    s = sub.add_parser("sweep-alpha", parents=[common], help="closed form vs quadrature on T(alpha)")
    s.add_argument("--from", dest="start", type=float, default=0.05)
    s.add_argument("--to", dest="stop", type=float, default=0.5)
    s.add_argument("--steps", type=int, default=10)
    s.set_defaults(func=cmd_sweep_alpha)

    s = sub.add_parser("verify", parents=[common], help="randomized check of one property")
    s.add_argument("check", choices=sorted(CHECKS))
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("probe", parents=[common], help="truncated areas near a corner or a flat piece")
    s.add_argument("--omega", required=True, help="boundary point x,y")
    s.add_argument("--p", required=True)
    s.add_argument("--q")
    s.add_argument("--t", default="0.9,0.99,0.999", help="comma separated truncation parameters")
    s.set_defaults(func=cmd_probe)
    return parser


# argparse takes "-0.1,0.2" for an option; a leading space keeps it positional
_NEGATIVE_POINT = re.compile(r"^-[0-9.]")


def _protect_points(argv: List[str]) -> List[str]:
    return [" " + a if _NEGATIVE_POINT.match(a) else a for a in argv]


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    argv = _protect_points(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.rel_tol_given = args.rel_tol is not None
    if args.rel_tol is None:
        args.rel_tol = 1e-6
    try:
        if args.rel_tol <= 0 or args.abs_tol <= 0:
            raise UsageError("tolerances must be positive")
        return args.func(args)
    except (UsageError, HilbertGeometryError, ValueError, OSError) as exc:
        print(f"hilbert {args.command}: error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 2


def main():
    sys.exit(run())
