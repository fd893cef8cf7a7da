"""
Randomized checks of the inequalities and identities the library is built on.

Each check samples configurations from a seeded generator, evaluates a
slack that is nonnegative when the property holds, and returns a report
``{statement, samples, worst_slack, pass}``.
"""

from __future__ import annotations

import math
from typing import Callable, Dict, Optional

import numpy as np

from .errors import BodyIsEllipse, UnsupportedRepresentation
from .extremal import (
    band_lower_bound,
    chord_clearance_check,
    rectangle_cap_check,
    circle_chords_check,
    half_chord_height_check,
    dichotomy_witnesses,
    ideal_area_upper_bound,
)
from .hilbert_core import ball_area_batch, finsler_norm_batch
from .measure import (
    IdealTriangle,
    QuadratureOptions,
    Verdict,
    _flat_side,
    corner_divergence_probe,
    ideal_triangle_area,
)
from .planar_convex import (
    AffineMap,
    ConvexBody,
    Ellipse,
    Polygon,
    SmoothBody,
    _unit,
    apply_affine,
    random_convex_polygon,
    rolling_radii,
    unit_square,
)
from .simplex import square_ball_bounds

MIN_IDEAL_AREA = math.pi**3 / 24
FLOOR_TOL = 1e-4


# ---------------------------------------------------------------------------
# Sampling helpers
# ---------------------------------------------------------------------------


def random_body(rng: np.random.Generator, smooth: bool = False) -> ConvexBody:
    """A random polygon with 5 to 8 vertices, or a random ellipse."""
    if smooth:
        a = rng.uniform(1.0, 2.0)
        b = rng.uniform(0.5, 1.0)
        return Ellipse(rng.uniform(-0.5, 0.5, 2), max(a, b), min(a, b), rng.uniform(0, np.pi))
    return random_convex_polygon(rng, int(rng.integers(5, 9)))


def random_boundary_points(
    body: ConvexBody, rng: np.random.Generator, k: int, min_gap: float = 0.3, max_gap: float = np.pi - 0.05
):
    """``k`` boundary points hit by rays from the center at sorted random angles."""
    while True:
        th = np.sort(rng.uniform(0, 2 * np.pi, k))
        gaps = np.diff(np.append(th, th[0] + 2 * np.pi))
        if gaps.min() < min_gap or gaps.max() > max_gap:
            continue
        u = _unit(th)
        c = body.center
        t = body.ray_exit(np.broadcast_to(c, u.shape), u)
        return c + t[:, None] * u


def random_ideal_triangle(body: ConvexBody, rng: np.random.Generator) -> IdealTriangle:
    """A random ideal triangle with no side along a straight boundary piece."""
    while True:
        V = random_boundary_points(body, rng, 3)
        if any(_flat_side(body, V[i], V[(i + 1) % 3]) for i in range(3)):
            continue
        return IdealTriangle.from_points(body, *V)


def random_interior_points(body: ConvexBody, rng: np.random.Generator, n: int, margin: float = 0.05):
    """Points at random radii inside the body, away from the boundary."""
    th = rng.uniform(0, 2 * np.pi, n)
    u = _unit(th)
    c = body.center
    t = body.ray_exit(np.broadcast_to(c, u.shape), u)
    lam = rng.uniform(0, 1 - margin, n)
    return c + (lam * t)[:, None] * u


def _report(statement: str, slacks, tol: float = 0.0, extra: Optional[dict] = None) -> dict:
    s = np.asarray(slacks, dtype=float)
    worst = float(s.min()) if len(s) else math.inf
    out = {
        "statement": statement,
        "samples": int(len(s)),
        "worst_slack": worst,
        "pass": bool(len(s) > 0 and worst >= -tol),
    }
    if extra:
        out.update(extra)
    return out


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------


def check_ellipse_dichotomy(body, rng, opts, n=20):
    statement = (
        "ideal triangles of an ellipse all have area pi; any other body has an "
        "ideal triangle of area below pi and one of area above pi (or infinite)"
    )
    if isinstance(body, Ellipse):
        tol = 1e-3 * math.pi
        slacks = []
        for _ in range(n):
            res = ideal_triangle_area(body, random_ideal_triangle(body, rng), opts)
            slacks.append(tol - abs(res.value - math.pi) if res.converged else -math.inf)
        return _report(statement, slacks)
    try:
        w = dichotomy_witnesses(body, opts)
    except BodyIsEllipse:
        return _report(statement, [-1.0])
    slacks = [w.inner_margin - 1e-3, w.outer_margin]
    return _report(statement, slacks, extra={"witnesses": w.to_json()})


def check_area_floor(body, rng, opts, n=20):
    statement = "every ideal triangle has Hilbert area at least pi^3/24"
    slacks = []
    for _ in range(n):
        res = ideal_triangle_area(body, random_ideal_triangle(body, rng), opts)
        if res.converged:
            slacks.append(res.value - (MIN_IDEAL_AREA - FLOOR_TOL))
    return _report(statement, slacks)


def check_area_ceiling(body, rng, opts, n=10):
    statement = (
        "on a strictly convex C2 body every ideal triangle has area at most "
        "2 pi (floor(2R/r) + 1) + mu(K_delta) with delta = r^3 / (4 R^2)"
    )
    cert = ideal_area_upper_bound(body, opts)
    slacks = []
    for _ in range(n):
        res = ideal_triangle_area(body, random_ideal_triangle(body, rng), opts)
        slacks.append(cert.bound - res.value if res.converged else -math.inf)
    return _report(statement, slacks, extra={"certificate": cert.to_json()})


def check_finite_area(body, rng, opts, n=10):
    statement = "on a C2 body every ideal triangle has finite area"
    if not isinstance(body, SmoothBody):
        raise UnsupportedRepresentation("finite-area check needs a C2 body")
    slacks = []
    for _ in range(n):
        res = ideal_triangle_area(body, random_ideal_triangle(body, rng), opts)
        slacks.append(opts.divergence_cap - res.value if res.converged else -opts.divergence_cap)
    return _report(statement, slacks)


def shrunk_copy(body: ConvexBody, factor: float = 0.8) -> ConvexBody:
    """Homothetic copy about the body's center (contained in the body)."""
    c = body.center
    return apply_affine(body, AffineMap(factor * np.eye(2), (1 - factor) * c))


def check_monotonicity(body, rng, opts, n=200):
    statement = (
        "for nested bodies A inside B: F_B <= F_A pointwise and the unit ball of "
        "A is no larger than that of B"
    )
    inner = shrunk_copy(body)
    P = random_interior_points(inner, rng, n)
    V = rng.normal(size=(n, 2))
    FA = finsler_norm_batch(inner, P, V)
    FB = finsler_norm_batch(body, P, V)
    BA = ball_area_batch(inner, P)
    BB = ball_area_batch(body, P)
    slacks = np.concatenate([FA - FB, BB - BA])
    return _report(statement, slacks, tol=1e-10)


def check_square_sandwich(body, rng, opts, n=2000):
    statement = "in the square (-1,1)^2 the unit ball at (x,y) has area between 2(1-x^2)(1-y^2) and 4(1-x^2)(1-y^2)"
    S = unit_square()
    P = rng.uniform(-1, 1, (n, 2)) * (1 - 1e-9)
    area = ball_area_batch(S, P)
    lo, hi = np.array([square_ball_bounds(p) for p in P]).T
    return _report(statement, np.minimum(area - lo, hi - area), tol=1e-12)


def _increments(areas):
    a = np.asarray(areas)
    return np.diff(a)


def check_flat_divergence(body, rng, opts):
    statement = (
        "near a straight boundary piece, the area between parameters s and t "
        "on rays from an interior point grows without bound as t -> 1"
    )
    if not isinstance(body, Polygon):
        raise UnsupportedRepresentation("needs a polygon")
    i = int(rng.integers(len(body.vertices)))
    A, B = body.edge(i)
    omega = 0.5 * (A + B)
    probe = corner_divergence_probe(body, omega, body.center, opts=opts)
    slacks = list(_increments(probe.areas))
    if len(body.vertices) == 4 and np.allclose(body.vertices, unit_square().vertices):
        x0 = 0.5 * min(np.linalg.norm(omega - A), np.linalg.norm(B - omega))
        slacks += [a - band_lower_bound(0.5, t, x0) for a, t in zip(probe.areas, probe.truncations)]
    slacks.append(0.0 if probe.verdict == Verdict.DIVERGENT else -1.0)
    return _report(statement, slacks, extra={"probe": probe.to_json()})


def check_corner_divergence(body, rng, opts):
    statement = "a triangle with one vertex at a corner of the boundary has infinite area"
    if not isinstance(body, Polygon):
        raise UnsupportedRepresentation("needs a polygon")
    k = len(body.vertices)
    i = int(rng.integers(k))
    omega = body.vertices[i]
    c = body.center
    p = 0.5 * (c + body.vertices[(i - 1) % k])
    q = 0.5 * (c + body.vertices[(i + 1) % k])
    probe = corner_divergence_probe(body, omega, p, q, opts=opts)
    slacks = list(_increments(probe.areas)) + [0.0 if probe.verdict == Verdict.DIVERGENT else -1.0]
    return _report(statement, slacks, extra={"probe": probe.to_json()})


def check_chord_clearance(body, rng, opts, n=1000):
    statement = (
        "for boundary points a, b the chord meets the inner tangent circle of "
        "radius r at a point with clearance at least r/(4R^2) |ab|^2"
    )
    rr = rolling_radii(body)
    slacks = []
    for _ in range(n):
        a, b = random_boundary_points(body, rng, 2, min_gap=1e-3, max_gap=2 * np.pi)
        slacks.append(chord_clearance_check(body, a, b, rr)["slack"])
    return _report(statement, slacks, tol=1e-12)


def check_rectangle_cap(body, rng, opts, n=10):
    statement = "the rectangle of height r on a boundary chord of length <= r has area at most 2 pi floor(2R/r)"
    rr = rolling_radii(body)
    slacks = []
    for _ in range(n):
        a = random_boundary_points(body, rng, 1, min_gap=0, max_gap=2 * np.pi)[0]
        # second point at chord length L <= r along the boundary
        L = rng.uniform(0.2, 1.0) * rr.r
        b = _chord_partner(body, a, L)
        res = rectangle_cap_check(body, a, b, opts, rr)
        slacks.append(res.cap - res.area.value if res.area.converged else -math.inf)
    return _report(statement, slacks, tol=1e-12)


def _chord_partner(body, a, L):
    """The boundary point ``b`` (counterclockwise from ``a``) with ``|ab| = L``."""
    c = body.center
    phi0 = math.atan2(*(a - c)[::-1])
    lo, hi = 0.0, math.pi

    def point(dphi):
        u = _unit(np.array([phi0 + dphi]))
        return c + body.ray_exit(c[None], u)[0] * u[0]

    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if np.linalg.norm(point(mid) - a) < L:
            lo = mid
        else:
            hi = mid
    return point(0.5 * (lo + hi))


def check_circle_chords(body, rng, opts, n=10000):
    statement = (
        "for circles of radii rho < rho' tangent at one point, chords through a "
        "point of the small radius satisfy |pq| >= (rho/rho') |p'q'|, and through "
        "the tangency point the far end keeps clearance (rho'-rho)/(2 rho rho') |q|^2"
    )
    slacks = []
    for i in range(n):
        rho = rng.uniform(0.1, 2.0)
        rho_p = rho * rng.uniform(1.01, 5.0)
        m = [0.0, 0.0 if i % 2 == 0 else rng.uniform(0, rho)]
        out = circle_chords_check(rho, rho_p, m, rng.normal(size=2))
        slacks.append(min(out["slack"], out.get("tangency_slack", math.inf)))
    return _report(statement, slacks, tol=1e-12)


def check_half_chord_height(body, rng, opts, n=10000):
    statement = "a point at height h over a chord of width at most r in a circle of radius r is within 3r/4 of the top"
    slacks = []
    hmax = 1 - math.sqrt(3) / 2
    for _ in range(n):
        r = rng.uniform(0.1, 3.0)
        h = rng.uniform(0, hmax) * r
        slacks.append(half_chord_height_check(r, h)["slack"])
    return _report(statement, slacks, tol=1e-12)


CHECKS: Dict[str, Callable] = {
    "ellipse-dichotomy": check_ellipse_dichotomy,
    "area-floor": check_area_floor,
    "area-ceiling": check_area_ceiling,
    "monotonicity": check_monotonicity,
    "square-sandwich": check_square_sandwich,
    "finite-area": check_finite_area,
    "flat-divergence": check_flat_divergence,
    "corner-divergence": check_corner_divergence,
    "chord-clearance": check_chord_clearance,
    "rectangle-cap": check_rectangle_cap,
    "circle-chords": check_circle_chords,
    "half-chord-height": check_half_chord_height,
}

NEEDS_SMOOTH = {"area-ceiling", "finite-area", "chord-clearance", "rectangle-cap"}
NEEDS_POLYGON = {"flat-divergence", "corner-divergence"}


def run_check(name: str, body: ConvexBody, seed: int = 0, opts: Optional[QuadratureOptions] = None) -> dict:
    rng = np.random.default_rng(seed)
    opts = opts or QuadratureOptions(rel_tol=1e-4)
    report = CHECKS[name](body, rng, opts)
    return {"check": name, "seed": seed, **report}
