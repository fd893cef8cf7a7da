"""Acceptance criteria, one test each.

Every test records a PASS/FAIL line that is printed in the terminal summary
(and written to stdout when run directly with ``-s``).
"""

import math

import numpy as np
import pytest

from conftest import ACCEPTANCE_ROWS
from hilbertgeom.cli import run
from hilbertgeom.errors import BodyIsEllipse
from hilbertgeom.extremal import (
    band_lower_bound,
    chord_clearance_check,
    circle_chords_check,
    dichotomy_witnesses,
    half_chord_height_check,
    ideal_area_upper_bound,
    john_ellipse,
    loewner_ellipse,
    rectangle_cap_check,
)
from hilbertgeom.hilbert_core import ball_area_batch, finsler_norm_batch, unit_ball
from hilbertgeom.measure import (
    QuadratureOptions,
    Verdict,
    corner_divergence_probe,
    ideal_triangle_area,
    region_area,
)
from hilbertgeom.planar_convex import (
    Ellipse,
    Polygon,
    random_convex_polygon,
    regular_polygon,
    rolling_radii,
)
from hilbertgeom.simplex import F_closed, F_prime, ideal_area_closed, square_ball_bounds, t_alpha_vertices
from hilbertgeom.verify import (
    _chord_partner,
    random_boundary_points,
    random_ideal_triangle,
    random_interior_points,
)

PI3_24 = math.pi**3 / 24


def record(num, ok, detail):
    ok = bool(ok)
    ACCEPTANCE_ROWS.append((num, ok, detail))
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d}: {detail}")
    return ok


@pytest.fixture(scope="module")
def trefoil_triangles(trefoil):
    """50 random ideal triangles of the support body with their areas."""
    rng = np.random.default_rng(1101)
    opts = QuadratureOptions(rel_tol=1e-3)
    out = []
    for _ in range(50):
        tri = random_ideal_triangle(trefoil, rng)
        out.append((tri, ideal_triangle_area(trefoil, tri, opts)))
    return out


def test_criterion_01_ellipse_universality(disk, ellipse21):
    rng = np.random.default_rng(101)
    opts = QuadratureOptions(rel_tol=1e-5)
    worst = 0.0
    conv = True
    for body in (disk, ellipse21):
        for _ in range(20):
            res = ideal_triangle_area(body, random_ideal_triangle(body, rng), opts)
            conv &= res.converged
            worst = max(worst, abs(res.value - math.pi))
    ok = conv and worst <= 1e-3 * math.pi
    assert record(1, ok, f"40 ideal triangles in disk and ellipse(2,1): max |area - pi| = {worst:.2e} <= {1e-3 * math.pi:.2e}")


def test_criterion_02_minimum_value(tri0):
    res = ideal_triangle_area(tri0, t_alpha_vertices(0.5), QuadratureOptions(rel_tol=1e-7))
    rel = abs(res.value - PI3_24) / PI3_24
    closed = abs(ideal_area_closed(0.5) - PI3_24)
    ok = res.converged and rel <= 1e-4 and closed <= 1e-12
    assert record(2, ok, f"T(1/2): quadrature rel err {rel:.2e} <= 1e-4, closed form err {closed:.1e} <= 1e-12")


def test_criterion_03_closed_form_vs_quadrature(tri0):
    alphas = 0.05 + 0.45 * np.arange(1, 21) / 20
    opts = QuadratureOptions(rel_tol=1e-7)
    closed = np.array([ideal_area_closed(a) for a in alphas])
    quad = np.array([ideal_triangle_area(tri0, t_alpha_vertices(a), opts).value for a in alphas])
    excess = np.abs(closed - quad) - np.maximum(1e-5, 1e-4 * closed)
    decreasing = bool(np.all(np.diff(closed) < 0) and np.all(np.diff(quad) < 0))
    ok = np.all(excess <= 0) and decreasing
    assert record(
        3,
        ok,
        f"20 alphas: max |closed - quad| = {np.abs(closed - quad).max():.2e}, strictly decreasing = {decreasing}",
    )


def test_criterion_04_derivative_consistency():
    worst = 0.0
    positive = True
    for t in (0.01, 0.1, 1.0, 5.0, 10.0):
        h = 1e-5 * max(1.0, t)
        fd = (F_closed(t + h) - F_closed(t - h)) / (2 * h)
        worst = max(worst, abs(fd - F_prime(t)))
        positive &= F_prime(t) > 0
    ok = worst <= 1e-6 and positive
    assert record(4, ok, f"central differences vs F': max err {worst:.2e} <= 1e-6, F' > 0 = {positive}")


def test_criterion_05_square_sandwich(square):
    rng = np.random.default_rng(105)
    P = rng.uniform(-1, 1, size=(10_000, 2)) * (1 - 1e-6)
    areas = ball_area_batch(square, P)
    bounds = np.array([square_ball_bounds(p) for p in P])
    slack = np.minimum(areas - bounds[:, 0], bounds[:, 1] - areas).min()
    # structured samples: the center, points on the diagonals, points off them
    shapes_ok = unit_ball(square, (0, 0)).shape_name == "square"
    s = np.linspace(-0.95, 0.95, 34)
    s = s[np.abs(s) > 1e-9][:33]
    diag = [(x, x) if k % 2 == 0 else (x, -x) for k, x in enumerate(s)]
    off = [(x, 0.37 * x + 0.11) for x in np.linspace(-0.9, 0.9, 66)]
    off = [(x, y) for x, y in off if abs(abs(x) - abs(y)) > 1e-6]
    n = 1 + len(diag) + len(off)
    shapes_ok &= all(unit_ball(square, p).shape_name == "hexagon" for p in diag)
    shapes_ok &= all(unit_ball(square, p).shape_name == "octagon" for p in off)
    ok = slack >= -1e-12 and shapes_ok and n == 100
    assert record(5, ok, f"1e4 square balls: min slack {slack:.2e} >= -1e-12; {n} structured shapes correct = {shapes_ok}")


def _nested_pairs(trefoil):
    square = Polygon([[-1, -1], [1, -1], [1, 1], [-1, 1]])
    return [
        ("square > 0.8 square", square, Polygon(0.8 * square.vertices)),
        ("disk > disk(0.7)", Ellipse([0, 0], 1, 1), Ellipse([0, 0], 0.7, 0.7)),
        ("disk > inscribed hexagon", Ellipse([0, 0], 1, 1), regular_polygon(6)),
        ("rectangle > ellipse(2,1)", Polygon([[-2, -1], [2, -1], [2, 1], [-2, 1]]), Ellipse([0, 0], 2, 1)),
        ("support body > disk(0.85)", trefoil, Ellipse([0, 0], 0.85, 0.85)),
    ]


def test_criterion_06_monotonicity(trefoil):
    rng = np.random.default_rng(106)
    opts = QuadratureOptions(rel_tol=1e-9)
    worst = math.inf
    n_regions = 0
    for _, outer, inner in _nested_pairs(trefoil):
        P = random_interior_points(inner, rng, 1000)
        V = rng.normal(size=(1000, 2))
        norm_slack = finsler_norm_batch(inner, P, V) - finsler_norm_batch(outer, P, V)
        ball_slack = ball_area_batch(outer, P, rel_tol=1e-12) - ball_area_batch(inner, P, rel_tol=1e-12)
        worst = min(worst, norm_slack.min(), ball_slack.min())
        for _ in range(200):
            c = random_interior_points(inner, rng, 1, margin=0.2)[0]
            tri = c + 0.1 * inner.diameter * rng.uniform(-1, 1, size=(3, 2))
            if inner.signed_distance(tri).min() <= 0.01:
                continue
            mu_in = region_area(inner, tri, opts).value
            mu_out = region_area(outer, tri, opts).value
            worst = min(worst, mu_in - mu_out)
            n_regions += 1
    ok = worst >= -1e-10
    assert record(6, ok, f"5 nested pairs, 5000 (p, v), {n_regions} regions: worst slack {worst:.2e} >= -1e-10")


def test_criterion_07_global_floor(trefoil_triangles):
    rng = np.random.default_rng(107)
    opts = QuadratureOptions(rel_tol=1e-5)
    results = []
    for k in range(75):
        body = random_convex_polygon(rng, 4 + k % 5)
        results.append(ideal_triangle_area(body, random_ideal_triangle(body, rng), opts))
    for k in range(75):
        a = rng.uniform(1, 3)
        body = Ellipse(rng.normal(size=2), a, a * rng.uniform(0.2, 1), rng.uniform(0, math.pi))
        results.append(ideal_triangle_area(body, random_ideal_triangle(body, rng), opts))
    results += [res for _, res in trefoil_triangles]
    conv = [r.value for r in results if r.converged]
    low = min(conv)
    ok = len(results) == 200 and low >= PI3_24 - 1e-4
    assert record(7, ok, f"200 ideal triangles ({len(conv)} converged): min area {low:.6f} >= {PI3_24 - 1e-4:.6f}")


def test_criterion_08_flat_divergence(square):
    s, x0 = 0.5, 0.5
    probe = corner_divergence_probe(square, (0, 1), (0, 0), s=s, x0=x0, opts=QuadratureOptions(rel_tol=1e-6))
    bounds = [band_lower_bound(s, t, x0) for t in probe.truncations]
    above = all(a >= b for a, b in zip(probe.areas, bounds))
    growing = bool(np.all(np.diff(probe.areas) > 0))
    below_cap = sum(probe.strip_areas) < 1e4
    ok = above and growing and probe.verdict == Verdict.DIVERGENT and below_cap
    areas = ", ".join(f"{a:.3f}" for a in probe.areas)
    assert record(8, ok, f"flat top of the square: areas ({areas}) above bounds, growing, verdict {probe.verdict}")


def test_criterion_09_corner_divergence(square):
    res = ideal_triangle_area(square, [[1, 1], [-1, 0], [0, -1]])
    ok = res.verdict == Verdict.DIVERGENT
    assert record(9, ok, f"corner triangle in the square: verdict {res.verdict}")


def test_criterion_10_dichotomy(square, ellipse21):
    rng = np.random.default_rng(110)
    pentagon = random_convex_polygon(rng, 5)
    opts = QuadratureOptions(rel_tol=1e-5)
    ok = True
    parts = []
    for name, body in (("square", square), ("pentagon", pentagon)):
        w = dichotomy_witnesses(body, opts)
        inner_ok = w.inner_area.converged and w.inner_area.value < math.pi - 1e-3
        if w.outer_area.verdict == Verdict.DIVERGENT:
            outer_ok = w.divergence is not None and max(w.divergence.areas) > math.pi
        else:
            outer_ok = w.outer_area.converged and w.outer_area.value > math.pi + 1e-3
        ok &= inner_ok and outer_ok
        parts.append(f"{name} inner {w.inner_area.value:.4f}, outer {w.outer_area.verdict}")
    try:
        dichotomy_witnesses(ellipse21, opts)
        ellipse_ok = False
    except BodyIsEllipse as exc:
        ellipse_ok = all(abs(a - math.pi) <= 1e-3 * math.pi for a in exc.areas)
    ok &= ellipse_ok
    assert record(10, ok, "; ".join(parts) + f"; ellipse reported = {ellipse_ok}")


def test_criterion_11_area_ceiling(ellipse21, trefoil, trefoil_triangles):
    rng = np.random.default_rng(111)
    ok = True
    parts = []
    cases = [(ellipse21, QuadratureOptions(rel_tol=1e-6), None), (trefoil, QuadratureOptions(rel_tol=1e-3), trefoil_triangles)]
    for body, opts, tris in cases:
        cert = ideal_area_upper_bound(body, opts)
        fields_ok = cert.delta == cert.r**3 / (4 * cert.R**2)
        fields_ok &= cert.n_cap == math.floor(2 * cert.R / cert.r)
        fields_ok &= cert.bound == 2 * math.pi * (math.floor(2 * cert.R / cert.r) + 1) + cert.core_area
        if tris is None:
            o = QuadratureOptions(rel_tol=1e-5)
            areas = [ideal_triangle_area(body, random_ideal_triangle(body, rng), o) for _ in range(50)]
        else:
            areas = [res for _, res in tris]
        top = max(r.value for r in areas)
        ok &= fields_ok and len(areas) == 50 and all(r.converged for r in areas) and top <= cert.bound
        parts.append(f"max {top:.4f} <= bound {cert.bound:.2f}")
    assert record(11, ok, "ellipse(2,1) and support body, 50 triangles each: " + "; ".join(parts))


def test_criterion_12_chord_and_circle_estimates(ellipse21, trefoil):
    rng = np.random.default_rng(112)
    worst = {}
    # circle chords: a random point on the small radius, then the tangency point
    s = []
    for i in range(10_000):
        rho = rng.uniform(0.1, 2.0)
        rho_p = rho * rng.uniform(1.01, 5.0)
        m = [0.0, rng.uniform(0, rho)] if i % 2 else [0.0, 0.0]
        out = circle_chords_check(rho, rho_p, m, rng.normal(size=2))
        s.append(min(out["slack"], out.get("tangency_slack", math.inf)))
    worst["circle chords"] = min(s)
    hmax = 1 - math.sqrt(3) / 2
    s = []
    for _ in range(10_000):
        r = rng.uniform(0.1, 3.0)
        s.append(half_chord_height_check(r, rng.uniform(0, hmax) * r)["slack"])
    worst["half chord"] = min(s)
    s = []
    for body in (ellipse21, trefoil):
        rr = rolling_radii(body)
        for _ in range(5_000):
            a, b = random_boundary_points(body, rng, 2, min_gap=1e-3, max_gap=2 * np.pi)
            s.append(chord_clearance_check(body, a, b, rr)["slack"])
    worst["chord clearance"] = min(s)
    s = []
    opts = QuadratureOptions(rel_tol=1e-5)
    for k in range(100):
        aa = rng.uniform(0.5, 2.5)
        body = Ellipse([0, 0], aa, aa * rng.uniform(0.3, 1.0), rng.uniform(0, math.pi))
        rr = rolling_radii(body)
        a = random_boundary_points(body, rng, 1, min_gap=0, max_gap=2 * np.pi)[0]
        b = _chord_partner(body, a, rng.uniform(0.2, 1.0) * rr.r)
        res = rectangle_cap_check(body, a, b, opts, rr)
        s.append(res.cap - res.area.value if res.area.converged else -math.inf)
    worst["rectangle cap"] = min(s)
    ok = all(v >= -1e-12 for v in worst.values())
    detail = ", ".join(f"{k} {v:.2e}" for k, v in worst.items())
    assert record(12, ok, f"worst slacks (>= -1e-12): {detail}")


def test_criterion_13_john_loewner(tri0, square):
    j = john_ellipse(tri0)
    mids = np.array([[0.5, 0.0], [0.0, 0.5], [0.5, 0.5]])
    contact_err = max(np.min(np.linalg.norm(j.contacts - m, axis=1)) for m in mids)
    lo = loewner_ellipse(tri0)
    y = lo.ellipse.normalized(tri0.vertices)
    through = np.abs((y * y).sum(1) - 1).max()
    center_err = np.abs(lo.ellipse.center - 1 / 3).max()
    js, ls = john_ellipse(square).ellipse, loewner_ellipse(square).ellipse
    disk_err = max(
        abs(js.semi_major - 1), abs(js.semi_minor - 1), abs(ls.semi_major - math.sqrt(2)), abs(ls.semi_minor - math.sqrt(2)),
        np.abs(js.center).max(), np.abs(ls.center).max(),
    )
    ok = contact_err <= 1e-6 and through <= 1e-9 and center_err <= 1e-9 and disk_err <= 1e-9
    assert record(
        13,
        ok,
        f"Steiner contacts err {contact_err:.1e}, circumellipse err {max(through, center_err):.1e}, square disks err {disk_err:.1e}",
    )


def test_criterion_14_determinism(tmp_path):
    runs = {
        "csv": ["sweep-alpha", "--from", "0.2", "--to", "0.5", "--steps", "3", "--seed", "4"],
        "json": ["verify", "area-floor", "--body", "random", "--seed", "7"],
        "svg-json": ["john", "--body", "random", "--seed", "9"],
    }
    same = True
    for name, argv in runs.items():
        blobs = []
        for k in range(2):
            out = tmp_path / f"{name}-{k}.txt"
            svg = tmp_path / f"{name}-{k}.svg"
            assert run(argv + ["--out", str(out), "--svg", str(svg)]) == 0
            blobs.append((out.read_bytes(), svg.read_bytes() if svg.exists() else b""))
        same &= blobs[0] == blobs[1]
    assert record(14, same, "repeated CLI runs give byte-identical CSV, JSON and SVG = " + str(same))
