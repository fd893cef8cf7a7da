import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hilbertgeom.cubature import fan_triangles, integrate_triangles, rectangle_triangles
from hilbertgeom.errors import DeltaTooLarge, NotACornerOrFlat, RegionNotInside, TriangleNotInside
from hilbertgeom.extremal import band_lower_bound
from hilbertgeom.measure import (
    IdealTriangle,
    QuadratureOptions,
    Verdict,
    VertexFlag,
    compact_core_area,
    corner_divergence_probe,
    ideal_triangle_area,
    region_area,
)
from hilbertgeom.planar_convex import AffineMap, Polygon, apply_affine, random_convex_polygon
from hilbertgeom.simplex import t_alpha_vertices

PI3_24 = math.pi**3 / 24


# --- cubature ---------------------------------------------------------------


def test_cubature_polynomial_exact():
    tris = rectangle_triangles(0, 2, -1, 1)
    res = integrate_triangles(lambda P: P[:, 0] ** 3 * P[:, 1] ** 2 + 1, tris)
    # int_0^2 x^3 dx * int_-1^1 y^2 dy + area = 4 * 2/3 + 4
    assert res.value == pytest.approx(4 * 2 / 3 + 4, rel=1e-14)
    assert res.converged


def test_cubature_smooth_integrand():
    tris = fan_triangles(np.array([[0, 0], [1, 0], [1, 1], [0, 1.0]]))
    res = integrate_triangles(lambda P: np.exp(P[:, 0] + P[:, 1]), tris, rel_tol=1e-12, abs_tol=1e-14)
    assert res.value == pytest.approx((math.e - 1) ** 2, rel=1e-12)


def test_cubature_singular_corner():
    # int over the unit square of 1/sqrt(x^2 + y^2) = 2 asinh(1)
    tris = rectangle_triangles(0, 1, 0, 1)
    res = integrate_triangles(lambda P: 1 / np.hypot(P[:, 0], P[:, 1]), tris, rel_tol=1e-8, abs_tol=1e-12)
    assert res.converged
    assert res.value == pytest.approx(2 * math.asinh(1), rel=1e-7)


def test_cubature_reports_failure_when_capped():
    tris = rectangle_triangles(0, 1, 0, 1)
    res = integrate_triangles(lambda P: np.hypot(P[:, 0], P[:, 1]) ** -1.9, tris, rel_tol=1e-12, max_cells=64)
    assert not res.converged


# --- regions ----------------------------------------------------------------


def test_tiny_square_at_disk_center(disk):
    h = 5e-4
    res = region_area(disk, [[-h, -h], [h, -h], [h, h], [-h, h]])
    assert res.value == pytest.approx(1e-6, rel=1e-4)
    assert res.verdict == Verdict.CONVERGED


def test_disk_region_closed_form(disk):
    # Klein disk of Euclidean radius rho has hyperbolic area 2 pi (1/sqrt(1-rho^2) - 1);
    # a regular 64-gon is close, so integrate the exact density over the 64-gon
    # and compare with polar quadrature from scipy as an independent oracle
    from scipy import integrate

    k = 64
    rho = 0.6
    th = 2 * np.pi * np.arange(k) / k
    poly = rho * np.stack([np.cos(th), np.sin(th)], axis=1)
    res = region_area(disk, poly, QuadratureOptions(rel_tol=1e-10, abs_tol=1e-12))
    half = math.pi / k
    apothem = rho * math.cos(half)

    def radial(phi):
        R = apothem / math.cos(phi)
        return 1 / math.sqrt(1 - R * R) - 1

    oracle = 2 * k * integrate.quad(radial, 0, half, epsabs=1e-14, epsrel=1e-13)[0]
    assert res.value == pytest.approx(oracle, rel=1e-9)


def test_region_additivity(square):
    a = region_area(square, [[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]], QuadratureOptions(rel_tol=1e-10))
    left = region_area(square, [[-0.5, -0.5], [0.1, -0.5], [0.1, 0.5], [-0.5, 0.5]], QuadratureOptions(rel_tol=1e-10))
    right = region_area(square, [[0.1, -0.5], [0.5, -0.5], [0.5, 0.5], [0.1, 0.5]], QuadratureOptions(rel_tol=1e-10))
    assert a.value == pytest.approx(left.value + right.value, rel=1e-9)


def test_region_affine_invariance(square):
    region = np.array([[-0.3, -0.2], [0.6, -0.4], [0.2, 0.7]])
    amap = AffineMap(np.array([[2.0, 0.5], [-0.3, 1.2]]), np.array([0.4, -1.0]))
    img_body = apply_affine(square, amap)
    img_region = region @ amap.matrix.T + amap.offset
    opts = QuadratureOptions(rel_tol=1e-10)
    assert region_area(img_body, img_region, opts).value == pytest.approx(region_area(square, region, opts).value, rel=1e-9)


def test_region_must_be_inside(square):
    with pytest.raises(RegionNotInside):
        region_area(square, [[0, 0], [1, 0], [0, 0.5]])


# --- ideal triangles ----------------------------------------------------------


def test_disk_equilateral_is_pi(disk):
    th = 2 * np.pi * np.arange(3) / 3
    res = ideal_triangle_area(disk, np.stack([np.cos(th), np.sin(th)], axis=1))
    assert res.converged
    assert abs(res.value - math.pi) <= 1e-3 * math.pi


def test_midpoint_triangle(tri0):
    res = ideal_triangle_area(tri0, t_alpha_vertices(0.5), QuadratureOptions(rel_tol=1e-8))
    assert res.converged
    assert res.value == pytest.approx(PI3_24, rel=1e-7)


def test_orientation_does_not_matter(tri0):
    v = t_alpha_vertices(0.3)
    a = ideal_triangle_area(tri0, v).value
    b = ideal_triangle_area(tri0, v[::-1]).value
    assert a == pytest.approx(b, rel=1e-9)
    assert a > 0


def test_corner_triangle_diverges(square):
    res = ideal_triangle_area(square, [[1, 1], [-1, 0], [0, -1]])
    assert res.verdict == Verdict.DIVERGENT
    assert math.isinf(res.value)


def test_flat_side_triangle_diverges(square):
    res = ideal_triangle_area(square, [[-0.5, 1], [0.5, 1], [0, -1]])
    assert res.verdict == Verdict.DIVERGENT


def test_vertex_flags(square, disk):
    tri = IdealTriangle.from_points(square, (1, 1), (-1, 0.2), (0, 0))
    assert tri.flags == (VertexFlag.CORNER, VertexFlag.FLAT_EDGE, VertexFlag.INTERIOR)
    tri = IdealTriangle.from_points(disk, (1, 0), (0, 1), (0, 0))
    assert tri.flags[0] == VertexFlag.SMOOTH


def test_triangle_outside_rejected(disk):
    with pytest.raises(TriangleNotInside):
        IdealTriangle.from_points(disk, (1.2, 0), (0, 1), (-1, 0))


def test_interior_triangle_matches_region(square):
    v = np.array([[-0.4, -0.3], [0.5, -0.2], [0.1, 0.6]])
    opts = QuadratureOptions(rel_tol=1e-9)
    assert ideal_triangle_area(square, v, opts).value == pytest.approx(region_area(square, v, opts).value, rel=1e-8)


@settings(max_examples=5, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_ideal_area_affine_invariant(seed):
    rng = np.random.default_rng(seed)
    body = random_convex_polygon(rng, 5)
    # ideal vertices at edge midpoints avoid flat sides
    v = 0.5 * (body.vertices + np.roll(body.vertices, -1, axis=0))[[0, 2, 3]]
    A = rng.normal(size=(2, 2)) + 2 * np.eye(2)
    if abs(np.linalg.det(A)) < 0.3:
        return
    amap = AffineMap(A, rng.normal(size=2))
    opts = QuadratureOptions(rel_tol=1e-7)
    a = ideal_triangle_area(body, v, opts)
    b = ideal_triangle_area(apply_affine(body, amap), v @ A.T + amap.offset, opts)
    assert a.converged and b.converged
    assert a.value == pytest.approx(b.value, rel=1e-5)


# --- probes -------------------------------------------------------------------


def test_flat_probe_exceeds_band_bound(square):
    probe = corner_divergence_probe(square, (0, 1), (0, 0), s=0.5, x0=0.5)
    assert probe.kind == "flat"
    assert probe.verdict == Verdict.DIVERGENT
    assert np.all(np.diff(probe.areas) > 0)
    for t, a in zip(probe.truncations, probe.areas):
        assert a >= band_lower_bound(0.5, t, 0.5)


def test_probe_empty_truncation(square):
    probe = corner_divergence_probe(square, (0, 1), (0, 0), truncations=(0.5,), s=0.5)
    assert probe.areas == (0.0,)


def test_corner_probe_diverges(square):
    probe = corner_divergence_probe(square, (1, 1), (0.5, 0), (0, 0.5))
    assert probe.kind == "corner"
    assert probe.verdict == Verdict.DIVERGENT
    assert np.all(np.diff(probe.areas) > 0)


def test_probe_rejects_smooth_point(disk):
    with pytest.raises(NotACornerOrFlat):
        corner_divergence_probe(disk, (1, 0), (0, 0.5), (0, -0.5))


# --- compact core -------------------------------------------------------------


def test_disk_core_closed_form(disk):
    res = compact_core_area(disk, 0.5, QuadratureOptions(rel_tol=1e-9))
    assert res.value == pytest.approx(2 * math.pi * (1 / math.sqrt(0.75) - 1), rel=1e-7)


def test_core_shrinks_with_delta(ellipse21):
    vals = [compact_core_area(ellipse21, d).value for d in (0.05, 0.2, 0.45)]
    assert vals[0] > vals[1] > vals[2] > 0


def test_core_vanishes_near_inradius(disk):
    assert compact_core_area(disk, 0.999).value < 1e-5


def test_core_delta_limits(disk, square):
    with pytest.raises(DeltaTooLarge):
        compact_core_area(disk, 1.0)
    with pytest.raises(ValueError):
        compact_core_area(disk, 1e-8)
    with pytest.raises(Exception):
        compact_core_area(square, 0.1)


def test_options_validation():
    with pytest.raises(ValueError):
        QuadratureOptions(rel_tol=0)
    assert QuadratureOptions(rel_tol=1e-4).density_tol == pytest.approx(1e-5)
    assert Polygon([[0, 0], [1, 0], [0, 1]]).area == pytest.approx(0.5)
