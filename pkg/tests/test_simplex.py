import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate
from scipy.special import spence

from hilbertgeom.errors import (
    DegenerateTriangle,
    NegativeT,
    NonpositiveT,
    OutOfRange,
    OutsideDomain,
    OutsideSquare,
)
from hilbertgeom.hilbert_core import ball_area
from hilbertgeom.measure import QuadratureOptions, ideal_triangle_area
from hilbertgeom.simplex import (
    BarycentricSpec,
    F_closed,
    F_prime,
    canonical_alpha,
    canonical_map,
    dilog,
    ideal_area_closed,
    square_ball_bounds,
    t_alpha_vertices,
    triangle_density,
)


def li2_oracle(x):
    # scipy's spence(z) = Li2(1 - z)
    return float(spence(1.0 - x))


def test_dilog_special_values():
    assert dilog(1.0) == pytest.approx(math.pi**2 / 6, abs=1e-15)
    assert dilog(-1.0) == pytest.approx(-math.pi**2 / 12, abs=1e-15)
    assert dilog(0.5) == pytest.approx(math.pi**2 / 12 - math.log(2) ** 2 / 2, abs=1e-15)
    assert dilog(0.0) == 0.0


def test_dilog_against_scipy():
    x = np.linspace(-1, 1, 2001)
    ours = dilog(x)
    ref = np.array([li2_oracle(v) for v in x])
    np.testing.assert_allclose(ours, ref, rtol=1e-14, atol=1e-15)


def test_dilog_out_of_range():
    with pytest.raises(OutOfRange):
        dilog(1.5)
    with pytest.raises(OutOfRange):
        dilog(float("nan"))


@settings(max_examples=100, deadline=None)
@given(st.floats(-1, 1))
def test_dilog_duplication(x):
    # Li2(x) + Li2(-x) = Li2(x^2) / 2
    assert dilog(x) + dilog(-x) == pytest.approx(0.5 * dilog(x * x), abs=1e-14)


def F_by_integral(t):
    # F(t) = 12/pi times the area of T(alpha); integrate the triangle density
    # pi / (12 x y (1 - x - y)) over T(alpha) with scipy as an independent oracle
    alpha = 1 / (t + 2)
    # 0 < x < alpha and y between the side through (0, 1 - alpha), (alpha, 0)
    # and the side y = 1 - alpha
    def f(y, x):
        return 1.0 / (x * y * (1 - x - y))

    val, _ = integrate.dblquad(
        f,
        0,
        alpha,
        lambda x: (1 - alpha) * (1 - x / alpha),
        lambda x: 1 - alpha,
        epsabs=1e-13,
        epsrel=1e-12,
    )
    return val


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_F_against_integral(t):
    assert F_closed(t) == pytest.approx(F_by_integral(t), rel=1e-10)


def test_F_at_zero_and_errors():
    assert F_closed(0.0) == pytest.approx(math.pi**2 / 2, abs=1e-15)
    assert F_closed(1e-12) == pytest.approx(math.pi**2 / 2, abs=1e-9)
    with pytest.raises(NegativeT):
        F_closed(-0.1)
    with pytest.raises(NonpositiveT):
        F_prime(0.0)


def test_F_prime_examples():
    assert F_prime(1.0) == pytest.approx(math.log(2) / 2, rel=1e-15)
    for t in (0.01, 0.1, 1.0, 5.0, 10.0):
        h = 1e-5 * max(1.0, t)
        fd = (F_closed(t + h) - F_closed(t - h)) / (2 * h)
        assert fd == pytest.approx(F_prime(t), abs=1e-6)
        assert F_prime(t) > 0


def test_F_increases_and_flattens():
    # F grows in t, so the area of T(alpha) decreases in alpha
    t = np.geomspace(1e-3, 1e6, 60)
    vals = np.array([F_closed(x) for x in t])
    assert np.all(np.diff(vals) > 0)
    # the derivative decays to 0 at infinity
    d = np.array([F_prime(x) for x in t])
    assert d[-1] < 1e-4


def test_area_references():
    assert ideal_area_closed(0.5) == pytest.approx(math.pi**3 / 24, abs=1e-14)
    assert ideal_area_closed(1 / 3) == pytest.approx(math.pi / 12 * F_closed(1.0), abs=1e-15)
    assert ideal_area_closed(0.2) > ideal_area_closed(0.3) > ideal_area_closed(0.5)
    with pytest.raises(OutOfRange):
        ideal_area_closed(0.6)
    with pytest.raises(OutOfRange):
        ideal_area_closed(0.0)


def test_area_third_against_quadrature(tri0):
    res = ideal_triangle_area(tri0, t_alpha_vertices(1 / 3), QuadratureOptions(rel_tol=1e-8))
    assert res.value == pytest.approx(ideal_area_closed(1 / 3), rel=1e-5)


def test_triangle_density(tri0):
    assert triangle_density((1 / 3, 1 / 3)) == pytest.approx(9 * math.pi / 4, rel=1e-15)
    ball, _ = ball_area(tri0, (0.2, 0.3))
    assert triangle_density((0.2, 0.3)) == pytest.approx(math.pi / ball, rel=1e-12)
    vals = [triangle_density((x, x)) for x in (0.3, 0.1, 0.01, 0.001)]
    assert np.all(np.diff(vals) > 0)
    with pytest.raises(OutsideDomain):
        triangle_density((0.6, 0.6))


def test_canonical_alpha_examples():
    assert canonical_alpha(BarycentricSpec(0.5, 0.5, 0.5)) == pytest.approx(0.5)
    assert canonical_alpha(BarycentricSpec(1 / 3, 1 / 3, 1 / 3)) == pytest.approx(1 / 9, abs=1e-15)
    assert canonical_alpha(BarycentricSpec(2 / 3, 2 / 3, 2 / 3)) == pytest.approx(1 / 9, abs=1e-15)
    with pytest.raises(OutOfRange):
        BarycentricSpec(0.0, 0.5, 0.5)


def test_canonical_map_of_standard_triangle():
    spec = BarycentricSpec(0.5, 0.5, 0.5)
    cmap = canonical_map((0, 0), (1, 0), (0, 1), spec)
    assert cmap.alpha == pytest.approx(0.5)
    # the map fixes the vertices m, p, q up to labels, and the three ideal
    # vertices land on T(1/2)
    img = cmap(spec.ideal_vertices((0, 0), (1, 0), (0, 1)))
    ref = t_alpha_vertices(0.5)
    assert {tuple(np.round(r, 12)) for r in img} == {tuple(np.round(r, 12)) for r in ref}


def test_canonical_map_degenerate():
    with pytest.raises(DegenerateTriangle):
        canonical_map((0, 0), (1, 1), (2, 2), BarycentricSpec(0.5, 0.5, 0.5))


@settings(max_examples=50, deadline=None)
@given(
    st.integers(0, 2**32 - 1),
    st.floats(0.05, 0.95),
    st.floats(0.05, 0.95),
    st.floats(0.05, 0.95),
)
def test_canonical_map_hits_T_alpha(seed, lam, mu, nu):
    rng = np.random.default_rng(seed)
    m, p, q = rng.normal(size=(3, 2))
    if abs((p[0] - m[0]) * (q[1] - m[1]) - (p[1] - m[1]) * (q[0] - m[0])) < 0.1:
        return
    spec = BarycentricSpec(lam, mu, nu)
    cmap = canonical_map(m, p, q, spec)
    alpha = canonical_alpha(spec)
    assert cmap.alpha == pytest.approx(alpha, rel=1e-12)
    assert 0 < alpha <= 0.5
    img = cmap(np.stack([m, p, q]))
    assert {tuple(np.round(r, 8)) for r in img} == {(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)}
    ideal = cmap(spec.ideal_vertices(m, p, q))
    ref = t_alpha_vertices(alpha)
    if cmap.relabeled:
        ideal = ideal[::-1]
    np.testing.assert_allclose(ideal, ref, atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.05, 0.95), st.floats(0.05, 0.95))
def test_alpha_is_affine_invariant(lam, mu, nu):
    spec = BarycentricSpec(lam, mu, nu)
    m, p, q = np.array([[0.0, 0.0], [3.0, 0.5], [1.0, 2.0]])
    A = np.array([[1.5, 0.3], [-0.2, 0.7]])
    a1 = canonical_map(m, p, q, spec).alpha
    a2 = canonical_map(m @ A.T + 1, p @ A.T + 1, q @ A.T + 1, spec).alpha
    assert a1 == pytest.approx(a2, rel=1e-12)


def test_square_bounds(square):
    assert square_ball_bounds((0, 0)) == (2.0, 4.0)
    lo, hi = square_ball_bounds((0.3, -0.5))
    area, _ = ball_area(square, (0.3, -0.5))
    assert lo <= area <= hi
    with pytest.raises(OutsideSquare):
        square_ball_bounds((1.0, 0.0))
