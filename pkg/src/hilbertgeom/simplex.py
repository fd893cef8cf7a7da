"""
Closed forms for the triangle domain and the square.

The standard triangle ``D0`` has vertices (0,0), (1,0), (0,1).  Its Hilbert
density is ``pi / (12 x y (1 - x - y))``.  Every ideal triangle of a
triangle domain is projectively equivalent to the triangle ``T(alpha)`` with
vertices ``(alpha, 1 - alpha)``, ``(0, 1 - alpha)``, ``(alpha, 0)``, whose
area is ``(pi / 12) F((1 - 2 alpha) / alpha)`` with ``F`` written through the
dilogarithm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateTriangle,
    NegativeT,
    NonpositiveT,
    OutOfRange,
    OutsideDomain,
    OutsideSquare,
)
from .planar_convex import homography_point

PI2_6 = math.pi**2 / 6


# ---------------------------------------------------------------------------
# Dilogarithm
# ---------------------------------------------------------------------------


def _li2_series(x: float) -> float:
    """Power series, used for 0 <= x <= 1/2 (terms shrink at least like 2^-k)."""
    total = 0.0
    term = x
    k = 1
    while True:
        add = term / (k * k)
        total += add
        if abs(add) < 1e-17 * abs(total) or k > 200:
            return total
        k += 1
        term *= x


def _li2_unit(x: float) -> float:
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return PI2_6
    if x < 0:
        # Landen: moves [-1, 0) into (0, 1/2]
        y = x / (x - 1.0)
        return -_li2_unit(y) - 0.5 * math.log1p(-x) ** 2
    if x > 0.5:
        return PI2_6 - math.log(x) * math.log1p(-x) - _li2_series(1.0 - x)
    return _li2_series(x)


def dilog(x):
    """Real dilogarithm ``Li2(x) = sum x^k / k^2`` on ``[-1, 1]``."""
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(np.abs(arr) > 1):
        raise OutOfRange("dilog is provided on [-1, 1] only")
    if arr.ndim == 0:
        return _li2_unit(float(arr))
    return np.vectorize(_li2_unit, otypes=[float])(arr)


def _li2_minus(t: float) -> float:
    """``Li2(-t)`` for any ``t >= 0``; inversion handles ``t > 1``."""
    if t <= 1.0:
        return _li2_unit(-t)
    lt = math.log(t)
    return -PI2_6 - 0.5 * lt * lt - _li2_unit(-1.0 / t)


# ---------------------------------------------------------------------------
# F, F' and the area of T(alpha)
# ---------------------------------------------------------------------------


def F_closed(t: float) -> float:
    """``(12 / pi)`` times the Hilbert area of ``T(alpha)`` with ``t = (1 - 2 alpha) / alpha``."""
    t = float(t)
    if not t >= 0 or not math.isfinite(t):
        raise NegativeT("F is defined for t >= 0")
    if t == 0.0:
        return math.pi**2 / 2
    s = 1.0 / (1.0 + t)
    log_term = math.log1p(1.0 / t) * math.log1p(t)
    return (
        2 * PI2_6
        - 2 * _li2_unit(-s)
        - _li2_minus(t)
        - _li2_unit(s)
        + _li2_unit(s * s)
        + log_term
    )


def F_prime(t: float) -> float:
    """Derivative of :func:`F_closed`: ``ln(1 + t) / (1 + t)``."""
    t = float(t)
    if not t > 0:
        raise NonpositiveT("F' is evaluated for t > 0")
    return math.log1p(t) / (1.0 + t)


def ideal_area_closed(alpha: float) -> float:
    """Hilbert area of ``T(alpha)`` in the standard triangle."""
    alpha = float(alpha)
    if not 0 < alpha <= 0.5:
        raise OutOfRange("alpha must lie in (0, 1/2]")
    return math.pi / 12 * F_closed((1 - 2 * alpha) / alpha)


def t_of_alpha(alpha: float) -> float:
    return (1 - 2 * alpha) / alpha


def t_alpha_vertices(alpha: float) -> np.ndarray:
    """Vertices ``a, b, c`` of ``T(alpha)``."""
    return np.array([[alpha, 1 - alpha], [0.0, 1 - alpha], [alpha, 0.0]])


# ---------------------------------------------------------------------------
# Triangle domain
# ---------------------------------------------------------------------------


def triangle_density(p) -> float:
    x, y = (float(c) for c in p)
    z = 1.0 - x - y
    if not (x > 0 and y > 0 and z > 0):
        raise OutsideDomain("point is not inside the standard triangle")
    return math.pi / (12.0 * x * y * z)


@dataclass(frozen=True)
class BarycentricSpec:
    """Positions of the ideal vertices on the sides ``mp``, ``pq``, ``qm``."""

    lam: float
    mu: float
    nu: float

    def __post_init__(self):
        for name in ("lam", "mu", "nu"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise OutOfRange(f"{name} must lie in (0, 1)")

    def complement(self) -> "BarycentricSpec":
        return BarycentricSpec(1 - self.lam, 1 - self.mu, 1 - self.nu)

    def ideal_vertices(self, m, p, q) -> np.ndarray:
        m, p, q = (np.asarray(x, dtype=float) for x in (m, p, q))
        a = (1 - self.lam) * m + self.lam * p
        b = (1 - self.mu) * p + self.mu * q
        c = (1 - self.nu) * q + self.nu * m
        return np.stack([a, b, c])


def _raw_alpha(spec: BarycentricSpec) -> float:
    lmn = spec.lam * spec.mu * spec.nu
    rest = (1 - spec.lam) * (1 - spec.mu) * (1 - spec.nu)
    return lmn / (rest + lmn)


def canonical_alpha(spec: BarycentricSpec) -> float:
    a = _raw_alpha(spec)
    if a > 0.5:
        a = _raw_alpha(spec.complement())
    return a


@dataclass(frozen=True)
class CanonicalMap:
    """Projective map sending a triangle domain onto ``D0`` and an ideal
    triangle onto ``T(alpha)``.

    ``relabeled`` is set when the vertex order ``(m, q, p)`` was used to bring
    ``alpha`` into ``(0, 1/2]``; the ideal vertices then land as ``c -> a(alpha)``,
    ``b -> b(alpha)``, ``a -> c(alpha)``.
    """

    matrix: np.ndarray
    alpha: float
    relabeled: bool

    def __call__(self, points):
        return homography_point(self.matrix, points)


def canonical_map(m, p, q, spec: BarycentricSpec) -> CanonicalMap:
    m, p, q = (np.asarray(x, dtype=float) for x in (m, p, q))
    M = np.array([[m[0], p[0], q[0]], [m[1], p[1], q[1]], [1.0, 1.0, 1.0]])
    scale = max(np.ptp(M[:2], axis=1).max(), 1e-300)
    if abs(np.linalg.det(M)) <= 1e-14 * scale**2:
        raise DegenerateTriangle("m, p, q are collinear")
    relabeled = _raw_alpha(spec) > 0.5
    if relabeled:
        M = M[:, [0, 2, 1]]
        spec = BarycentricSpec(1 - spec.nu, 1 - spec.mu, 1 - spec.lam)
    lam, mu, nu = spec.lam, spec.mu, spec.nu
    alpha = _raw_alpha(spec)
    u = (1 - lam) * (1 - mu) / (lam * mu)
    v = lam * nu / ((1 - lam) * (1 - nu))
    w = 1.0
    big = max(abs(u), abs(v), abs(w))
    u, v, w = u / big, v / big, w / big
    # barycentric lift, central projection onto the plane through u e1, v e2,
    # w e3, then the linear map sending those three points to e1, e2, 0
    D = np.array([[1 / u, 0, 0], [0, 1 / v, 0], [1 / u, 1 / v, 1 / w]])
    H = D @ np.linalg.inv(M)
    H = H / np.abs(H).max()
    return CanonicalMap(H, alpha, relabeled)


# ---------------------------------------------------------------------------
# Square
# ---------------------------------------------------------------------------


def square_ball_bounds(p):
    """Lower and upper bounds on the unit-ball area at ``p`` in (-1, 1)^2."""
    x, y = (float(c) for c in p)
    if not (abs(x) < 1 and abs(y) < 1):
        raise OutsideSquare("point must lie in the open square (-1, 1)^2")
    base = (1 - x * x) * (1 - y * y)
    return 2 * base, 4 * base
