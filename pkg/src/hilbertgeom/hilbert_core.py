"""
Hilbert distance, Finsler norm and Finsler unit balls of a planar convex body.

For a polygon the unit ball at a point is computed exactly: the norm is
linear on each cone bounded by the directions towards the body vertices and
their opposites, so the ball is the polygon through the points ``u / F(u)``
taken along those critical directions.  Smooth bodies get a sampled ball.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import PointNotInterior
from .planar_convex import (
    ConvexBody,
    Ellipse,
    Polygon,
    SmoothBody,
    as_point,
    cross2,
)

NEAR_BOUNDARY_REL = 1e-6
DEFAULT_DIRECTIONS = 256


def _exits(body: ConvexBody, p, v):
    """Exit parameters along ``v`` and ``-v`` (in units of ``|v|``)."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    p, v = np.broadcast_arrays(p, v)
    both = body.ray_exit(np.concatenate([p, p]), np.concatenate([v, -v]))
    n = len(p)
    return both[:n], both[n:]


def hilbert_distance(body: ConvexBody, p, q) -> float:
    """Half the log of the cross-ratio of ``p, q`` and the chord endpoints."""
    p = as_point(p)
    q = as_point(q)
    body.require_interior(np.stack([p, q]))
    return float(hilbert_distance_batch(body, p[None], q[None])[0])


def hilbert_distance_batch(body: ConvexBody, P, Q) -> np.ndarray:
    """Vectorized distance for interior point pairs (no interior check)."""
    P = np.asarray(P, dtype=float).reshape(-1, 2)
    Q = np.asarray(Q, dtype=float).reshape(-1, 2)
    v = Q - P
    length = np.linalg.norm(v, axis=1)
    out = np.zeros(len(P))
    moving = length > 0
    if not np.any(moving):
        return out
    Pm, Qm, vm = P[moving], Q[moving], v[moving]
    # the far endpoint beyond q is measured from q, the near one from p
    tb = body.ray_exit(Qm, vm)
    ta = body.ray_exit(Pm, -vm)
    out[moving] = 0.5 * (np.log1p(1.0 / ta) + np.log1p(1.0 / tb))
    return out


def finsler_norm(body: ConvexBody, p, v) -> float:
    p = as_point(p)
    v = as_point(v)
    body.require_interior(p)
    if not np.any(v):
        return 0.0
    return float(finsler_norm_batch(body, p[None], v[None])[0])


def finsler_norm_batch(body: ConvexBody, P, V) -> np.ndarray:
    P = np.asarray(P, dtype=float)
    V = np.asarray(V, dtype=float)
    P, V = np.broadcast_arrays(P, V)
    shape = P.shape[:-1]
    P = P.reshape(-1, 2)
    V = V.reshape(-1, 2)
    out = np.zeros(len(P))
    nz = np.any(V != 0, axis=1)
    if np.any(nz):
        tp, tm = _exits(body, P[nz], V[nz])
        out[nz] = 0.5 * (1.0 / tp + 1.0 / tm)
    return out.reshape(shape)


@dataclass(frozen=True)
class UnitBallPolygon:
    vertices: np.ndarray
    exact: bool
    n_directions: Optional[int] = None

    @property
    def area(self) -> float:
        v = self.vertices
        return 0.5 * float(cross2(v, np.roll(v, -1, axis=0)).sum())

    def corners(self, rel_tol: float = 1e-9) -> np.ndarray:
        """Vertices where the boundary actually turns."""
        v = self.vertices
        prev = v - np.roll(v, 1, axis=0)
        nxt = np.roll(v, -1, axis=0) - v
        scale = np.linalg.norm(prev, axis=1) * np.linalg.norm(nxt, axis=1)
        turn = cross2(prev, nxt)
        keep = (turn > rel_tol * scale) & (scale > 0)
        return v[keep]

    @property
    def shape_name(self) -> str:
        names = {4: "square", 6: "hexagon", 8: "octagon"}
        k = len(self.corners())
        return names.get(k, f"{k}-gon")

    def is_centrally_symmetric(self, tol: float = 1e-9) -> bool:
        v = self.vertices
        scale = np.abs(v).max()
        for w in v:
            if np.min(np.linalg.norm(v + w, axis=1)) > tol * scale:
                return False
        return True

    def is_convex(self, tol: float = 1e-12) -> bool:
        v = self.vertices
        turn = cross2(v - np.roll(v, 1, axis=0), np.roll(v, -1, axis=0) - v)
        return bool(np.all(turn >= -tol * np.abs(v).max() ** 2))

    def to_json(self):
        return {
            "vertices": self.vertices.tolist(),
            "exact": self.exact,
            "n_directions": self.n_directions,
            "area": self.area,
        }


def _require_ball_point(body: ConvexBody, p):
    p = as_point(p)
    d = float(body.signed_distance(p[None])[0])
    if not d > NEAR_BOUNDARY_REL * body.diameter:
        raise PointNotInterior("point is not interior (or too close to the boundary)")
    return p


def _polygon_critical_directions(body: Polygon, p):
    u = body.vertices - p
    dirs = np.concatenate([u, -u])
    ang = np.arctan2(dirs[:, 1], dirs[:, 0])
    order = np.argsort(ang, kind="stable")
    dirs, ang = dirs[order], ang[order]
    keep = np.ones(len(ang), dtype=bool)
    keep[1:] = np.diff(ang) > 1e-14
    if ang[-1] - ang[0] > 2 * np.pi - 1e-14 and keep.sum() > 1:
        keep[-1] = False
    return dirs[keep]


def unit_ball(body: ConvexBody, p, n_directions: int = DEFAULT_DIRECTIONS) -> UnitBallPolygon:
    p = _require_ball_point(body, p)
    if isinstance(body, Polygon):
        dirs = _polygon_critical_directions(body, p)
        F = finsler_norm_batch(body, p, dirs)
        return UnitBallPolygon(dirs / F[:, None], exact=True)
    if n_directions < 16 or n_directions % 2:
        raise ValueError("n_directions must be an even integer >= 16")
    th = 2 * np.pi * np.arange(n_directions) / n_directions
    dirs = np.stack([np.cos(th), np.sin(th)], axis=1)
    F = finsler_norm_batch(body, p, dirs)
    return UnitBallPolygon(dirs / F[:, None], exact=False, n_directions=n_directions)


# ---------------------------------------------------------------------------
# Ball areas and the Hilbert density
# ---------------------------------------------------------------------------


def _polygon_ball_areas(body: Polygon, P) -> np.ndarray:
    """Exact ball areas at many points of a polygon at once."""
    V = body.vertices
    out = np.empty(len(P))
    chunk = max(1, 40000 // (len(V) ** 2))
    for s in range(0, len(P), chunk):
        p = P[s : s + chunk]
        u = V[None, :, :] - p[:, None, :]
        dirs = np.concatenate([u, -u], axis=1)
        ang = np.arctan2(dirs[..., 1], dirs[..., 0])
        order = np.argsort(ang, axis=1)
        dirs = np.take_along_axis(dirs, order[..., None], axis=1)
        m, k = dirs.shape[:2]
        flat = dirs.reshape(-1, 2)
        pp = np.repeat(p, k, axis=0)
        tp, tm = _exits(body, pp, flat)
        F = 0.5 * (1.0 / tp + 1.0 / tm)
        ball = (flat / F[:, None]).reshape(m, k, 2)
        out[s : s + chunk] = 0.5 * cross2(ball, np.roll(ball, -1, axis=1)).sum(axis=1)
    return out


def _ellipse_density(body: Ellipse, P) -> np.ndarray:
    y = body.normalized(P)
    s = 1.0 - (y * y).sum(-1)
    return s**-1.5 / (body.semi_major * body.semi_minor)


def _smooth_ball_areas(body: SmoothBody, P, rel_tol: float = 1e-9, n_max: int = 1024):
    """Ball areas by the periodic trapezoid rule in a whitened polar frame.

    A quadratic form fitted to ``F^2`` along three directions turns each ball
    into a near-disk.  Because ``F(-v) = F(v)`` only half a turn of chord
    directions is sampled.  The number of directions is doubled per point
    (reusing earlier samples) until two successive levels agree to
    ``rel_tol``.  Returns ``(areas, errors)``.
    """
    P = np.asarray(P, dtype=float).reshape(-1, 2)
    m = len(P)
    fit = np.array([0.0, np.pi / 3, 2 * np.pi / 3])
    fd = np.stack([np.cos(fit), np.sin(fit)], axis=1)
    F2 = finsler_norm_batch(body, P[:, None, :], fd[None, :, :]) ** 2
    # F^2(e_j) = Q11 c^2 + 2 Q12 c s + Q22 s^2
    A = np.stack([fd[:, 0] ** 2, 2 * fd[:, 0] * fd[:, 1], fd[:, 1] ** 2], axis=1)
    coef = F2 @ np.linalg.inv(A).T
    Q = np.empty((m, 2, 2))
    Q[:, 0, 0] = coef[:, 0]
    Q[:, 0, 1] = Q[:, 1, 0] = coef[:, 1]
    Q[:, 1, 1] = coef[:, 2]
    evals, evecs = np.linalg.eigh(Q)
    ok = evals.min(axis=1) > 0
    evals = np.where(ok[:, None], evals, 1.0)
    evecs = np.where(ok[:, None, None], evecs, np.eye(2))
    L = evecs @ (evecs.transpose(0, 2, 1) / np.sqrt(evals)[:, :, None])
    detL = 1.0 / np.sqrt(evals.prod(axis=1))

    def inv_sq_sum(idx, th):
        w = np.stack([np.cos(th), np.sin(th)], axis=1)
        dirs = np.einsum("mij,kj->mki", L[idx], w)
        F = finsler_norm_batch(body, P[idx][:, None, :], dirs)
        return (F**-2).sum(axis=1)

    k = 8
    total = inv_sq_sum(np.arange(m), np.pi * np.arange(k) / k)
    area = detL * total * np.pi / k
    err = np.full(m, np.inf)
    prev = np.full(m, np.inf)
    active = np.arange(m)
    while len(active) and 2 * k <= n_max // 2:
        th = np.pi * (2 * np.arange(k) + 1) / (2 * k)
        total[active] += inv_sq_sum(active, th)
        k *= 2
        new = detL[active] * total[active] * np.pi / k
        diff = np.abs(new - area[active])
        # two agreeing refinements in a row guard against chance agreement
        err[active] = np.maximum(diff, prev[active])
        prev[active] = diff
        area[active] = new
        active = active[err[active] > rel_tol * new]
    return area, err


def ball_area(body: ConvexBody, p):
    """Area of the Finsler unit ball at ``p`` and an error estimate."""
    p = _require_ball_point(body, p)
    if isinstance(body, Polygon):
        return float(_polygon_ball_areas(body, p[None])[0]), 0.0
    if isinstance(body, Ellipse):
        return float(np.pi / _ellipse_density(body, p[None])[0]), 0.0
    a, e = _smooth_ball_areas(body, p[None])
    return float(a[0]), float(e[0])


def ball_area_batch(body: ConvexBody, P, rel_tol: float = 1e-9) -> np.ndarray:
    """Ball areas at many points; ``rel_tol`` only affects sampled balls."""
    P = np.asarray(P, dtype=float).reshape(-1, 2)
    if isinstance(body, Polygon):
        return _polygon_ball_areas(body, P)
    if isinstance(body, Ellipse):
        return np.pi / _ellipse_density(body, P)
    return _smooth_ball_areas(body, P, rel_tol=rel_tol)[0]


def density(body: ConvexBody, p) -> float:
    """Hilbert area density ``pi / vol(B(p))`` at an interior point."""
    area, _ = ball_area(body, p)
    return math.pi / area


def density_batch(body: ConvexBody, P, rel_tol: float = 1e-9) -> np.ndarray:
    """Vectorized density without interior checks, used by the integrators."""
    P = np.asarray(P, dtype=float).reshape(-1, 2)
    if isinstance(body, Ellipse):
        return _ellipse_density(body, P)
    return np.pi / ball_area_batch(body, P, rel_tol=rel_tol)
