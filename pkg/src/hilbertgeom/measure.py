"""
Hilbert area of regions and ideal triangles.

The density blows up at the boundary, so an ideal triangle is cut into six
fan pieces, two per vertex, and each piece is mapped by
``x = a + s^2 ((1 - u) (P - a) + u (Q - a))`` with ``a`` the vertex.  The
square in ``s`` turns the vertex singularity of a smooth or flat boundary
point into a bounded integrand.  The ``s`` axis is cut into dyadic layers
whose contributions decay geometrically; the tail is summed from the
observed decay ratio.  A ratio that stays near 1 means the layers keep
adding a fixed amount, which is the signature of a divergent area.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .cubature import fan_triangles, integrate_triangles, rectangle_triangles
from .errors import (
    DegenerateTriangle,
    DeltaTooLarge,
    NotACornerOrFlat,
    RegionNotInside,
    TriangleNotInside,
    UnsupportedRepresentation,
)
from .hilbert_core import density_batch
from .planar_convex import (
    ConvexBody,
    Polygon,
    SmoothBody,
    SupportBody,
    as_point,
    cross2,
    support_lines_at,
)


class Verdict(str, enum.Enum):
    CONVERGED = "Converged"
    DIVERGENT = "Divergent"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self):
        return self.value


class VertexFlag(str, enum.Enum):
    INTERIOR = "Interior"
    SMOOTH = "BoundarySmooth"
    CORNER = "BoundaryCorner"
    FLAT_EDGE = "BoundaryFlatEdge"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class QuadratureOptions:
    rel_tol: float = 1e-6
    abs_tol: float = 1e-9
    max_cells: int = 1 << 20
    divergence_cap: float = 1e4

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "max_cells", "divergence_cap"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def density_tol(self) -> float:
        """Relative accuracy requested from sampled unit-ball areas."""
        return float(np.clip(0.1 * self.rel_tol, 1e-10, 1e-5))


@dataclass(frozen=True)
class AreaResult:
    value: float
    error: float
    verdict: Verdict
    cells: int
    truncations: tuple = ()

    @property
    def converged(self) -> bool:
        return self.verdict == Verdict.CONVERGED

    def to_json(self):
        def num(x):
            return "inf" if math.isinf(x) else x

        return {
            "value": num(self.value),
            "error": num(self.error),
            "verdict": str(self.verdict),
            "cells": self.cells,
        }


# ---------------------------------------------------------------------------
# Regions
# ---------------------------------------------------------------------------


def _density_fn(body: ConvexBody, opts: QuadratureOptions):
    tol = opts.density_tol
    return lambda P: density_batch(body, P, rel_tol=tol)


def _region_vertices(region) -> np.ndarray:
    if isinstance(region, Polygon):
        return region.vertices
    v = np.asarray(region, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
        raise ValueError("a region is a convex polygon given by >= 3 vertices")
    if cross2(v, np.roll(v, -1, axis=0)).sum() < 0:
        v = v[::-1]
    return v


def region_area(body: ConvexBody, region, opts: Optional[QuadratureOptions] = None) -> AreaResult:
    """Hilbert area of a convex polygon lying strictly inside ``body``."""
    opts = opts or QuadratureOptions()
    v = _region_vertices(region)
    if np.any(~(body.signed_distance(v) > body.eps_geom)):
        raise RegionNotInside("region vertices must be strictly inside the body")
    res = integrate_triangles(
        _density_fn(body, opts), fan_triangles(v), opts.abs_tol, opts.rel_tol, opts.max_cells
    )
    verdict = Verdict.CONVERGED if res.converged else Verdict.INCONCLUSIVE
    return AreaResult(res.value, res.error, verdict, res.cells)


# ---------------------------------------------------------------------------
# Ideal triangles
# ---------------------------------------------------------------------------


def _classify_vertex(body: ConvexBody, x) -> VertexFlag:
    d = float(body.signed_distance(x[None])[0])
    if d > body.eps_geom:
        return VertexFlag.INTERIOR
    if d < -body.eps_geom:
        raise TriangleNotInside(f"vertex {x.tolist()} lies outside the body")
    if isinstance(body, Polygon):
        kind, _ = body.locate_boundary(x, tol=10 * body.eps_geom)
        return VertexFlag.CORNER if kind == "vertex" else VertexFlag.FLAT_EDGE
    return VertexFlag.SMOOTH


@dataclass(frozen=True)
class IdealTriangle:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    flags: tuple

    @classmethod
    def from_points(cls, body: ConvexBody, a, b, c) -> "IdealTriangle":
        pts = [as_point(x) for x in (a, b, c)]
        area2 = cross2(pts[1] - pts[0], pts[2] - pts[0])
        if abs(area2) <= 1e-12 * body.diameter**2:
            raise DegenerateTriangle("triangle vertices are collinear")
        flags = tuple(_classify_vertex(body, x) for x in pts)
        tri = cls(pts[0], pts[1], pts[2], flags)
        tri._check_inside(body)
        return tri

    @property
    def vertices(self) -> np.ndarray:
        return np.stack([self.a, self.b, self.c])

    @property
    def euclidean_area(self) -> float:
        return 0.5 * abs(float(cross2(self.b - self.a, self.c - self.a)))

    def _check_inside(self, body: ConvexBody, n: int = 12):
        i, j = np.meshgrid(np.arange(1, n), np.arange(1, n), indexing="ij")
        keep = i + j < n
        w = np.stack([i[keep], j[keep], n - i[keep] - j[keep]], axis=1) / n
        pts = w @ self.vertices
        # midpoints of the sides as well: they must not leave the body
        mids = 0.5 * (self.vertices + np.roll(self.vertices, -1, axis=0))
        d = body.signed_distance(np.concatenate([pts, mids]))
        if np.any(d < -body.eps_geom):
            raise TriangleNotInside("the triangle is not contained in the body")

    def to_json(self):
        return {
            "vertices": self.vertices.tolist(),
            "flags": [str(f) for f in self.flags],
        }


def _flat_side(body: ConvexBody, P, Q) -> bool:
    """Whether the segment PQ lies in a straight piece of the boundary."""
    if not isinstance(body, Polygon):
        return False
    tol = 10 * body.eps_geom
    gap_p = np.abs(body.normals @ P - body.offsets)
    gap_q = np.abs(body.normals @ Q - body.offsets)
    return bool(np.any((gap_p <= tol) & (gap_q <= tol)))


@dataclass
class _LayerSeries:
    """Running analysis of dyadic layer contributions."""

    opts: QuadratureOptions
    values: List[float] = field(default_factory=list)
    errors: List[float] = field(default_factory=list)
    cells: int = 0

    def add(self, value, error, cells):
        self.values.append(value)
        self.errors.append(error)
        self.cells += cells

    @property
    def cumulative(self) -> float:
        return math.fsum(self.values)

    def ratios(self):
        v = self.values
        return [v[i] / v[i - 1] if v[i - 1] > 0 else math.inf for i in range(1, len(v))]

    def status(self, min_layers: int = 4):
        """``("converged", value, error)``, ``("divergent", ...)`` or ``None``."""
        cum = self.cumulative
        if cum > self.opts.divergence_cap:
            return "divergent", math.inf, math.inf
        r = self.ratios()
        if len(self.values) < min_layers or len(r) < 3:
            return None
        last = self.values[-1]
        rk, rp = r[-1], r[-2]
        if 0 <= rk < 0.8 and abs(rk - rp) < 0.05:
            tail = last * rk / (1 - rk)
            tail_err = abs(tail) * abs(rk - rp) / (1 - rk)
            err = math.fsum(self.errors) + tail_err
            if tail_err <= 0.3 * max(self.opts.abs_tol, self.opts.rel_tol * cum):
                return "converged", cum + tail, err
        recent = r[-4:]
        if len(recent) == 4 and all(0.85 <= x <= 1.15 for x in recent) and last > 0.01 * cum:
            return "divergent", math.inf, math.inf
        return None


def _vertex_fan_layers(body, a, P, G, Q, opts, density, max_layers):
    """Layered integral over the quadrilateral (a, P, G, Q) near vertex ``a``."""
    e = np.stack([P - a, G - a, Q - a])
    jac = np.abs([cross2(e[0], e[1]), cross2(e[1], e[2])])

    def f(pts):
        s = pts[:, 0]
        u = pts[:, 1]
        piece = (u > 1).astype(int)
        w = u - piece
        d = (1 - w)[:, None] * e[piece] + w[:, None] * e[piece + 1]
        x = a + (s * s)[:, None] * d
        return density(x) * 2 * s**3 * jac[piece]

    series = _LayerSeries(opts)
    layer_tol = opts.abs_tol / 100.0
    for k in range(max_layers):
        hi = 2.0**-k
        lo = hi / 2
        tris = np.concatenate([rectangle_triangles(lo, hi, 0, 1), rectangle_triangles(lo, hi, 1, 2)])
        res = integrate_triangles(f, tris, layer_tol, 0.1 * opts.rel_tol, opts.max_cells)
        series.add(res.value, res.error, res.cells)
        st = series.status()
        if st is not None:
            return st, series
    return ("inconclusive", series.cumulative, math.inf), series


def _shrinking_strips(body, verts, opts, density, max_layers=40):
    """Layers between homothetic copies of a triangle shrunk towards its centroid."""
    g = verts.mean(axis=0)

    def scaled(lam):
        return g + lam * (verts - g)

    series = _LayerSeries(opts)
    first = integrate_triangles(density, fan_triangles(scaled(0.5)), opts.abs_tol / 100, 0.1 * opts.rel_tol, opts.max_cells)
    series.add(first.value, first.error, first.cells)
    for k in range(1, max_layers):
        inner = scaled(1 - 2.0**-k)
        outer = scaled(1 - 2.0 ** -(k + 1))
        tris = []
        for i in range(3):
            j = (i + 1) % 3
            tris.append([inner[i], outer[i], outer[j]])
            tris.append([inner[i], outer[j], inner[j]])
        res = integrate_triangles(density, np.array(tris), opts.abs_tol / 100, 0.1 * opts.rel_tol, opts.max_cells)
        series.add(res.value, res.error, res.cells)
        st = series.status()
        if st is not None:
            return st, series
    return ("inconclusive", series.cumulative, math.inf), series


def _max_layers(body: ConvexBody) -> int:
    # keep s^2 well above the relative round-off of boundary computations
    return 20 if isinstance(body, SmoothBody) else 24


def ideal_triangle_area(body: ConvexBody, tri, opts: Optional[QuadratureOptions] = None) -> AreaResult:
    """Hilbert area of a triangle whose vertices may sit on the boundary."""
    opts = opts or QuadratureOptions()
    if not isinstance(tri, IdealTriangle):
        tri = IdealTriangle.from_points(body, *tri)
    density = _density_fn(body, opts)
    V = tri.vertices
    flat = any(_flat_side(body, V[i], V[(i + 1) % 3]) for i in range(3))
    if flat:
        (kind, value, err), series = _shrinking_strips(body, V, opts, density)
        parts = [(kind, value, err, series)]
    else:
        g = V.mean(axis=0)
        parts = []
        for i in range(3):
            a = V[i]
            m_next = 0.5 * (a + V[(i + 1) % 3])
            m_prev = 0.5 * (a + V[(i + 2) % 3])
            (kind, value, err), series = _vertex_fan_layers(
                body, a, m_next, g, m_prev, opts, density, _max_layers(body)
            )
            parts.append((kind, value, err, series))
            if kind == "divergent":
                break
    cells = sum(p[3].cells for p in parts)
    witness = tuple(np.cumsum([v for p in parts for v in p[3].values]).tolist())
    kinds = [p[0] for p in parts]
    if "divergent" in kinds:
        return AreaResult(math.inf, math.inf, Verdict.DIVERGENT, cells, witness)
    value = math.fsum(p[1] for p in parts)
    error = math.fsum(p[2] for p in parts)
    if "inconclusive" in kinds:
        return AreaResult(value, math.inf, Verdict.INCONCLUSIVE, cells, witness)
    return AreaResult(value, error, Verdict.CONVERGED, cells, witness)


# ---------------------------------------------------------------------------
# Divergence probes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProbeResult:
    kind: str
    truncations: tuple
    areas: tuple
    errors: tuple
    verdict: Verdict
    strip_areas: tuple

    def to_json(self):
        return {
            "kind": self.kind,
            "truncations": list(self.truncations),
            "areas": list(self.areas),
            "errors": list(self.errors),
            "verdict": str(self.verdict),
        }


def _probe_rays(body: ConvexBody, omega, p, q, x0):
    cone = support_lines_at(body, omega)
    if cone.is_corner:
        if q is None:
            raise ValueError("a corner probe needs two interior points p and q")
        return "corner", (p, omega), (q, omega)
    if not isinstance(body, Polygon):
        raise NotACornerOrFlat("the boundary is smooth and strictly convex at this point")
    kind, i = body.locate_boundary(omega)
    A, B = body.edge(i)
    half = min(np.linalg.norm(omega - A), np.linalg.norm(B - omega))
    direction = (B - A) / np.linalg.norm(B - A)
    a = omega - x0 * half * direction
    b = omega + x0 * half * direction
    return "flat", (p, a), (p, b)


def _band(ray1, ray2, s, t):
    (b1, t1), (b2, t2) = ray1, ray2
    m1s = (1 - s) * b1 + s * t1
    m2s = (1 - s) * b2 + s * t2
    m1t = (1 - t) * b1 + t * t1
    m2t = (1 - t) * b2 + t * t2
    return np.stack([m1s, m2s, m2t, m1t])


def corner_divergence_probe(
    body: ConvexBody,
    omega,
    p,
    q=None,
    truncations: Sequence[float] = (0.9, 0.99, 0.999),
    s: float = 0.5,
    x0: float = 0.5,
    opts: Optional[QuadratureOptions] = None,
    max_strips: int = 30,
) -> ProbeResult:
    """Areas of the truncated family between parameters ``s`` and ``t``.

    At a corner ``omega`` the family is the part of the triangle
    ``p omega q`` between the two segments at parameters ``s`` and ``t``
    on the rays towards ``omega``.  When ``omega`` is inside a straight
    boundary piece the rays run from ``p`` to the two points of that piece
    at relative offset ``x0`` on either side of ``omega``.
    """
    opts = opts or QuadratureOptions()
    omega = as_point(omega)
    p = as_point(p)
    q = None if q is None else as_point(q)
    body.require_interior(p if q is None else np.stack([p, q]))
    kind, r1, r2 = _probe_rays(body, omega, p, q, x0)
    density = _density_fn(body, opts)

    def band_area(lo, hi):
        if hi <= lo:
            return 0.0, 0.0, 0
        quad = _band(r1, r2, lo, hi)
        tris = fan_triangles(quad)
        res = integrate_triangles(density, tris, opts.abs_tol, opts.rel_tol, opts.max_cells)
        return res.value, res.error, res.cells

    areas, errors = [], []
    for t in truncations:
        if not s <= t < 1:
            raise ValueError("truncations must satisfy s <= t < 1")
        v, e, _ = band_area(s, t)
        areas.append(v)
        errors.append(e)

    series = _LayerSeries(opts)
    verdict = Verdict.INCONCLUSIVE
    for k in range(max_strips):
        lo = 1 - (1 - s) * 2.0**-k
        hi = 1 - (1 - s) * 2.0 ** -(k + 1)
        v, e, c = band_area(lo, hi)
        series.add(v, e, c)
        st = series.status()
        if st is not None:
            verdict = Verdict.DIVERGENT if st[0] == "divergent" else Verdict.CONVERGED
            break
    return ProbeResult(
        kind,
        tuple(float(t) for t in truncations),
        tuple(areas),
        tuple(errors),
        verdict,
        tuple(series.values),
    )


# ---------------------------------------------------------------------------
# Compact core
# ---------------------------------------------------------------------------


class _InnerParallelBody(SmoothBody):
    """The set of points at Euclidean clearance at least ``delta``."""

    kind = "inner-parallel"

    def __init__(self, body: SmoothBody, delta: float):
        self.body = body
        self.delta = delta
        self.center = body.center

    def support_derivs(self, theta, nd):
        h = self.body.support_derivs(theta, nd).copy()
        h[0] -= self.delta
        return h

    @property
    def diameter(self) -> float:
        return self.body.diameter - 2 * self.delta

    def ray_exit(self, points, dirs):
        if isinstance(self.body, SupportBody):
            return self.body.ray_exit_with_angle(points, dirs, offset=self.delta)[0]
        return SmoothBody.ray_exit(self, points, dirs)


def compact_core_area(body: ConvexBody, delta: float, opts: Optional[QuadratureOptions] = None) -> AreaResult:
    """Hilbert area of the points at Euclidean distance >= ``delta`` from the boundary.

    For ``delta`` below the minimal curvature radius the inner parallel body
    has support function ``h - delta``; it is integrated in polar
    coordinates about the body's reference center.
    """
    opts = opts or QuadratureOptions()
    if not isinstance(body, SmoothBody):
        raise UnsupportedRepresentation("the compact core needs a C2 boundary")
    if not delta >= 1e-6 * body.diameter:
        raise ValueError("delta must be at least 1e-6 times the diameter")
    grid = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
    rho_min = float(body.curvature_radius(grid).min())
    c = body.center
    clearance = float(body.signed_distance(c[None])[0])
    if delta >= rho_min or delta >= clearance:
        raise DeltaTooLarge(
            f"delta={delta} must stay below the minimal curvature radius "
            f"({rho_min:.6g}) and the clearance of the center ({clearance:.6g})"
        )
    core = _InnerParallelBody(body, delta)
    density = _density_fn(body, opts)

    def f(pts):
        lam = pts[:, 0]
        phi = pts[:, 1]
        u = np.stack([np.cos(phi), np.sin(phi)], axis=1)
        R = core.ray_exit(np.broadcast_to(c, u.shape), u)
        x = c + (lam * R)[:, None] * u
        return density(x) * lam * R * R

    breaks = [0.0] + [1 - 2.0**-k for k in range(1, 12)] + [1.0]
    sectors = np.linspace(0, 2 * np.pi, 9)
    tris = [
        rectangle_triangles(breaks[i], breaks[i + 1], sectors[j], sectors[j + 1])
        for i in range(len(breaks) - 1)
        for j in range(len(sectors) - 1)
    ]
    res = integrate_triangles(f, np.concatenate(tris), opts.abs_tol, opts.rel_tol, opts.max_cells)
    verdict = Verdict.CONVERGED if res.converged else Verdict.INCONCLUSIVE
    return AreaResult(res.value, res.error, verdict, res.cells)
