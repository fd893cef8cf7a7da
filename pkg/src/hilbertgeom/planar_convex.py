"""
Planar convex bodies and the geometric primitives built on them.

Three representations are supported:

* :class:`Polygon`      strictly convex, counterclockwise vertex list
* :class:`Ellipse`      center, semi-axes and rotation
* :class:`SupportBody`  smooth strictly convex body given by samples of its
                        support function ``h(theta)``

All bodies are immutable. Every batch primitive (ray exits, boundary
distances) is vectorized over leading array axes.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from ._kernels import fourier_ray_exits
from .errors import (
    ImageUnbounded,
    InvalidBody,
    NotOnBoundary,
    PointNotInterior,
    SingularMap,
    UnsupportedRepresentation,
    ZeroDirection,
)

GEOM_REL_EPS = 1e-9
_CHUNK = 1 << 14


def as_point(p) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.shape != (2,) or not np.all(np.isfinite(arr)):
        raise ValueError(f"expected a finite 2-vector, got {p!r}")
    return arr


def cross2(u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def _unit(theta):
    theta = np.asarray(theta, dtype=float)
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1)


def _unit_perp(theta):
    theta = np.asarray(theta, dtype=float)
    return np.stack([-np.sin(theta), np.cos(theta)], axis=-1)


def orientation(a, b, c) -> int:
    """Sign of the turn a -> b -> c, exact for double inputs.

    A floating-point filter is tried first; near-degenerate cases are
    re-evaluated with rational arithmetic.
    """
    ax, ay = float(a[0]), float(a[1])
    bx, by = float(b[0]), float(b[1])
    cx, cy = float(c[0]), float(c[1])
    l = (bx - ax) * (cy - ay)
    r = (by - ay) * (cx - ax)
    det = l - r
    bound = 4.0 * np.finfo(float).eps * (abs(l) + abs(r))
    if det > bound:
        return 1
    if det < -bound:
        return -1
    A = [Fraction(ax), Fraction(ay)]
    B = [Fraction(bx), Fraction(by)]
    C = [Fraction(cx), Fraction(cy)]
    exact = (B[0] - A[0]) * (C[1] - A[1]) - (B[1] - A[1]) * (C[0] - A[0])
    return (exact > 0) - (exact < 0)


def cross_ratio(a, p, q, b) -> float:
    """[a, p, q, b] = (|q-a| / |p-a|) * (|p-b| / |q-b|)."""
    a, p, q, b = (np.asarray(x, dtype=float) for x in (a, p, q, b))
    return (
        np.linalg.norm(q - a)
        / np.linalg.norm(p - a)
        * np.linalg.norm(p - b)
        / np.linalg.norm(q - b)
    )


class Location(enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    EXTERIOR = "exterior"


@dataclass(frozen=True)
class Chord:
    p_minus: np.ndarray
    p_plus: np.ndarray

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.p_plus - self.p_minus))


@dataclass(frozen=True)
class RollingRadii:
    r: float
    R: float


@dataclass(frozen=True)
class NormalCone:
    """Outward unit normals of the support lines at a boundary point.

    ``normals`` holds one normal for a smooth point and the two extreme
    normals (in counterclockwise order) at a polygon corner.
    """

    point: np.ndarray
    normals: np.ndarray

    @property
    def is_corner(self) -> bool:
        return len(self.normals) > 1

    def bisector(self) -> np.ndarray:
        n = self.normals.sum(axis=0)
        return n / np.linalg.norm(n)

    def lines(self):
        """Each support line as ``(normal, offset)`` with ``normal . x = offset``."""
        return [(n, float(n @ self.point)) for n in self.normals]


# ---------------------------------------------------------------------------
# Bodies
# ---------------------------------------------------------------------------


class ConvexBody:
    """Common interface of the three representations."""

    kind: str = "abstract"

    # subclasses provide: ray_exit, signed_distance, diameter, center,
    # boundary_samples, to_json

    @property
    def eps_geom(self) -> float:
        return GEOM_REL_EPS * self.diameter

    def ray_exit(self, points, dirs) -> np.ndarray:
        """Distance ``t > 0`` with ``p + t v`` on the boundary (interior ``p``)."""
        raise NotImplementedError

    def signed_distance(self, points) -> np.ndarray:
        """Euclidean distance to the boundary, positive inside, negative outside."""
        raise NotImplementedError

    def boundary_samples(self, n: int) -> np.ndarray:
        raise NotImplementedError

    def is_interior(self, p) -> bool:
        return bool(self.signed_distance(as_point(p)[None])[0] > self.eps_geom)

    def require_interior(self, points, what="point"):
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        d = self.signed_distance(pts)
        if np.any(~(d > self.eps_geom)):
            raise PointNotInterior(f"{what} is not strictly inside the body")


@dataclass(frozen=True, eq=False)
class Polygon(ConvexBody):
    vertices: np.ndarray
    normals: np.ndarray = field(init=False, repr=False)
    offsets: np.ndarray = field(init=False, repr=False)

    kind = "polygon"

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise InvalidBody("a polygon needs at least three 2D vertices")
        if not np.all(np.isfinite(v)):
            raise InvalidBody("polygon vertices must be finite")
        k = len(v)
        for i in range(k):
            if orientation(v[i - 1], v[i], v[(i + 1) % k]) <= 0:
                raise InvalidBody(
                    "vertices must be strictly convex and counterclockwise "
                    f"(failed at vertex {i})"
                )
        # a strictly convex turn sequence can still wind twice
        ang = np.arctan2(*(np.roll(v, -1, 0) - v)[:, ::-1].T)
        turn = np.mod(np.diff(np.append(ang, ang[0])), 2 * np.pi).sum()
        if abs(turn - 2 * np.pi) > 1e-6:
            raise InvalidBody("polygon winds more than once")
        v.setflags(write=False)
        edges = np.roll(v, -1, axis=0) - v
        lengths = np.linalg.norm(edges, axis=1)
        normals = np.stack([edges[:, 1], -edges[:, 0]], axis=1) / lengths[:, None]
        offsets = np.einsum("ij,ij->i", normals, v)
        normals.setflags(write=False)
        offsets.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "normals", normals)
        object.__setattr__(self, "offsets", offsets)

    @property
    def diameter(self) -> float:
        d = self.vertices[:, None, :] - self.vertices[None, :, :]
        return float(np.sqrt((d**2).sum(-1)).max())

    @property
    def center(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    @property
    def area(self) -> float:
        v = self.vertices
        return 0.5 * float(cross2(v, np.roll(v, -1, axis=0)).sum())

    def edge(self, i):
        k = len(self.vertices)
        return self.vertices[i % k], self.vertices[(i + 1) % k]

    def ray_exit(self, points, dirs):
        p = np.asarray(points, dtype=float)
        v = np.asarray(dirs, dtype=float)
        slack = self.offsets - p @ self.normals.T
        rate = v @ self.normals.T
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(rate > 0, slack / rate, np.inf)
        return t.min(axis=-1)

    def signed_distance(self, points):
        p = np.asarray(points, dtype=float)
        slack = self.offsets - p @ self.normals.T
        inside = slack.min(axis=-1)
        if np.all(inside >= 0):
            return inside
        # outside: true Euclidean distance to the polygon
        out = np.full(inside.shape, np.inf)
        for i in range(len(self.vertices)):
            a, b = self.edge(i)
            ab = b - a
            s = np.clip(((p - a) @ ab) / (ab @ ab), 0.0, 1.0)
            proj = a + s[..., None] * ab
            out = np.minimum(out, np.linalg.norm(p - proj, axis=-1))
        return np.where(inside >= 0, inside, -out)

    def boundary_samples(self, n: int) -> np.ndarray:
        per = np.linspace(0, 1, max(2, n // len(self.vertices)), endpoint=False)
        out = []
        for i in range(len(self.vertices)):
            a, b = self.edge(i)
            out.append(a + per[:, None] * (b - a))
        return np.concatenate(out)

    def locate_boundary(self, b, tol=None):
        """Return ``("vertex", i)`` or ``("edge", i)`` for a boundary point."""
        b = as_point(b)
        tol = self.eps_geom if tol is None else tol
        dv = np.linalg.norm(self.vertices - b, axis=1)
        i = int(np.argmin(dv))
        if dv[i] <= tol:
            return "vertex", i
        for i in range(len(self.vertices)):
            a, c = self.edge(i)
            ac = c - a
            s = (b - a) @ ac / (ac @ ac)
            if 0 < s < 1 and abs(self.normals[i] @ b - self.offsets[i]) <= tol:
                return "edge", i
        raise NotOnBoundary(f"point {b.tolist()} is not on the polygon boundary")

    def to_json(self):
        return {"kind": "polygon", "vertices": self.vertices.tolist()}


class SmoothBody(ConvexBody):
    """A strictly convex body with C2 boundary described by its support function.

    Points of the boundary are parametrized by the angle ``theta`` of the
    outward normal: ``x(theta) = h n + h' n_perp`` and the radius of
    curvature there is ``h + h''``.
    """

    def support(self, theta, deriv=0):
        return self.support_derivs(theta, deriv)[deriv]

    def support_derivs(self, theta, nd):
        """Array of shape ``(nd + 1,) + theta.shape`` with h, h', ..."""
        raise NotImplementedError

    def boundary_point(self, theta):
        h = self.support_derivs(theta, 1)
        return h[0][..., None] * _unit(theta) + h[1][..., None] * _unit_perp(theta)

    def curvature_radius(self, theta):
        h = self.support_derivs(theta, 2)
        return h[0] + h[2]

    @property
    def diameter(self) -> float:
        th = np.linspace(0, np.pi, 2048, endpoint=False)
        return float((self.support(th) + self.support(th + np.pi)).max())

    def boundary_samples(self, n: int) -> np.ndarray:
        return self.boundary_point(np.linspace(0, 2 * np.pi, n, endpoint=False))

    def ray_exit(self, points, dirs):
        return self.ray_exit_with_angle(points, dirs)[0]

    def ray_exit_with_angle(self, points, dirs):
        p = np.asarray(points, dtype=float)
        v = np.asarray(dirs, dtype=float)
        p, v = np.broadcast_arrays(p, v)
        shape = p.shape[:-1]
        p = p.reshape(-1, 2)
        v = v.reshape(-1, 2)
        t = np.empty(len(p))
        th = np.empty(len(p))
        for s in range(0, len(p), _CHUNK):
            t[s : s + _CHUNK], th[s : s + _CHUNK] = self._exit_chunk(
                p[s : s + _CHUNK], v[s : s + _CHUNK]
            )
        return t.reshape(shape), th.reshape(shape)

    def _exit_chunk(self, p, v):
        # g(theta) = cross(v, x(theta) - p) increases monotonically from < 0
        # to > 0 over the half circle of normals facing v; its root is the
        # normal angle of the exit point.
        vn = np.linalg.norm(v, axis=1)
        vh = v / vn[:, None]
        phi = np.arctan2(vh[:, 1], vh[:, 0])
        lo = phi - 0.5 * np.pi
        hi = phi + 0.5 * np.pi
        th = phi.copy()
        active = np.arange(len(p))
        for _ in range(100):
            t_a = th[active]
            h0, h1, h2 = self.support_derivs(t_a, 2)
            c, s = np.cos(t_a), np.sin(t_a)
            x = h0 * c - h1 * s
            y = h0 * s + h1 * c
            va, pa = vh[active], p[active]
            g = va[:, 0] * (y - pa[:, 1]) - va[:, 1] * (x - pa[:, 0])
            dg = (h0 + h2) * (va[:, 0] * c + va[:, 1] * s)
            pos = g > 0
            hi[active] = np.where(pos, t_a, hi[active])
            lo[active] = np.where(pos, lo[active], t_a)
            with np.errstate(divide="ignore", invalid="ignore"):
                new = t_a - g / dg
            l, u = lo[active], hi[active]
            bad = ~((new >= l) & (new <= u))
            new = np.where(bad, 0.5 * (l + u), new)
            scale = np.abs(x) + np.abs(y) + np.abs(pa).sum(axis=1)
            done = (
                (np.abs(new - t_a) <= 4e-16 * (1 + np.abs(t_a)))
                | (np.abs(g) <= 4e-16 * scale)
                | (u - l <= 4e-16 * (1 + np.abs(t_a)))
            )
            th[active] = new
            active = active[~done]
            if not len(active):
                break
        n = _unit(th)
        h0 = self.support(th)
        # stationary in theta, so small angle errors enter only quadratically
        t = (h0 - np.einsum("ij,ij->i", p, n)) / np.einsum("ij,ij->i", vh, n)
        return t / vn, th

    def signed_distance(self, points):
        p = np.asarray(points, dtype=float)
        shape = p.shape[:-1]
        p = p.reshape(-1, 2)
        grid = np.linspace(0, 2 * np.pi, 1024, endpoint=False)
        hg = self.support(grid)
        ng = _unit(grid)
        out = np.empty(len(p))
        for s in range(0, len(p), 2048):
            pc = p[s : s + 2048]
            vals = hg[None, :] - pc @ ng.T
            th = grid[np.argmin(vals, axis=1)]
            for _ in range(30):
                h = self.support_derivs(th, 2)
                c, sn = np.cos(th), np.sin(th)
                d1 = h[1] - (-pc[:, 0] * sn + pc[:, 1] * c)
                d2 = h[2] + (pc[:, 0] * c + pc[:, 1] * sn)
                step = np.where(d2 > 0, d1 / np.where(d2 > 0, d2, 1.0), 0.0)
                step = np.clip(step, -0.01, 0.01)
                th = th - step
                if np.abs(step).max() < 1e-14:
                    break
            n = _unit(th)
            out[s : s + 2048] = np.minimum(
                self.support(th) - np.einsum("ij,ij->i", pc, n), vals.min(axis=1)
            )
        return out.reshape(shape)

    def normal_angle_at(self, b) -> float:
        b = as_point(b)
        d = b - self.center
        if np.linalg.norm(d) == 0:
            raise NotOnBoundary("the reference center is not a boundary point")
        t, th = self.ray_exit_with_angle(self.center[None], d[None])
        if abs(t[0] - 1.0) * np.linalg.norm(d) > 1e3 * self.eps_geom:
            raise NotOnBoundary(f"point {b.tolist()} is not on the boundary")
        return float(np.mod(th[0], 2 * np.pi))


@dataclass(frozen=True, eq=False)
class Ellipse(SmoothBody):
    center: np.ndarray
    semi_major: float
    semi_minor: float
    rotation: float = 0.0

    kind = "ellipse"

    def __post_init__(self):
        c = np.array(self.center, dtype=float)
        if c.shape != (2,) or not np.all(np.isfinite(c)):
            raise InvalidBody("ellipse center must be a finite 2-vector")
        a, b = float(self.semi_major), float(self.semi_minor)
        if not (a >= b > 0) or not math.isfinite(a):
            raise InvalidBody("need semi_major >= semi_minor > 0")
        c.setflags(write=False)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "semi_major", a)
        object.__setattr__(self, "semi_minor", b)
        object.__setattr__(self, "rotation", float(self.rotation))

    @property
    def axes(self):
        ct, st = math.cos(self.rotation), math.sin(self.rotation)
        return np.array([ct, st]), np.array([-st, ct])

    @property
    def shape_matrix(self) -> np.ndarray:
        """``B`` with the ellipse equal to ``{center + B u : |u| <= 1}``."""
        u, w = self.axes
        return np.column_stack([self.semi_major * u, self.semi_minor * w])

    @property
    def normalizer(self) -> np.ndarray:
        """Linear map taking ``x - center`` to unit-disk coordinates."""
        u, w = self.axes
        return np.vstack([u / self.semi_major, w / self.semi_minor])

    @property
    def diameter(self) -> float:
        return 2.0 * self.semi_major

    @property
    def area(self) -> float:
        return math.pi * self.semi_major * self.semi_minor

    def normalized(self, points):
        p = np.asarray(points, dtype=float)
        return (p - self.center) @ self.normalizer.T

    def ray_exit(self, points, dirs):
        M = self.normalizer
        y = self.normalized(points)
        w = np.asarray(dirs, dtype=float) @ M.T
        A = (w * w).sum(-1)
        B = (y * w).sum(-1)
        C = 1.0 - (y * y).sum(-1)
        D = np.sqrt(B * B + A * C)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(B >= 0, C / (B + D), (D - B) / A)

    def signed_distance(self, points):
        return SmoothBody.signed_distance(self, points)

    def support_derivs(self, theta, nd):
        th = np.asarray(theta, dtype=float)
        a2, b2 = self.semi_major**2, self.semi_minor**2
        phi = th - self.rotation
        q = 0.5 * (a2 + b2) + 0.5 * (a2 - b2) * np.cos(2 * phi)
        s = np.sqrt(q)
        c, sn = np.cos(th), np.sin(th)
        cx, cy = self.center
        out = [cx * c + cy * sn + s]
        if nd >= 1:
            q1 = -(a2 - b2) * np.sin(2 * phi)
            s1 = q1 / (2 * s)
            out.append(-cx * sn + cy * c + s1)
        if nd >= 2:
            q2 = -2 * (a2 - b2) * np.cos(2 * phi)
            s2 = q2 / (2 * s) - q1 * q1 / (4 * s**3)
            out.append(-(cx * c + cy * sn) + s2)
        if nd >= 3:
            raise NotImplementedError("third derivative not needed for ellipses")
        return np.stack(out)

    def curvature_radius(self, theta):
        phi = np.asarray(theta, dtype=float) - self.rotation
        a2, b2 = self.semi_major**2, self.semi_minor**2
        q = a2 * np.cos(phi) ** 2 + b2 * np.sin(phi) ** 2
        return a2 * b2 / q**1.5

    def normal_angle_at(self, b) -> float:
        y = self.normalized(as_point(b))
        if abs(np.linalg.norm(y) - 1.0) * self.semi_minor > 1e3 * self.eps_geom:
            raise NotOnBoundary(f"point {list(b)} is not on the ellipse")
        g = self.normalizer.T @ y
        return float(np.mod(np.arctan2(g[1], g[0]), 2 * np.pi))

    def to_json(self):
        return {
            "kind": "ellipse",
            "center": self.center.tolist(),
            "a": self.semi_major,
            "b": self.semi_minor,
            "rotation": self.rotation,
        }


@dataclass(frozen=True, eq=False)
class SupportBody(SmoothBody):
    """Body given by ``N >= 512`` uniform samples of its support function.

    ``h`` and its derivatives are evaluated by trigonometric interpolation of
    the samples; modes below round-off are discarded.
    """

    samples: np.ndarray
    _coef: np.ndarray = field(init=False, repr=False)

    kind = "support"
    MIN_SAMPLES = 512

    def __post_init__(self):
        h = np.array(self.samples, dtype=float).ravel()
        n = len(h)
        if n < self.MIN_SAMPLES:
            raise InvalidBody(f"need at least {self.MIN_SAMPLES} support samples")
        if not np.all(np.isfinite(h)):
            raise InvalidBody("support samples must be finite")
        f = np.fft.rfft(h) / n
        kmax = (n - 1) // 2
        coef = np.zeros((kmax + 1, 2))
        coef[0, 0] = f[0].real
        coef[1:, 0] = 2 * f[1 : kmax + 1].real
        coef[1:, 1] = -2 * f[1 : kmax + 1].imag
        mag = np.abs(coef).max(axis=1)
        keep = np.nonzero(mag > 1e-15 * max(mag.max(), 1.0))[0]
        coef = coef[: keep.max() + 1]
        h.setflags(write=False)
        coef.setflags(write=False)
        object.__setattr__(self, "samples", h)
        object.__setattr__(self, "_coef", coef)
        grid = np.linspace(0, 2 * np.pi, 4 * n, endpoint=False)
        rho = self.curvature_radius(grid)
        if rho.min() <= 10 * self.eps_geom:
            raise InvalidBody("h + h'' must stay positive (strict convexity)")

    @classmethod
    def from_function(cls, h: Callable[[np.ndarray], np.ndarray], n: int = 512):
        th = np.linspace(0, 2 * np.pi, n, endpoint=False)
        return cls(np.asarray(h(th), dtype=float))

    @property
    def n_modes(self) -> int:
        return len(self._coef)

    @property
    def center(self) -> np.ndarray:
        # Steiner point: always interior for a strictly convex body
        return np.array([self._coef[1, 0], self._coef[1, 1]]) if self.n_modes > 1 else np.zeros(2)

    def ray_exit_with_angle(self, points, dirs, offset: float = 0.0):
        """Compiled ray exits; ``offset`` shrinks the support function by a constant."""
        p = np.asarray(points, dtype=float)
        v = np.asarray(dirs, dtype=float)
        p, v = np.broadcast_arrays(p, v)
        shape = p.shape[:-1]
        a = np.ascontiguousarray(self._coef[:, 0]).copy()
        a[0] -= offset
        b = np.ascontiguousarray(self._coef[:, 1])
        t, th = fourier_ray_exits(
            np.ascontiguousarray(p.reshape(-1, 2)), np.ascontiguousarray(v.reshape(-1, 2)), a, b
        )
        return t.reshape(shape), th.reshape(shape)

    def support_derivs(self, theta, nd):
        th = np.asarray(theta, dtype=float)
        k = np.arange(self.n_modes, dtype=float)
        kt = th[..., None] * k
        c, s = np.cos(kt), np.sin(kt)
        a, b = self._coef[:, 0], self._coef[:, 1]
        out = []
        for d in range(nd + 1):
            kd = k**d
            # d/dtheta cycles (cos, sin) -> (-sin, cos) -> (-cos, -sin) -> ...
            m = d % 4
            if m == 0:
                val = c @ (kd * a) + s @ (kd * b)
            elif m == 1:
                val = -s @ (kd * a) + c @ (kd * b)
            elif m == 2:
                val = -c @ (kd * a) - s @ (kd * b)
            else:
                val = s @ (kd * a) - c @ (kd * b)
            out.append(val)
        return np.stack(out)

    def to_json(self):
        return {"kind": "support", "samples": self.samples.tolist()}


# ---------------------------------------------------------------------------
# Body-level operations
# ---------------------------------------------------------------------------


def contains(body: ConvexBody, p) -> Location:
    p = as_point(p)
    if isinstance(body, Polygon):
        v = body.vertices
        k = len(v)
        signs = [orientation(v[i], v[(i + 1) % k], p) for i in range(k)]
        if min(signs) < 0:
            return Location.EXTERIOR
        if min(signs) == 0:
            return Location.BOUNDARY
        return Location.INTERIOR
    d = float(body.signed_distance(p[None])[0])
    if d > body.eps_geom:
        return Location.INTERIOR
    if d < -body.eps_geom:
        return Location.EXTERIOR
    return Location.BOUNDARY


def chord_endpoints(body: ConvexBody, p, v) -> Chord:
    p = as_point(p)
    v = as_point(v)
    if not np.any(v):
        raise ZeroDirection("direction vector must be nonzero")
    body.require_interior(p)
    t = body.ray_exit(np.stack([p, p]), np.stack([v, -v]))
    return Chord(p - t[1] * v, p + t[0] * v)


def support_lines_at(body: ConvexBody, b) -> NormalCone:
    b = as_point(b)
    if isinstance(body, Polygon):
        kind, i = body.locate_boundary(b)
        if kind == "edge":
            return NormalCone(b, body.normals[i : i + 1].copy())
        k = len(body.vertices)
        return NormalCone(b, np.stack([body.normals[(i - 1) % k], body.normals[i]]))
    th = body.normal_angle_at(b)
    return NormalCone(b, _unit(th)[None])


def curvature_radius(body: ConvexBody, boundary_param) -> np.ndarray | float:
    """Radius of curvature at the boundary point with outward normal angle
    ``boundary_param``."""
    if not isinstance(body, SmoothBody):
        raise UnsupportedRepresentation("curvature is undefined for polygons")
    out = body.curvature_radius(boundary_param)
    return float(out) if np.ndim(out) == 0 else out


def rolling_radii(body: ConvexBody) -> RollingRadii:
    """``r = min(rho) / 2`` and ``R = max(rho)`` from the curvature radii."""
    if isinstance(body, Ellipse):
        a, b = body.semi_major, body.semi_minor
        return RollingRadii(0.5 * b * b / a, a * a / b)
    if not isinstance(body, SupportBody):
        raise UnsupportedRepresentation("rolling radii need a C2 boundary")
    grid = np.linspace(0, 2 * np.pi, 8 * len(body.samples), endpoint=False)
    rho = body.curvature_radius(grid)
    ext = []
    for idx in (np.argmin(rho), np.argmax(rho)):
        th = np.array([grid[idx]])
        for _ in range(20):
            h = body.support_derivs(th, 4)
            d1, d2 = h[1] + h[3], h[2] + h[4]
            if d2[0] == 0:
                break
            step = np.clip(d1 / d2, -1e-2, 1e-2)
            th = th - step
            if abs(step[0]) < 1e-15:
                break
        ext.append(float(body.curvature_radius(th)[0]))
    lo = min(ext[0], float(rho.min()))
    hi = max(ext[1], float(rho.max()))
    return RollingRadii(0.5 * lo, hi)


# ---------------------------------------------------------------------------
# Maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AffineMap:
    matrix: np.ndarray
    offset: np.ndarray

    def __post_init__(self):
        A = np.array(self.matrix, dtype=float).reshape(2, 2)
        t = np.array(self.offset, dtype=float).reshape(2)
        A.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "matrix", A)
        object.__setattr__(self, "offset", t)

    @classmethod
    def identity(cls):
        return cls(np.eye(2), np.zeros(2))

    @classmethod
    def from_points(cls, src, dst):
        """The affine map sending three points ``src`` onto ``dst``."""
        src = np.asarray(src, dtype=float)
        dst = np.asarray(dst, dtype=float)
        S = np.column_stack([src[1] - src[0], src[2] - src[0]])
        D = np.column_stack([dst[1] - dst[0], dst[2] - dst[0]])
        if abs(np.linalg.det(S)) < 1e-300:
            raise SingularMap("source points are collinear")
        A = D @ np.linalg.inv(S)
        return cls(A, dst[0] - A @ src[0])

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.matrix))

    def __call__(self, p):
        return np.asarray(p, dtype=float) @ self.matrix.T + self.offset

    def inverse(self) -> "AffineMap":
        if abs(self.det) < 1e-14 * max(1.0, np.abs(self.matrix).max() ** 2):
            raise SingularMap("affine map is not invertible")
        Ai = np.linalg.inv(self.matrix)
        return AffineMap(Ai, -Ai @ self.offset)

    def compose(self, other: "AffineMap") -> "AffineMap":
        """``self o other``."""
        return AffineMap(self.matrix @ other.matrix, self.matrix @ other.offset + self.offset)

    def as_homography(self) -> np.ndarray:
        H = np.eye(3)
        H[:2, :2] = self.matrix
        H[:2, 2] = self.offset
        return H


def apply_affine(obj, amap: AffineMap):
    """Image of a body or of a point under an invertible affine map."""
    A = amap.matrix
    if abs(amap.det) < 1e-14 * max(1.0, np.abs(A).max() ** 2):
        raise SingularMap("affine map is not invertible")
    if not isinstance(obj, ConvexBody):
        return amap(obj)
    if isinstance(obj, Polygon):
        v = amap(obj.vertices)
        return Polygon(v if amap.det > 0 else v[::-1])
    if isinstance(obj, Ellipse):
        return _ellipse_from_shape(amap(obj.center), A @ obj.shape_matrix)
    if isinstance(obj, SupportBody):
        n = len(obj.samples)
        th = np.linspace(0, 2 * np.pi, n, endpoint=False)
        m = _unit(th) @ A  # rows are A^T n
        scale = np.linalg.norm(m, axis=1)
        back = np.arctan2(m[:, 1], m[:, 0])
        return SupportBody(amap.offset @ _unit(th).T + scale * obj.support(back))
    raise UnsupportedRepresentation(type(obj).__name__)


def _ellipse_from_shape(center, B) -> Ellipse:
    U, S, _ = np.linalg.svd(B)
    return Ellipse(center, float(S[0]), float(S[1]), float(math.atan2(U[1, 0], U[0, 0])))


def homography_point(H, p):
    p = np.asarray(p, dtype=float)
    h = p @ H[:2, :2].T + H[:2, 2]
    w = p @ H[2, :2] + H[2, 2]
    return h / w[..., None]


def apply_homography(body: ConvexBody, H) -> ConvexBody:
    """Image of a polygon or ellipse under a projective map of the plane.

    The closed body must stay on one side of the line sent to infinity.
    """
    H = np.asarray(H, dtype=float)
    if H.shape != (3, 3) or abs(np.linalg.det(H)) < 1e-300:
        raise SingularMap("homography must be an invertible 3x3 matrix")
    line = H[2]
    if isinstance(body, Polygon):
        w = body.vertices @ line[:2] + line[2]
        scale = np.abs(w).max()
        if not (np.all(w > 1e-12 * scale) or np.all(w < -1e-12 * scale)):
            raise ImageUnbounded("the body meets the line sent to infinity")
        v = homography_point(H, body.vertices)
        if cross2(v, np.roll(v, -1, axis=0)).sum() < 0:
            v = v[::-1]
        return Polygon(v)
    if isinstance(body, Ellipse):
        B = body.shape_matrix
        mid = line[:2] @ body.center + line[2]
        spread = np.linalg.norm(B.T @ line[:2])
        if abs(mid) <= spread * (1 + 1e-12):
            raise ImageUnbounded("the ellipse meets the line sent to infinity")
        Sinv = np.linalg.inv(B @ B.T)
        c = body.center
        Q = np.zeros((3, 3))
        Q[:2, :2] = Sinv
        Q[:2, 2] = Q[2, :2] = -Sinv @ c
        Q[2, 2] = c @ Sinv @ c - 1.0
        Hi = np.linalg.inv(H)
        Q2 = Hi.T @ Q @ Hi
        S2 = Q2[:2, :2]
        if np.linalg.det(S2) <= 0:
            raise ImageUnbounded("image conic is not an ellipse")
        if S2[0, 0] < 0:
            Q2, S2 = -Q2, -S2
        c2 = -np.linalg.solve(S2, Q2[:2, 2])
        k = c2 @ S2 @ c2 - Q2[2, 2]
        evals, evecs = np.linalg.eigh(S2 / k)
        axes = 1.0 / np.sqrt(evals)
        return _ellipse_from_shape(c2, evecs * axes[None, :])
    raise UnsupportedRepresentation("homographies act on polygons and ellipses only")


def line_to_infinity_homography(normal, offset, inside_point) -> np.ndarray:
    """A homography sending the line ``normal . x = offset`` to infinity.

    ``inside_point`` (off the line) is kept at finite distance with positive
    weight.
    """
    n = np.asarray(normal, dtype=float)
    ell = np.array([n[0], n[1], -float(offset)])
    if ell[:2] @ np.asarray(inside_point) + ell[2] < 0:
        ell = -ell
    H = np.eye(3)
    H[2] = ell
    return H


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def body_from_json(d: dict) -> ConvexBody:
    kind = d.get("kind")
    if kind == "polygon":
        return Polygon(np.asarray(d["vertices"], dtype=float))
    if kind == "ellipse":
        return Ellipse(d["center"], d["a"], d["b"], d.get("rotation", 0.0))
    if kind == "support":
        return SupportBody(np.asarray(d["samples"], dtype=float))
    raise InvalidBody(f"unknown body kind {kind!r}")


def load_body(path) -> ConvexBody:
    with open(path) as fh:
        return body_from_json(json.load(fh))


def dump_body(body: ConvexBody, path):
    with open(path, "w") as fh:
        json.dump(body.to_json(), fh)


# ---------------------------------------------------------------------------
# Stock bodies
# ---------------------------------------------------------------------------


def unit_square() -> Polygon:
    return Polygon([[-1, -1], [1, -1], [1, 1], [-1, 1]])


def standard_triangle() -> Polygon:
    return Polygon([[0, 0], [1, 0], [0, 1]])


def unit_disk() -> Ellipse:
    return Ellipse([0.0, 0.0], 1.0, 1.0, 0.0)


def regular_polygon(k: int, radius: float = 1.0, phase: float = 0.0) -> Polygon:
    th = phase + 2 * np.pi * np.arange(k) / k
    return Polygon(radius * _unit(th))


def random_convex_polygon(rng: np.random.Generator, k: int, radius: float = 1.0) -> Polygon:
    """Vertices at sorted random angles on a circle, with a minimal gap."""
    while True:
        th = np.sort(rng.uniform(0, 2 * np.pi, k))
        gaps = np.diff(np.append(th, th[0] + 2 * np.pi))
        if gaps.min() > 0.3 / k and gaps.max() < np.pi * 0.9:
            r = radius * rng.uniform(0.8, 1.0, k)
            try:
                return Polygon(r[:, None] * _unit(th))
            except InvalidBody:
                continue
