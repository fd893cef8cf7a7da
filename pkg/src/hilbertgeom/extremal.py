"""
Extremal ellipses and the geometric estimates behind the area bounds.

* :func:`john_ellipse` and :func:`loewner_ellipse` solve the maximal
  inscribed and minimal enclosing ellipse problems for polygons with a
  log-barrier Newton method.
* :func:`dichotomy_witnesses` builds the small and large ideal triangles
  from their contact points, which separate ellipses from other bodies.
* :func:`support_triangle_case` classifies the triangle cut out by the
  support lines at the vertices of an ideal triangle.
* :func:`ideal_area_upper_bound` produces the per-body upper bound on ideal triangle
  areas together with its ingredients.
* The ``*_check`` helpers evaluate the elementary circle and chord
  inequalities used to prove that bound.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    BodyIsEllipse,
    DegenerateDirection,
    NoIntersection,
    PreconditionViolated,
    RectangleNotInside,
    SolverDidNotConverge,
    UnsupportedRepresentation,
)
from .measure import (
    AreaResult,
    IdealTriangle,
    ProbeResult,
    QuadratureOptions,
    Verdict,
    compact_core_area,
    corner_divergence_probe,
    ideal_triangle_area,
)
from .planar_convex import (
    ConvexBody,
    Ellipse,
    Polygon,
    SmoothBody,
    SupportBody,
    _ellipse_from_shape,
    _unit,
    as_point,
    cross2,
    homography_point,
    rolling_radii,
    support_lines_at,
)

# ---------------------------------------------------------------------------
# Barrier Newton solver
# ---------------------------------------------------------------------------


def _logdet3(beta):
    """log det of the symmetric matrix ``[[b0, b1], [b1, b2]]`` with derivatives."""
    b0, b1, b2 = beta
    D = b0 * b2 - b1 * b1
    g = np.array([b2, -2 * b1, b0])
    H = np.array([[0.0, 0, 1], [0, -2, 0], [1, 0, 0]])
    return math.log(D), g / D, H / D - np.outer(g, g) / D**2


def _barrier_newton(x0, constraints, gap_tol=1e-11, max_iter=2000):
    """Maximize ``log det`` of the first three parameters under ``s_i(x) > 0``.

    ``constraints(x)`` returns ``(s, grad, hess)`` with shapes ``(m,)``,
    ``(m, n)``, ``(m, n, n)``; ``s`` must be concave in ``x``.  The barrier
    weight grows until the duality gap bound ``m / tau`` drops below
    ``gap_tol``.  Steps use the damped Newton rule for self-concordant
    barriers, so no function values need to be compared.
    """
    x = np.array(x0, dtype=float)
    m = len(constraints(x)[0])

    def feasible(x):
        if x[0] <= 0 or x[0] * x[2] - x[1] ** 2 <= 0:
            return False
        return bool(np.all(constraints(x)[0] > 0))

    if not feasible(x):
        raise SolverDidNotConverge("starting point is not strictly feasible")
    tau = 1.0
    iters = 0
    while True:
        for _ in range(60):
            iters += 1
            if iters > max_iter:
                raise SolverDidNotConverge("barrier Newton iterations exhausted")
            _, gl, Hl = _logdet3(x[:3])
            s, gs, Hs = constraints(x)
            grad = -gs.T @ (1.0 / s)
            grad[:3] -= tau * gl
            hess = np.einsum("mi,mj,m->ij", gs, gs, 1.0 / s**2) - np.einsum("mij,m->ij", Hs, 1.0 / s)
            hess[:3, :3] -= tau * Hl
            step = -np.linalg.solve(hess, grad)
            dec = float(-grad @ step)
            if not dec > 1e-16:
                break
            h = 1.0 if dec < 0.25 else 1.0 / (1.0 + math.sqrt(dec))
            while not feasible(x + h * step):
                h *= 0.5
                if h < 1e-12:
                    raise SolverDidNotConverge("lost feasibility")
            x = x + h * step
        if m / tau < gap_tol:
            return x
        tau *= 8.0


# ---------------------------------------------------------------------------
# John and Loewner ellipses
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EllipseWithContacts:
    ellipse: Ellipse
    contacts: np.ndarray

    def to_json(self):
        e = self.ellipse
        return {
            "center": e.center.tolist(),
            "semi_major": e.semi_major,
            "semi_minor": e.semi_minor,
            "rotation": e.rotation,
            "area": e.area,
            "contacts": self.contacts.tolist(),
        }


def _normalizing(points):
    c = points.mean(axis=0)
    s = float(np.linalg.norm(points - c, axis=1).max())
    return c, s


def _sym(beta):
    return np.array([[beta[0], beta[1]], [beta[1], beta[2]]])


def _ellipse_self_contacts(body: Ellipse, k: int = 8) -> EllipseWithContacts:
    th = 2 * np.pi * np.arange(k) / k
    return EllipseWithContacts(body, body.center + _unit(th) @ body.shape_matrix.T)


def _dedupe(points, tol):
    out = []
    for p in points:
        if all(np.linalg.norm(p - q) > tol for q in out):
            out.append(p)
    return np.array(out)


def john_ellipse(body: ConvexBody) -> EllipseWithContacts:
    """Maximal-area ellipse inside a polygon, with its contact points."""
    if isinstance(body, Ellipse):
        return _ellipse_self_contacts(body)
    if not isinstance(body, Polygon):
        raise UnsupportedRepresentation("john_ellipse expects a polygon")
    c0, scale = _normalizing(body.vertices)
    N = body.normals
    off = (body.offsets - N @ c0) / scale
    # B n = J beta with beta = (b11, b12, b22)
    J = np.zeros((len(N), 2, 3))
    J[:, 0, 0] = N[:, 0]
    J[:, 0, 1] = N[:, 1]
    J[:, 1, 1] = N[:, 0]
    J[:, 1, 2] = N[:, 1]

    def constraints(x):
        beta, d = x[:3], x[3:]
        w = J @ beta
        g = np.linalg.norm(w, axis=1)
        s = off - N @ d - g
        grad = np.zeros((len(N), 5))
        grad[:, :3] = -np.einsum("mki,mk->mi", J, w) / g[:, None]
        grad[:, 3:] = -N
        P = np.eye(2)[None] / g[:, None, None] - np.einsum("mi,mj->mij", w, w) / g[:, None, None] ** 3
        hess = np.zeros((len(N), 5, 5))
        hess[:, :3, :3] = -np.einsum("mki,mkl,mlj->mij", J, P, J)
        return s, grad, hess

    r0 = 0.5 * float(off.min())
    x = _barrier_newton(np.array([r0, 0.0, r0, 0.0, 0.0]), constraints)
    B = _sym(x[:3]) * scale
    d = c0 + x[3:] * scale
    ell = _ellipse_from_shape(d, B)
    # tangency point on each edge: d + B^2 n / |B n|
    Bn = N @ B
    pts = d + (Bn @ B) / np.linalg.norm(Bn, axis=1)[:, None]
    gap = np.abs(body.signed_distance(pts))
    slack = body.offsets - N @ d - np.linalg.norm(Bn, axis=1)
    touch = slack <= body.eps_geom
    contacts = _dedupe(pts[touch & (gap <= body.eps_geom)], body.eps_geom)
    if len(contacts) < 3:
        raise SolverDidNotConverge("fewer than three contact points found")
    return EllipseWithContacts(ell, contacts)


def loewner_ellipse(body: ConvexBody, points=None) -> EllipseWithContacts:
    """Minimal-area ellipse containing a polygon (or a finite point set)."""
    if isinstance(body, Ellipse) and points is None:
        return _ellipse_self_contacts(body)
    if points is None:
        if not isinstance(body, Polygon):
            raise UnsupportedRepresentation("loewner_ellipse expects a polygon")
        points = body.vertices
    V = np.asarray(points, dtype=float)
    c0, scale = _normalizing(V)
    U = (V - c0) / scale
    # ellipse {x : |A x + b| <= 1}; A v + b = M theta with theta = (a11, a12, a22, b1, b2)
    M = np.zeros((len(U), 2, 5))
    M[:, 0, 0] = U[:, 0]
    M[:, 0, 1] = U[:, 1]
    M[:, 1, 1] = U[:, 0]
    M[:, 1, 2] = U[:, 1]
    M[:, 0, 3] = 1.0
    M[:, 1, 4] = 1.0
    MtM = np.einsum("mki,mkj->mij", M, M)

    def constraints(x):
        w = M @ x
        s = 1.0 - (w * w).sum(axis=1)
        grad = -2 * np.einsum("mki,mk->mi", M, w)
        return s, grad, -2 * MtM

    x = _barrier_newton(np.array([0.5, 0.0, 0.5, 0.0, 0.0]), constraints)
    A = _sym(x[:3]) / scale
    B = np.linalg.inv(A)
    center = c0 - scale * np.linalg.solve(_sym(x[:3]), x[3:])
    ell = _ellipse_from_shape(center, B)
    r = np.linalg.norm((V - center) @ A.T, axis=1)
    eps = 1e-9 * 2 * ell.semi_major
    gap = (1 - r) * ell.semi_minor
    contacts = _dedupe(V[gap <= eps], eps)
    if len(contacts) < 2:
        raise SolverDidNotConverge("fewer than two contact points found")
    return EllipseWithContacts(ell, contacts)


# ---------------------------------------------------------------------------
# Ellipse dichotomy witnesses
# ---------------------------------------------------------------------------


def _largest_triangle(points) -> np.ndarray:
    best, best_area = None, -1.0
    for i, j, k in itertools.combinations(range(len(points)), 3):
        a = 0.5 * abs(float(cross2(points[j] - points[i], points[k] - points[i])))
        if a > best_area + 1e-12:
            best, best_area = (i, j, k), a
    return np.asarray(points)[list(best)]


def _radial_to_boundary(body: ConvexBody, center, pts):
    u = pts - center
    t = body.ray_exit(np.broadcast_to(center, u.shape), u)
    return center + t[:, None] * u


def _smooth_contacts(body: SmoothBody, n: int = 720):
    """Contacts of the extremal ellipses of a smooth body via inscribed polygons."""
    th = np.linspace(0, 2 * np.pi, n, endpoint=False)
    pts = body.boundary_point(th)
    inner = john_ellipse(Polygon(pts))
    john = EllipseWithContacts(inner.ellipse, _radial_to_boundary(body, inner.ellipse.center, inner.contacts))
    return john, loewner_ellipse(body, pts)


@dataclass(frozen=True)
class DichotomyWitnesses:
    inner_triangle: IdealTriangle
    inner_area: AreaResult
    outer_triangle: IdealTriangle
    outer_area: AreaResult
    divergence: Optional[ProbeResult] = None

    @property
    def inner_margin(self) -> float:
        return math.pi - self.inner_area.value

    @property
    def outer_margin(self) -> float:
        if self.divergence is not None:
            return max(self.divergence.areas) - math.pi
        return self.outer_area.value - math.pi

    def to_json(self):
        out = {
            "inner_triangle": self.inner_triangle.to_json(),
            "inner_area": self.inner_area.to_json(),
            "inner_margin": self.inner_margin,
            "outer_triangle": self.outer_triangle.to_json(),
            "outer_area": self.outer_area.to_json(),
            "outer_margin": self.outer_margin,
        }
        if self.divergence is not None:
            out["divergence"] = self.divergence.to_json()
        return out


def _flat_sides(body: ConvexBody, V):
    if not isinstance(body, Polygon):
        return []
    tol = 10 * body.eps_geom
    out = []
    for i in range(3):
        P, Q = V[i], V[(i + 1) % 3]
        on = (np.abs(body.normals @ P - body.offsets) <= tol) & (np.abs(body.normals @ Q - body.offsets) <= tol)
        if np.any(on):
            out.append(i)
    return out


def _flat_side_certificate(body: Polygon, V, side, opts) -> ProbeResult:
    """Areas of nested bands inside the triangle near a boundary edge, pushed
    towards the edge until they exceed ``pi``."""
    P, Q = V[side], V[(side + 1) % 3]
    omega = 0.5 * (P + Q)
    p = V.mean(axis=0)
    ts = [0.9, 0.99, 0.999]
    while True:
        probe = corner_divergence_probe(body, omega, p, truncations=ts, opts=opts)
        if probe.areas[-1] > math.pi or len(ts) >= 12:
            return probe
        ts.append(1 - (1 - ts[-1]) / 10)


def dichotomy_witnesses(body: ConvexBody, opts: Optional[QuadratureOptions] = None, tol: float = 1e-3) -> DichotomyWitnesses:
    """Ideal triangles from the John and Loewner contacts.

    The triangle on John contact points has area below ``pi`` and the one on
    Loewner contact points area above ``pi`` (or a divergent area, certified
    by bands whose areas exceed ``pi``) unless the body is an ellipse, in
    which case :class:`BodyIsEllipse` is raised.
    """
    opts = opts or QuadratureOptions(rel_tol=1e-6)
    if isinstance(body, Polygon):
        john, loew = john_ellipse(body), loewner_ellipse(body)
    elif isinstance(body, Ellipse):
        john = loew = _ellipse_self_contacts(body, 3)
    elif isinstance(body, SupportBody):
        john, loew = _smooth_contacts(body)
    else:
        raise UnsupportedRepresentation(type(body).__name__)
    Ti = IdealTriangle.from_points(body, *_largest_triangle(john.contacts))
    Te = IdealTriangle.from_points(body, *_largest_triangle(loew.contacts))
    ai = ideal_triangle_area(body, Ti, opts)
    flat = _flat_sides(body, Te.vertices)
    probe = None
    if flat:
        probe = _flat_side_certificate(body, Te.vertices, flat[0], opts)
        ae = AreaResult(math.inf, math.inf, Verdict.DIVERGENT, 0, probe.areas)
    else:
        ae = ideal_triangle_area(body, Te, opts)
    if ai.converged and ae.converged and abs(ai.value - math.pi) <= tol * math.pi and abs(ae.value - math.pi) <= tol * math.pi:
        raise BodyIsEllipse("both extremal triangles have area pi", (ai.value, ae.value))
    return DichotomyWitnesses(Ti, ai, Te, ae, probe)


# ---------------------------------------------------------------------------
# Support triangle classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SupportTriangleCase:
    case: str  # "I", "II" or "III"
    normals: np.ndarray
    offsets: np.ndarray
    triangle: Optional[np.ndarray]  # corners of the support triangle (case I)
    homography: Optional[np.ndarray] = None
    image_triangle: Optional[np.ndarray] = None
    verified: bool = True

    def to_json(self):
        def arr(x):
            return None if x is None else np.asarray(x).tolist()

        return {
            "case": self.case,
            "normals": arr(self.normals),
            "offsets": arr(self.offsets),
            "triangle": arr(self.triangle),
            "homography": arr(self.homography),
            "image_triangle": arr(self.image_triangle),
            "verified": self.verified,
        }


def _support_line(body: ConvexBody, x):
    cone = support_lines_at(body, x)
    n = cone.bisector() if cone.is_corner else cone.normals[0]
    return n, float(n @ x)


def _line_meet(l1, l2):
    p = np.cross(l1, l2)
    return p[:2] / p[2]


def _bounded_triangle(lines):
    """Corners of the triangle ``{l_i . (x, 1) <= 0}`` if it is bounded."""
    n = lines[:, :2]
    w = np.array([cross2(n[1], n[2]), cross2(n[2], n[0]), cross2(n[0], n[1])])
    if not (np.all(w > 0) or np.all(w < 0)):
        return None
    return np.stack([_line_meet(lines[1], lines[2]), _line_meet(lines[2], lines[0]), _line_meet(lines[0], lines[1])])


def _contains_samples(lines, pts, tol):
    hom = np.column_stack([pts, np.ones(len(pts))])
    vals = hom @ lines.T / np.linalg.norm(lines[:, :2], axis=1)
    return bool(np.all(vals <= tol))


def support_triangle_case(body: ConvexBody, tri) -> SupportTriangleCase:
    """Classify the three support lines at the vertices of an ideal triangle.

    Case I: the lines bound a triangle containing the body.  Case II: two of
    the lines are parallel.  Case III: the lines bound a triangle that misses
    part of the body, or an unbounded region.  In cases II and III a
    homography sending to infinity a line that misses the body (positive on
    the signed corners of the projective triangle cut out by the lines) is
    built so that the image configuration is of case I; the result is
    checked on boundary samples.
    """
    if not isinstance(tri, IdealTriangle):
        tri = IdealTriangle.from_points(body, *tri)
    V = tri.vertices
    ln = [_support_line(body, x) for x in V]
    N = np.array([n for n, _ in ln])
    O = np.array([o for _, o in ln])
    lines = np.column_stack([N, -O])
    samples = body.boundary_samples(512)
    diam = body.diameter
    tol = 1e-9 * diam

    par = [
        (i, j)
        for i, j in itertools.combinations(range(3), 2)
        if abs(cross2(N[i], N[j])) <= 1e-9 and N[i] @ N[j] < 0
    ]
    corners = _bounded_triangle(lines)
    if not par and corners is not None:
        return SupportTriangleCase("I", N, O, corners)
    case = "II" if par else "III"

    # The body lies in a closed projective triangle bounded by the three
    # lines.  A line positive on its three (signed) corners misses it, and
    # sending that line to infinity makes the image triangle bounded.
    C = np.stack([np.cross(lines[1], lines[2]), np.cross(lines[2], lines[0]), np.cross(lines[0], lines[1])])
    sgn = np.einsum("ij,ij->i", lines, C)
    if np.all(np.abs(sgn) > 1e-12 * np.abs(C).max()):
        C = C * -np.sign(sgn)[:, None]
        aux = np.linalg.solve(C, np.ones(3))
        aux = aux / np.linalg.norm(aux)
        # complete aux to an invertible matrix with an orthonormal pair
        basis = np.linalg.svd(aux[None])[2][1:]
        H = np.vstack([basis, aux])
        w = samples @ H[2, :2] + H[2, 2]
        if np.all(w > 0):
            img_lines = lines @ np.linalg.inv(H)
            img_pts = homography_point(H, samples)
            img_corners = _bounded_triangle(img_lines)
            if img_corners is not None and _contains_samples(
                img_lines, img_pts, tol * max(1.0, np.abs(img_pts).max())
            ):
                return SupportTriangleCase(case, N, O, None, H, img_corners, True)
    return SupportTriangleCase(case, N, O, None, None, None, False)


# ---------------------------------------------------------------------------
# Per-body upper bound
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundCertificate:
    r: float
    R: float
    delta: float
    core_area: float
    core_error: float
    n_cap: int
    bound: float

    def to_json(self):
        return {
            "r": self.r,
            "R": self.R,
            "delta": self.delta,
            "core_area": self.core_area,
            "core_error": self.core_error,
            "n_cap": self.n_cap,
            "bound": self.bound,
        }


def ideal_area_upper_bound(body: ConvexBody, opts: Optional[QuadratureOptions] = None) -> BoundCertificate:
    """Upper bound ``2 pi (floor(2R/r) + 1) + mu(K_delta)`` with ``delta = r^3 / (4 R^2)``."""
    if not isinstance(body, SmoothBody):
        raise UnsupportedRepresentation("the bound needs a strictly convex C2 body")
    opts = opts or QuadratureOptions(rel_tol=1e-6)
    rr = rolling_radii(body)
    r, R = rr.r, rr.R
    delta = r**3 / (4 * R**2)
    n_cap = math.floor(2 * R / r)
    core = compact_core_area(body, delta, opts)
    bound = 2 * math.pi * (n_cap + 1) + core.value
    return BoundCertificate(r, R, delta, core.value, core.error, n_cap, bound)


# ---------------------------------------------------------------------------
# Chord and circle estimates
# ---------------------------------------------------------------------------


def _circle_chord(center, radius, m, u):
    """Chord of the circle cut by the line through ``m`` with unit direction ``u``."""
    off = float(cross2(u, center - m))
    disc = radius * radius - off * off
    if disc < 0:
        raise DegenerateDirection("the line misses the circle")
    return 2.0 * math.sqrt(disc)


def circle_chords_check(rho: float, rho_prime: float, m, v) -> dict:
    """Chords of two circles tangent at the origin, both centered on the y axis.

    The circles have radii ``rho < rho_prime`` and centers ``(0, rho)`` and
    ``(0, rho_prime)``.  For a line through ``m`` (on the segment from the
    origin to ``(0, rho)``) the chord of the small circle is at least
    ``rho / rho_prime`` times the chord of the large one.  When ``m`` is the
    origin, the second intersection ``q`` with the small circle also keeps
    a clearance ``(rho' - rho) / (2 rho rho') |q|^2`` from the large circle.
    """
    if not 0 < rho < rho_prime:
        raise PreconditionViolated("need 0 < rho < rho_prime")
    m = as_point(m)
    v = as_point(v)
    nv = float(np.linalg.norm(v))
    if nv == 0 or not math.isfinite(nv):
        raise DegenerateDirection("direction must be a nonzero vector")
    u = v / nv
    if abs(m[0]) > 0 or not 0 <= m[1] <= rho:
        raise PreconditionViolated("m must lie on the segment from 0 to (0, rho)")
    c, cp = np.array([0.0, rho]), np.array([0.0, rho_prime])
    d_pq = _circle_chord(c, rho, m, u)
    d_pq_prime = _circle_chord(cp, rho_prime, m, u)
    out = {
        "d_pq": d_pq,
        "d_pq_prime": d_pq_prime,
        "slack": d_pq - rho / rho_prime * d_pq_prime,
    }
    if m[1] == 0.0:
        # second intersection of the line through the origin with the small circle
        q = 2 * rho * u[1] * u
        dq = float(np.linalg.norm(q))
        clearance = rho_prime - float(np.linalg.norm(q - cp))
        tangency = (rho_prime - rho) / (2 * rho * rho_prime) * dq * dq
        out["q"] = q.tolist()
        out["clearance"] = clearance
        out["tangency_bound"] = tangency
        out["tangency_slack"] = clearance - tangency
    out["holds"] = bool(out["slack"] >= -1e-12 and out.get("tangency_slack", 0.0) >= -1e-12)
    return out


def half_chord_height_check(r: float, h: float) -> dict:
    """Distance from the top of a circle of radius ``r`` (center ``c``) to the
    point at height ``h`` above the chord of width ``2 alpha <= r``."""
    if not (r > 0 and 0 <= h <= r):
        raise PreconditionViolated("need r > 0 and 0 <= h <= r")
    alpha = math.sqrt(max(r * r - (r - h) ** 2, 0.0))
    if 2 * alpha > r * (1 + 1e-12):
        raise PreconditionViolated("the chord is longer than r")
    d = math.hypot(alpha, h)
    return {"alpha": alpha, "d_cq_prime": d, "slack": 0.75 * r - d, "holds": bool(d <= 0.75 * r + 1e-12)}


def _inward_normal(body: ConvexBody, a):
    cone = support_lines_at(body, a)
    n = cone.bisector() if cone.is_corner else cone.normals[0]
    return -n


def chord_clearance_check(body: ConvexBody, a, b, radii=None) -> dict:
    """Clearance of the point where the chord ``]a, b[`` meets the inner
    circle of radius ``r`` tangent at ``a``."""
    if not isinstance(body, SmoothBody):
        raise UnsupportedRepresentation("needs a strictly convex C2 body")
    rr = radii or rolling_radii(body)
    a, b = as_point(a), as_point(b)
    ab = b - a
    L = float(np.linalg.norm(ab))
    if L == 0:
        raise PreconditionViolated("a and b must be distinct")
    u = ab / L
    n_in = _inward_normal(body, a)
    t = 2 * rr.r * float(u @ n_in)
    if not 0 < t < L:
        raise NoIntersection("the chord does not meet the inner tangent circle")
    ap = a + t * u
    clearance = float(body.signed_distance(ap[None])[0])
    bound = rr.r / (4 * rr.R**2) * L * L
    return {
        "a_prime": ap.tolist(),
        "clearance": clearance,
        "bound": bound,
        "slack": clearance - bound,
        "holds": bool(clearance - bound >= -1e-12),
    }


@dataclass(frozen=True)
class RectangleCheck:
    rect: np.ndarray
    area: AreaResult
    cap: float
    holds: bool

    def to_json(self):
        return {"rect": self.rect.tolist(), "area": self.area.to_json(), "cap": self.cap, "holds": self.holds}


def rectangle_cap_check(body: ConvexBody, a, b, opts: Optional[QuadratureOptions] = None, radii=None) -> RectangleCheck:
    """Hilbert area of the rectangle of base ``]a, b[`` and height ``r``.

    The rectangle is erected on the side of the chord where the far corners
    have the larger clearance.  Its area is compared with
    ``2 pi floor(2R / r)``.
    """
    if not isinstance(body, SmoothBody):
        raise UnsupportedRepresentation("needs a strictly convex C2 body")
    opts = opts or QuadratureOptions(rel_tol=1e-5)
    rr = radii or rolling_radii(body)
    a, b = as_point(a), as_point(b)
    ab = b - a
    L = float(np.linalg.norm(ab))
    if L == 0:
        raise PreconditionViolated("a and b must be distinct")
    if L > rr.r * (1 + 1e-12):
        raise PreconditionViolated("the chord must not be longer than r")
    perp = np.array([-ab[1], ab[0]]) / L
    best = None
    for sgn in (1.0, -1.0):
        p, q = b + sgn * rr.r * perp, a + sgn * rr.r * perp
        clear = float(body.signed_distance(np.stack([p, q])).min())
        if best is None or clear > best[0]:
            best = (clear, p, q)
    clear, p, q = best
    if clear <= body.eps_geom:
        raise RectangleNotInside("the rectangle on the chord does not fit in the body")
    rect = np.stack([a, b, p, q])
    r1 = ideal_triangle_area(body, (a, b, p), opts)
    r2 = ideal_triangle_area(body, (a, p, q), opts)
    if r1.converged and r2.converged:
        area = AreaResult(r1.value + r2.value, r1.error + r2.error, Verdict.CONVERGED, r1.cells + r2.cells)
    else:
        area = AreaResult(r1.value + r2.value, math.inf, Verdict.INCONCLUSIVE, r1.cells + r2.cells)
    cap = 2 * math.pi * math.floor(2 * rr.R / rr.r)
    return RectangleCheck(rect, area, cap, bool(area.value <= cap + area.error))


# ---------------------------------------------------------------------------
# Bodies pinched between two squares
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PinchedSquareCase:
    t: float
    body: Polygon
    triangle: IdealTriangle
    area: AreaResult
    lower_bound: float

    def to_json(self):
        return {
            "t": self.t,
            "body": self.body.to_json(),
            "triangle": self.triangle.to_json(),
            "area": self.area.to_json(),
            "lower_bound": self.lower_bound,
        }


def band_lower_bound(s: float, t: float, x0: float) -> float:
    """Lower bound for the Hilbert area, in the square ``(-1, 1)^2``, of the
    band between heights ``s`` and ``t`` under the top edge piece ``|x| < x0``."""
    return math.pi / 2 * math.atanh(s * x0) * (math.atanh(t) - math.atanh(s))


def octagon_between_squares(t: float) -> Polygon:
    """The square ``(-1, 1)^2`` with its corners cut at parameter ``t``."""
    return Polygon(
        [[1, -t], [1, t], [t, 1], [-t, 1], [-1, t], [-1, -t], [-t, -1], [t, -1]]
    )


def pinched_octagon_case(t: float, opts: Optional[QuadratureOptions] = None) -> PinchedSquareCase:
    """Octagon with ``tS`` inside it and inside ``S``, and the ideal triangle
    cut by the rays from the origin to ``(-1, 1)``, ``(1, 1)``, ``(0, -1)``."""
    if not 0.5 < t < 1:
        raise PreconditionViolated("t must lie in (1/2, 1)")
    opts = opts or QuadratureOptions(rel_tol=1e-5)
    body = octagon_between_squares(t)
    dirs = np.array([[-1.0, 1.0], [1.0, 1.0], [0.0, -1.0]])
    ts = body.ray_exit(np.zeros((3, 2)), dirs)
    verts = ts[:, None] * dirs
    tri = IdealTriangle.from_points(body, *verts)
    area = ideal_triangle_area(body, tri, opts)
    return PinchedSquareCase(t, body, tri, area, band_lower_bound(0.5, t, 1.0))
