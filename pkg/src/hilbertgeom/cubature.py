"""
Adaptive cubature over triangles.

Each cell is integrated with a pair of collapsed (conical) Gauss product
rules: a 4x4 rule exact to degree 7 and a 3x3 rule exact to degree 5.  Their
difference is the cell error estimate.  The worst cells are bisected along
their longest edge until the global estimate meets the tolerance.  Cells
are processed in a fixed order and summed with ``math.fsum`` so results do
not depend on evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import roots_jacobi, roots_legendre


def _conical_rule(n: int):
    """Barycentric-free rule on the reference triangle (0,0), (1,0), (0,1).

    Returns points of shape (n*n, 2) and weights summing to 1/2.
    """
    xj, wj = roots_jacobi(n, 1.0, 0.0)  # weight (1 - x) on [-1, 1]
    xl, wl = roots_legendre(n)
    u = 0.5 * (1 + xj)
    wu = wj / 4.0  # (1-u) du = (1-x)/2 * dx/2
    w = 0.5 * (1 + xl)
    ww = wl / 2.0
    U, W = np.meshgrid(u, w, indexing="ij")
    pts = np.stack([U.ravel(), ((1 - U) * W).ravel()], axis=1)
    wts = np.outer(wu, ww).ravel()
    return pts, wts


_HI_PTS, _HI_WTS = _conical_rule(4)
_LO_PTS, _LO_WTS = _conical_rule(3)
_ALL_REF = np.concatenate([_HI_PTS, _LO_PTS])
_N_HI = len(_HI_PTS)


@dataclass(frozen=True)
class CubatureResult:
    value: float
    error: float
    cells: int
    converged: bool


def _eval_cells(f, tris):
    """Integrals with both rules over triangles of shape (m, 3, 2)."""
    a = tris[:, 0]
    e1 = tris[:, 1] - a
    e2 = tris[:, 2] - a
    jac = np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    pts = a[:, None, :] + _ALL_REF[None, :, 0:1] * e1[:, None, :] + _ALL_REF[None, :, 1:2] * e2[:, None, :]
    vals = np.asarray(f(pts.reshape(-1, 2)), dtype=float).reshape(len(tris), -1)
    hi = vals[:, :_N_HI] @ _HI_WTS * jac
    lo = vals[:, _N_HI:] @ _LO_WTS * jac
    return hi, np.abs(hi - lo)


def _bisect(tris):
    """Split each triangle at the midpoint of its longest edge."""
    d = np.stack(
        [
            np.linalg.norm(tris[:, 1] - tris[:, 2], axis=1),
            np.linalg.norm(tris[:, 2] - tris[:, 0], axis=1),
            np.linalg.norm(tris[:, 0] - tris[:, 1], axis=1),
        ],
        axis=1,
    )
    k = np.argmax(d, axis=1)
    idx = np.arange(len(tris))
    apex = tris[idx, k]
    b = tris[idx, (k + 1) % 3]
    c = tris[idx, (k + 2) % 3]
    mid = 0.5 * (b + c)
    left = np.stack([apex, b, mid], axis=1)
    right = np.stack([apex, mid, c], axis=1)
    return np.concatenate([left, right])


def integrate_triangles(
    f: Callable[[np.ndarray], np.ndarray],
    triangles,
    abs_tol: float = 1e-9,
    rel_tol: float = 1e-6,
    max_cells: int = 1 << 20,
) -> CubatureResult:
    """Integrate ``f`` (vectorized over (N, 2) points) over a union of triangles."""
    tris = np.asarray(triangles, dtype=float).reshape(-1, 3, 2)
    val, err = _eval_cells(f, tris)
    evaluated = len(tris)
    while True:
        total = math.fsum(val)
        total_err = math.fsum(err)
        tol = max(abs_tol, rel_tol * abs(total))
        if total_err <= tol or not np.isfinite(total_err):
            break
        if evaluated >= max_cells:
            break
        order = np.lexsort((np.arange(len(err)), -err))
        csum = np.cumsum(err[order])
        need = total_err - 0.5 * tol
        n_split = int(np.searchsorted(csum, need) + 1)
        n_split = max(1, min(n_split, len(order), 4096, (max_cells - evaluated) // 2))
        if n_split <= 0:
            break
        pick = np.sort(order[:n_split])
        keep = np.ones(len(tris), dtype=bool)
        keep[pick] = False
        children = _bisect(tris[pick])
        cval, cerr = _eval_cells(f, children)
        evaluated += len(children)
        tris = np.concatenate([tris[keep], children])
        val = np.concatenate([val[keep], cval])
        err = np.concatenate([err[keep], cerr])
    total = math.fsum(val)
    total_err = math.fsum(err)
    ok = bool(np.isfinite(total_err) and total_err <= max(abs_tol, rel_tol * abs(total)))
    return CubatureResult(total, total_err, evaluated, ok)


def rectangle_triangles(x0, x1, y0, y1):
    """Two triangles covering an axis-aligned rectangle."""
    return np.array(
        [
            [[x0, y0], [x1, y0], [x1, y1]],
            [[x0, y0], [x1, y1], [x0, y1]],
        ],
        dtype=float,
    )


def fan_triangles(polygon):
    """Fan triangulation of a convex polygon from its first vertex."""
    v = np.asarray(polygon, dtype=float)
    return np.stack([np.repeat(v[:1], len(v) - 2, axis=0), v[1:-1], v[2:]], axis=1)
