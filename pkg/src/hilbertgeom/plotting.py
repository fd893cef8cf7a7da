"""Static SVG figures of bodies with balls, ellipses and triangles drawn on top."""

from __future__ import annotations

import io
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .planar_convex import ConvexBody, Ellipse, Polygon, _unit  # noqa: E402

# fixed ids and no timestamp so identical input gives identical bytes
matplotlib.rcParams["svg.hashsalt"] = "hilbertgeom"
matplotlib.rcParams["svg.fonttype"] = "none"


def _outline(body: ConvexBody, n: int = 720) -> np.ndarray:
    if isinstance(body, Polygon):
        v = body.vertices
    elif isinstance(body, Ellipse):
        th = np.linspace(0, 2 * np.pi, n, endpoint=False)
        v = body.center + _unit(th) @ body.shape_matrix.T
    else:
        v = body.boundary_samples(n)
    return np.vstack([v, v[:1]])


def render_svg(
    body: ConvexBody,
    balls: Sequence = (),
    ellipses: Sequence = (),
    triangles: Sequence = (),
    points: Optional[np.ndarray] = None,
    title: Optional[str] = None,
) -> str:
    """SVG document with the body outline and optional overlays.

    ``balls`` are polygons (vertex arrays), ``ellipses`` are
    ``(Ellipse, contacts)`` pairs (contacts may be ``None``), ``triangles``
    are 3x2 vertex arrays.
    """
    fig, ax = plt.subplots(figsize=(5, 5))
    o = _outline(body)
    ax.plot(o[:, 0], o[:, 1], color="black", lw=1.5, label="body")
    for i, b in enumerate(balls):
        b = np.asarray(b)
        b = np.vstack([b, b[:1]])
        ax.plot(b[:, 0], b[:, 1], color="tab:blue", lw=1.0, label="unit ball" if i == 0 else None)
    colors = ["tab:green", "tab:red", "tab:purple"]
    for i, (e, contacts) in enumerate(ellipses):
        eo = _outline(e)
        c = colors[i % len(colors)]
        ax.plot(eo[:, 0], eo[:, 1], color=c, lw=1.0, label=f"ellipse {i + 1}")
        if contacts is not None and len(contacts):
            ax.plot(contacts[:, 0], contacts[:, 1], "o", color=c, ms=4)
    for i, t in enumerate(triangles):
        t = np.asarray(t)
        t = np.vstack([t, t[:1]])
        ax.fill(t[:, 0], t[:, 1], color="tab:orange", alpha=0.3, label="triangle" if i == 0 else None)
        ax.plot(t[:, 0], t[:, 1], color="tab:orange", lw=1.0)
    if points is not None:
        p = np.asarray(points).reshape(-1, 2)
        ax.plot(p[:, 0], p[:, 1], "k.", ms=5)
    ax.set_aspect("equal")
    if title:
        ax.set_title(title)
    ax.legend(loc="upper right", fontsize=8)
    return _to_svg(fig)


def render_curve(x, ys: dict, xlabel: str, ylabel: str) -> str:
    """Line plot of one or more series against ``x``."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for name, y in ys.items():
        ax.plot(x, y, marker=".", label=name)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend(fontsize=8)
    return _to_svg(fig)


def _to_svg(fig) -> str:
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buf.getvalue()
