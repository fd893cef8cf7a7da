"""Compiled inner loops for bodies given by a finite Fourier support function."""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _fourier_h012(c1, s1, a, b):
    """h, h', h'' of ``sum_k a_k cos(k t) + b_k sin(k t)`` given cos t, sin t."""
    ck = 1.0
    sk = 0.0
    h0 = 0.0
    h1 = 0.0
    h2 = 0.0
    for k in range(a.shape[0]):
        if k > 0:
            # angle addition keeps cos(k t), sin(k t) without extra trig calls
            ck, sk = ck * c1 - sk * s1, sk * c1 + ck * s1
        h0 += a[k] * ck + b[k] * sk
        h1 += k * (b[k] * ck - a[k] * sk)
        h2 -= k * k * (a[k] * ck + b[k] * sk)
    return h0, h1, h2


@njit(cache=True)
def fourier_ray_exits(P, V, a, b):
    """Exit parameter and normal angle of each ray ``P[i] + t V[i]``."""
    m = P.shape[0]
    t_out = np.empty(m)
    th_out = np.empty(m)
    for i in range(m):
        px = P[i, 0]
        py = P[i, 1]
        vn = math.hypot(V[i, 0], V[i, 1])
        vx = V[i, 0] / vn
        vy = V[i, 1] / vn
        phi = math.atan2(vy, vx)
        lo = phi - 0.5 * math.pi
        hi = phi + 0.5 * math.pi
        th = phi
        for _ in range(100):
            c = math.cos(th)
            s = math.sin(th)
            h0, h1, h2 = _fourier_h012(c, s, a, b)
            x = h0 * c - h1 * s
            y = h0 * s + h1 * c
            g = vx * (y - py) - vy * (x - px)
            if g > 0:
                hi = th
            else:
                lo = th
            dg = (h0 + h2) * (vx * c + vy * s)
            new = th - g / dg if dg != 0 else 0.5 * (lo + hi)
            if not (lo <= new <= hi):
                new = 0.5 * (lo + hi)
            scale = abs(x) + abs(y) + abs(px) + abs(py)
            step = abs(new - th)
            th = new
            if step <= 4e-16 * (1 + abs(th)) or abs(g) <= 4e-16 * scale or hi - lo <= 4e-16 * (1 + abs(th)):
                break
        c = math.cos(th)
        s = math.sin(th)
        h0, h1, h2 = _fourier_h012(c, s, a, b)
        # stationary in theta: angle errors only enter quadratically
        t = (h0 - px * c - py * s) / (vx * c + vy * s)
        t_out[i] = t / vn
        th_out[i] = th
    return t_out, th_out
