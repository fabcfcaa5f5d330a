"""Green's function of the rectangle |x'| < h/2, |x_n| < a (h = eps * w).

Neumann on the long sides x' = +-h/2, Dirichlet on the ends x_n = +-a.
Point coordinates are (x', x_n). The cosine series across the width is
resummed: each mode's 1D two-point problem expands into exponentials
e^{-k pi D / h}, and the sum over k is a logarithm.
"""
import numpy as np

from .._arrays import distinct, pts, scalar_or_array
from ..errors import OutsideRod, TruncationFailure, ValidationFailure
from .base import OracleSolution, generations, log_image


def _check(a, w, eps):
    if a <= 0 or w <= 0 or eps <= 0:
        raise ValidationFailure("a, w and eps must be positive")


def _coords(a, h, x, y):
    x, y = pts(x), pts(y)
    distinct(x, y, "rectangle Green's function")
    for p in (x, y):
        if np.any(np.abs(p[..., 0]) > h / 2 * (1 + 1e-12)) or np.any(np.abs(p[..., 1]) > a * (1 + 1e-12)):
            raise OutsideRod("point outside the rod rectangle")
    tx = np.pi * (np.clip(x[..., 0], -h / 2, h / 2) + h / 2) / h
    ty = np.pi * (np.clip(y[..., 0], -h / 2, h / 2) + h / 2) / h
    s, t = np.clip(x[..., 1], -a, a), np.clip(y[..., 1], -a, a)
    return tx, ty, s, t


def _resummed(a, h, x, y, J):
    tx, ty, s, t = _coords(a, h, x, y)
    d, sig = np.abs(s - t), s + t
    M, m = np.maximum(s, t), np.minimum(s, t)
    g0 = (a - M) * (a + m) / (2 * a * h)
    sm = np.sin((tx - ty) / 2) ** 2
    sp = np.sin((tx + ty) / 2) ** 2
    acc = np.zeros_like(d)
    for j in range(J):
        for sign, D in (
            (1, d + 4 * a * j),
            (1, 4 * a * (j + 1) - d),
            (-1, 2 * a * (2 * j + 1) - sig),
            (-1, 2 * a * (2 * j + 1) + sig),
        ):
            p = np.exp(-np.pi * D / h)
            acc = acc + sign * (log_image(p, sm) + log_image(p, sp))
    return g0 - acc / (4 * np.pi)


def rectangle_oracle(a: float, w: float, eps: float, tol: float = 1e-18) -> OracleSolution:
    _check(a, w, eps)
    h = eps * w
    q = np.exp(-4 * np.pi * a / h)
    J = generations(q, tol)
    acc = 8 * q**J / (np.pi * (1 - q)) + 1e-14
    return OracleSolution(lambda x, y: _resummed(a, h, x, y, J), acc, "cosine-rectangle", {"generations": J, "a": a, "h": h})


def rectangle_mixed_green(a: float, w: float, eps: float, x, y):
    """Mixed Green's function of the thin rod of half-length ``a`` and width ``eps * w``."""
    return rectangle_oracle(a, w, eps)(x, y)


def rectangle_mixed_green_modal(a, w, eps, x, y, kmax=None, tol=1e-15):
    """Cosine series with one 2x2 continuity/jump solve per mode and pair."""
    _check(a, w, eps)
    h = eps * w
    x, y = np.atleast_2d(pts(x)), np.atleast_2d(pts(y))
    x, y = np.broadcast_arrays(x, y)
    tx, ty, s, t = _coords(a, h, x, y)
    dmin = np.min(np.abs(s - t))
    if kmax is None:
        kmax = generations(np.exp(-np.pi * dmin / h), tol, cap=20000)
        if np.exp(-np.pi * dmin / h * kmax) > tol:
            raise TruncationFailure("cosine series did not reach its tail tolerance")
    total = np.zeros(len(x))
    for k in range(kmax + 1):
        mu = k * np.pi / h
        coef = np.empty(len(x))
        for p in range(len(x)):
            t0, s0 = t[p], s[p]
            if k == 0:
                u0, du0, v0, dv0 = t0 + a, 1.0, a - t0, -1.0
                uu, vv = s0 + a, a - s0
            else:
                # sinh(mu (s + a)) and sinh(mu (a - s)) rescaled to O(1) at s = t0
                e = np.exp
                u0, du0 = (1 - e(-2 * mu * (t0 + a))) / 2, mu * (1 + e(-2 * mu * (t0 + a))) / 2
                v0, dv0 = (1 - e(-2 * mu * (a - t0))) / 2, -mu * (1 + e(-2 * mu * (a - t0))) / 2
                if s0 <= t0:
                    uu, vv = (e(mu * (s0 - t0)) - e(-mu * (s0 + t0 + 2 * a))) / 2, 0.0
                else:
                    uu, vv = 0.0, (e(mu * (t0 - s0)) - e(-mu * (2 * a - s0 - t0))) / 2
            sc = max(abs(u0), abs(v0), 1.0)
            A = np.array([[u0, -v0], [du0, -dv0]]) / sc
            c1, c2 = np.linalg.solve(A, [0.0, 1.0 / sc])
            coef[p] = c1 * uu if s0 <= t0 else c2 * vv
        weight = 1 / h if k == 0 else 2 / h * np.cos(k * tx) * np.cos(k * ty)
        total = total + weight * coef
    return scalar_or_array(total if total.size > 1 else total[0])
