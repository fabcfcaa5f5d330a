"""Dirichlet Green's function of the annular sector eps < r < 1, 0 < theta < alpha.

Modes sin(k lam theta), lam = pi / alpha, with radial powers r^{+-k lam};
the mode sum is resummed into logarithms per image generation.
"""
import numpy as np

from .._arrays import distinct, pts, scalar_or_array
from ..errors import BadRadii, OutsideSector, TruncationFailure
from .base import OracleSolution, generations, log_image, radial_mode


def _coords(alpha, eps, x, y):
    x, y = pts(x), pts(y)
    distinct(x, y, "sector Green's function")
    out = []
    for p in (x, y):
        r = np.hypot(p[..., 0], p[..., 1])
        th = np.arctan2(p[..., 1], p[..., 0])
        th = np.where(th < -1e-12, th + 2 * np.pi, np.maximum(th, 0.0))
        if np.any(r < eps * (1 - 1e-12)) or np.any(r > 1 + 1e-12) or np.any(th > alpha + 1e-12):
            raise OutsideSector("point outside the annular sector")
        out.append((np.clip(r, eps, 1.0), np.minimum(th, alpha)))
    return out


def _resummed(alpha, eps, x, y, J):
    lam = np.pi / alpha
    (r1, t1), (r2, t2) = _coords(alpha, eps, x, y)
    rl, rg = np.minimum(r1, r2), np.maximum(r1, r2)
    sm = np.sin(lam * (t1 - t2) / 2) ** 2
    sp = np.sin(lam * (t1 + t2) / 2) ** 2
    fam = ((1, rl / rg), (-1, rl * rg), (-1, eps**2 / (rl * rg)), (1, eps**2 * rg / rl))
    acc = np.zeros_like(rl)
    for j in range(J):
        e2 = eps ** (2 * j)
        for s, q in fam:
            P = (e2 * q) ** lam
            acc = acc + s * (log_image(P, sm) - log_image(P, sp))
    return -acc / (4 * np.pi)


def truncated_sector_oracle(alpha: float, eps: float, tol: float = 1e-18) -> OracleSolution:
    if not 0 < alpha < 2 * np.pi:
        raise BadRadii("opening angle must lie in (0, 2 pi)")
    if not 0 < eps < 1:
        raise BadRadii("truncation radius must lie in (0, 1)")
    lam = np.pi / alpha
    q = eps ** (2 * lam)
    J = generations(q, tol)
    acc = 8 * q**J / (np.pi * (1 - q)) + 1e-14
    return OracleSolution(lambda x, y: _resummed(alpha, eps, x, y, J), acc, "sector-series", {"generations": J, "alpha": alpha})


def truncated_sector_green(alpha: float, eps: float, x, y):
    return truncated_sector_oracle(alpha, eps)(x, y)


def truncated_sector_green_modal(alpha, eps, x, y, kmax=None, tol=1e-15):
    """sin(k lam theta) series with one 2x2 continuity/jump solve per mode and pair."""
    lam = np.pi / alpha
    x, y = np.atleast_2d(pts(x)), np.atleast_2d(pts(y))
    x, y = np.broadcast_arrays(x, y)
    (r1, t1), (r2, t2) = _coords(alpha, eps, x, y)
    rl, rg = np.minimum(r1, r2), np.maximum(r1, r2)
    ratio = np.max(np.maximum(rl / rg, np.maximum(rl * rg, eps**2 / (rl * rg)))) ** lam
    if kmax is None:
        kmax = generations(ratio, tol, cap=20000)
        if ratio**kmax > tol:
            raise TruncationFailure("sector series did not reach its tail tolerance")
    total = np.zeros(len(x))
    for k in range(1, kmax + 1):
        nu = k * lam
        coef = radial_mode(nu, -nu, -1.0, -1.0, eps, r1, r2, 1 / r2)
        total = total + (2 / alpha) * np.sin(nu * t1) * np.sin(nu * t2) * coef
    return scalar_or_array(total if total.size > 1 else total[0])
