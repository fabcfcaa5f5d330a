"""Dirichlet Green's function between concentric spheres eps < r < 1.

The Legendre series sum_l P_l(c) u_l(r<) v_l(r>) / (1 - eps^(2l+1)) is
resummed with the generating function sum_l P_l(c) t^l = (1 - 2ct + t^2)^(-1/2),
giving four point-charge image families per generation.
"""
import numpy as np
from scipy.special import eval_legendre

from .._arrays import distinct, pts, scalar_or_array
from ..errors import BadRadii, TruncationFailure
from .base import OracleSolution, generations, radial_mode

FOUR_PI = 4 * np.pi


def _sph(x, y, eps):
    x, y = pts(x), pts(y)
    if x.shape[-1] != 3 or y.shape[-1] != 3:
        raise BadRadii("concentric-spheres oracle needs 3D points")
    distinct(x, y, "concentric-spheres Green's function")
    r1, r2 = np.linalg.norm(x, axis=-1), np.linalg.norm(y, axis=-1)
    if np.any(np.minimum(r1, r2) < eps * (1 - 1e-12)) or np.any(np.maximum(r1, r2) > 1 + 1e-12):
        raise BadRadii("points must satisfy eps <= |x| <= 1")
    u = x / np.maximum(r1, 1e-300)[..., None]
    v = y / np.maximum(r2, 1e-300)[..., None]
    one_minus_c = np.sum((u - v) ** 2, axis=-1) / 2
    r1, r2 = np.clip(r1, eps, 1.0), np.clip(r2, eps, 1.0)
    return np.minimum(r1, r2), np.maximum(r1, r2), one_minus_c, r1, r2


def _inv_dist(t, one_minus_c):
    return 1 / np.sqrt((1 - t) ** 2 + 2 * t * one_minus_c)


def _resummed(eps, x, y, J):
    rl, rg, omc, _, _ = _sph(x, y, eps)
    acc = np.zeros_like(rl)
    for j in range(J):
        e = eps**j
        e2 = eps ** (2 * j)
        acc = acc + (e / rg) * _inv_dist(e2 * rl / rg, omc)
        acc = acc - e * _inv_dist(e2 * rl * rg, omc)
        acc = acc - (e * eps / (rl * rg)) * _inv_dist(e2 * eps**2 / (rl * rg), omc)
        acc = acc + (e * eps / rl) * _inv_dist(e2 * eps**2 * rg / rl, omc)
    return acc / FOUR_PI


def concentric_spheres_oracle(eps: float, tol: float = 1e-17) -> OracleSolution:
    if not 0 < eps < 1:
        raise BadRadii(f"inner radius must lie in (0, 1), got {eps}")
    J = generations(eps, tol)
    acc = 4 * eps**J / (FOUR_PI * eps * (1 - eps) ** 3) + 1e-14
    return OracleSolution(lambda x, y: _resummed(eps, x, y, J), acc, "spherical-harmonics", {"generations": J, "eps": eps})


def concentric_spheres_green(eps: float, x, y):
    """Dirichlet Green's function of the shell eps < |x| < 1 in R^3."""
    return concentric_spheres_oracle(eps)(x, y)


def concentric_spheres_green_modal(eps: float, x, y, lmax: int | None = None, tol: float = 1e-15):
    """Legendre series with one 2x2 continuity/jump solve per degree and pair."""
    x, y = np.atleast_2d(pts(x)), np.atleast_2d(pts(y))
    x, y = np.broadcast_arrays(x, y)
    rl, rg, omc, r1, r2 = _sph(x, y, eps)
    c = 1 - omc
    ratio = np.max(np.maximum.reduce([rl / rg, rl * rg, eps**2 / (rl * rg), eps**2 * rg / rl]))
    if lmax is None:
        lmax = generations(ratio, tol, cap=20000)
        if ratio**lmax > tol:
            raise TruncationFailure("Legendre series did not reach its tail tolerance")
    total = np.zeros(len(x))
    for l in range(lmax + 1):
        coef = radial_mode(l, -l - 1, -1.0, -1.0, eps, r1, r2, (2 * l + 1) / r2**2)
        total = total + eval_legendre(l, c) * coef
    total = total / FOUR_PI
    return scalar_or_array(total if total.size > 1 else total[0])
