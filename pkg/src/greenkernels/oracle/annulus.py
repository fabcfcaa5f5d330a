"""Green's functions of the concentric annulus eps < r < 1.

The Fourier series in the angle is resummed in closed form: expanding the
per-mode denominators geometrically turns every mode sum into
sum_k cos(k phi) p^k / k = -log|1 - p e^{i phi}|^2 / 2, one image term per
generation. ``annulus_green_modal`` keeps the plain mode-by-mode
construction (a 2x2 continuity/jump solve per mode) for cross-checks.
"""
import numpy as np

from .._arrays import distinct, pts, scalar_or_array
from ..errors import BadRadii, TruncationFailure, ValidationFailure
from .base import OracleSolution, generations, log_image, radial_mode

BCS = ("DD", "DN", "ND")

# For each bc: sign pattern per image family (r</r>, r< r>, eps^2/(r< r>), eps^2 r>/r<)
# and whether generations alternate in sign.
_FAMILY_SIGNS = {"DD": (1, -1, -1, 1), "DN": (1, -1, 1, -1), "ND": (1, 1, -1, -1)}
_ALTERNATE = {"DD": False, "DN": True, "ND": True}


def _check(eps, bc):
    if bc not in BCS:
        raise ValidationFailure(f"bc must be one of {BCS}, got {bc!r}")
    if not 0 < eps < 1:
        raise BadRadii(f"inner radius must lie in (0, 1), got {eps}")


def _polar(x, y, eps):
    x, y = pts(x), pts(y)
    distinct(x, y, "annulus Green's function")
    r1, r2 = np.hypot(x[..., 0], x[..., 1]), np.hypot(y[..., 0], y[..., 1])
    if np.any(np.minimum(r1, r2) < eps * (1 - 1e-12)) or np.any(np.maximum(r1, r2) > 1 + 1e-12):
        raise BadRadii("points must satisfy eps <= |x| <= 1")
    r1, r2 = np.clip(r1, eps, 1.0), np.clip(r2, eps, 1.0)
    # sin^2(phi/2) from the chord between the unit directions
    u = x / np.maximum(np.hypot(x[..., 0], x[..., 1]), 1e-300)[..., None]
    v = y / np.maximum(np.hypot(y[..., 0], y[..., 1]), 1e-300)[..., None]
    s2 = np.sum((u - v) ** 2, axis=-1) / 4
    return np.minimum(r1, r2), np.maximum(r1, r2), s2


def _mode_zero(bc, rl, rg, eps):
    if bc == "DD":
        return np.log(rl / eps) * np.log(1 / rg) / np.log(1 / eps)
    if bc == "DN":
        return np.log(1 / rg)
    return np.log(rl / eps)


def _resummed(eps, bc, x, y, J):
    rl, rg, s2 = _polar(x, y, eps)
    signs = _FAMILY_SIGNS[bc]
    fam = (rl / rg, rl * rg, eps**2 / (rl * rg), eps**2 * rg / rl)
    acc = np.zeros_like(rl)
    e2 = eps**2
    for j in range(J):
        gsign = (-1) ** j if _ALTERNATE[bc] else 1
        scale = e2**j
        for s, p in zip(signs, fam):
            acc = acc + gsign * s * log_image(scale * p, s2)
    return _mode_zero(bc, rl, rg, eps) / (2 * np.pi) - acc / (4 * np.pi)


def _tail_bound(eps, J):
    return 2 / np.pi * eps ** (2 * J) / (1 - eps**2) ** 2


def annulus_oracle(eps: float, bc: str = "DD", tol: float = 1e-16) -> OracleSolution:
    _check(eps, bc)
    J = generations(eps**2, tol)
    acc = _tail_bound(eps, J) + 1e-14
    return OracleSolution(
        lambda x, y: _resummed(eps, bc, x, y, J),
        acc,
        "fourier-annulus",
        {"generations": J, "bc": bc, "eps": eps},
    )


def annulus_green(eps: float, bc: str, x, y):
    """Green's function of eps < |x| < 1 with boundary conditions ``bc``.

    DD: Dirichlet on both circles. DN: Dirichlet on |x| = 1, Neumann on
    |x| = eps. ND: Neumann on |x| = 1, Dirichlet on |x| = eps.
    """
    return annulus_oracle(eps, bc)(x, y)


def _mode_zero_pair(bc, eps):
    """(u, u', v, v') for mode 0: u meets the inner condition, v the outer one."""
    if bc in ("DD", "ND"):
        u = (lambda r: np.log(r / eps), lambda r: 1 / r)
    else:
        u = (lambda r: np.ones_like(r), lambda r: np.zeros_like(r))
    if bc in ("DD", "DN"):
        v = (lambda r: np.log(1 / r), lambda r: -1 / r)
    else:
        v = (lambda r: np.ones_like(r), lambda r: np.zeros_like(r))
    return u + v


def annulus_green_modal(eps: float, bc: str, x, y, kmax: int | None = None, tol: float = 1e-15):
    """Plain Fourier-mode sum, one 2x2 continuity/jump solve per mode and pair."""
    _check(eps, bc)
    x, y = np.atleast_2d(pts(x)), np.atleast_2d(pts(y))
    x, y = np.broadcast_arrays(x, y)
    rl, rg, _ = _polar(x, y, eps)
    r1, r2 = np.hypot(x[:, 0], x[:, 1]), np.hypot(y[:, 0], y[:, 1])
    phi = np.arctan2(x[:, 1], x[:, 0]) - np.arctan2(y[:, 1], y[:, 0])
    ratio = np.max(np.maximum(rl / rg, np.maximum(rl * rg, eps**2 / (rl * rg))))
    if kmax is None:
        kmax = generations(ratio, tol, cap=20000)
        if ratio ** kmax > tol:
            raise TruncationFailure("mode series did not reach its tail tolerance")
    total = np.zeros(len(x))
    s_in = -1.0 if bc in ("DD", "ND") else 1.0
    s_out = -1.0 if bc in ("DD", "DN") else 1.0
    for k in range(kmax + 1):
        if k == 0:
            u, du, v, dv = _mode_zero_pair(bc, eps)
            coef = np.empty(len(x))
            for p in range(len(x)):
                r0, r = r2[p], r1[p]
                A = np.array([[u(r0), -v(r0)], [du(r0), -dv(r0)]], dtype=float)
                c1, c2 = np.linalg.solve(A, [0.0, 1 / r0])
                coef[p] = c1 * u(r) if r <= r0 else c2 * v(r)
        else:
            coef = radial_mode(k, -k, s_in, s_out, eps, r1, r2, 1 / r2)
        weight = 1 / (2 * np.pi) if k == 0 else np.cos(k * phi) / np.pi
        total = total + weight * coef
    return scalar_or_array(total if total.size > 1 else total[0])
