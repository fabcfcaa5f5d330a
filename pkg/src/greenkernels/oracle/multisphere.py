"""Dirichlet Green's function of the unit ball with several small spherical holes.

The source y is first reflected in every hole sphere (Kelvin image charge
eps/|y - O_j| at O_j + eps^2 (y - O_j)/|y - O_j|^2), and every charge is
paired with its own image in the outer sphere. The resulting W(., y)
vanishes on the outer sphere and on the hole nearest to y up to smooth
remainders, which are removed by a regular part built from decaying solid
harmonics about each hole centre, each minus its Kelvin image in the unit
sphere. The multipole coefficients come from a Galerkin projection on
Gauss x trapezoid quadrature of each hole sphere; one factorization serves
every source point.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg as sla
from numpy.polynomial.legendre import leggauss
from scipy.special import sph_harm_y

from .._arrays import distinct, pts, scalar_or_array
from ..errors import BadRadii, HolesOverlap, NotInDomain
from .base import OracleSolution

FOUR_PI = 4 * np.pi


def real_sph_harm(L: int, u: np.ndarray) -> np.ndarray:
    """Orthonormal real spherical harmonics up to degree L at unit vectors u, shape (nb, N)."""
    u = np.atleast_2d(u)
    theta = np.arccos(np.clip(u[:, 2], -1, 1))
    phi = np.arctan2(u[:, 1], u[:, 0])
    ls = np.concatenate([np.full(2 * l + 1, l) for l in range(L + 1)])
    ms = np.concatenate([np.arange(-l, l + 1) for l in range(L + 1)])
    Y = sph_harm_y(ls[:, None], np.abs(ms)[:, None], theta[None, :], phi[None, :])
    out = np.where(ms[:, None] > 0, np.sqrt(2) * Y.real, np.where(ms[:, None] < 0, np.sqrt(2) * Y.imag, Y.real))
    return out, ls


def _unit(v):
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    safe = np.where(n > 0, n, 1.0)
    u = v / safe
    return np.where(n > 0, u, np.array([0.0, 0.0, 1.0])), n[..., 0]


def sphere_rule(n_theta: int):
    x, w = leggauss(n_theta)
    n_phi = 2 * n_theta
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    ct = np.repeat(x, n_phi)
    st = np.sqrt(1 - ct**2)
    ph = np.tile(phi, n_theta)
    u = np.stack([st * np.cos(ph), st * np.sin(ph), ct], axis=-1)
    return u, np.repeat(w, n_phi) * (2 * np.pi / n_phi)


def ball_green(x, p):
    """Unit-ball Dirichlet kernel for arrays x (..., 3) and p (..., 3)."""
    d = np.linalg.norm(x - p, axis=-1)
    q = np.sum(x * x, -1) * np.sum(p * p, -1) - 2 * np.sum(x * p, -1) + 1
    return (1 / d - 1 / np.sqrt(q)) / FOUR_PI


class MultiSphereSolver:
    def __init__(self, centers, eps: float, L: int = 16, n_theta: int | None = None):
        O = np.atleast_2d(np.asarray(centers, float))
        if not 0 < eps < 1:
            raise BadRadii("hole radius must lie in (0, 1)")
        if np.any(np.linalg.norm(O, axis=-1) + eps >= 1):
            raise HolesOverlap("a hole touches the outer sphere")
        for i in range(len(O)):
            for j in range(i):
                if np.linalg.norm(O[i] - O[j]) <= 2 * eps:
                    raise HolesOverlap("holes overlap")
        self.O, self.eps, self.L = O, eps, L
        self.n_theta = n_theta or L + 8
        u, w = sphere_rule(self.n_theta)
        self.u, self.w = u, w
        self.Ytest, self.ls = real_sph_harm(L, u)
        self.nb = len(self.ls)
        self._factor()

    def basis(self, X, i):
        """Decaying harmonics about O_i minus their Kelvin images, shape (N, nb)."""
        eps, O, L = self.eps, self.O[i], self.L
        X = np.atleast_2d(X)
        u, r = _unit(X - O)
        Yf, ls = real_sph_harm(L, u)
        f = (eps / r)[None, :] ** (ls[:, None] + 1) * Yf
        xh, nx = _unit(X)
        qv = xh - O * nx[:, None]
        qh, qn = _unit(qv)
        Yk, _ = real_sph_harm(L, qh)
        kel = eps ** (ls[:, None] + 1) * nx[None, :] ** ls[:, None] / qn[None, :] ** (ls[:, None] + 1) * Yk
        return (f - kel).T

    def _nodes(self, j):
        return self.O[j] + self.eps * self.u

    def _project(self, values):
        return (self.Ytest * self.w[None, :]) @ values

    def _factor(self):
        n, nb = len(self.O), self.nb
        A = np.zeros((n * nb, n * nb))
        for j in range(n):
            xj = self._nodes(j)
            for i in range(n):
                A[j * nb : (j + 1) * nb, i * nb : (i + 1) * nb] = self._project(self.basis(xj, i))
        self.A = A
        self.lu = sla.lu_factor(A)

    def images(self, Y):
        """Hole image charges q_i and positions y*_i for every source y."""
        out = []
        for O in self.O:
            d = Y - O
            r2 = np.sum(d * d, axis=-1)
            out.append((self.eps / np.sqrt(r2), O + self.eps**2 * d / r2[:, None]))
        return out

    def W(self, X, Y):
        """Reflected kernel table W(x, y), shape (len(X), len(Y))."""
        Xb, Yb = X[:, None, :], Y[None, :, :]
        with np.errstate(divide="ignore"):
            T = ball_green(Xb, Yb)
        for q, ys in self.images(Y):
            T = T - q[None, :] * ball_green(Xb, ys[None, :, :])
        return T

    def coefficients(self, Y):
        rhs = np.concatenate([self._project(self.W(self._nodes(j), Y)) for j in range(len(self.O))])
        return sla.lu_solve(self.lu, rhs)

    def green_table(self, X, Y):
        X, Y = np.atleast_2d(pts(X)), np.atleast_2d(pts(Y))
        C = self.coefficients(Y)
        G = self.W(X, Y)
        nb = self.nb
        for i in range(len(self.O)):
            G = G - self.basis(X, i) @ C[i * nb : (i + 1) * nb]
        return G


def _check_points(O, eps, P):
    if np.any(np.linalg.norm(P, axis=-1) > 1 + 1e-12):
        raise NotInDomain("point outside the unit ball")
    for c in O:
        if np.any(np.linalg.norm(P - c, axis=-1) < eps * (1 - 1e-12)):
            raise NotInDomain("point inside a hole")


def multi_sphere_oracle(centers, eps: float, L: int = 16, check: bool = True) -> OracleSolution:
    """Oracle for the ball with holes; accuracy from comparing degree L with L - 4."""
    O = np.atleast_2d(np.asarray(centers, float))
    solver = MultiSphereSolver(O, eps, L)
    coarse = MultiSphereSolver(O, eps, L - 4) if check else None
    state = {"accuracy": np.nan}

    def pairs_fn(points, pairs):
        _check_points(O, eps, points)
        used = np.unique(pairs.ravel())
        idx = -np.ones(len(points), int)
        idx[used] = np.arange(len(used))
        P = points[used]
        G = solver.green_table(P, P)
        if coarse is not None:
            with np.errstate(invalid="ignore"):
                diff = np.abs(G - coarse.green_table(P, P))
            off = ~np.eye(len(P), dtype=bool)
            state["accuracy"] = float(np.max(diff[off])) if off.any() else 0.0
        return G[idx[pairs[:, 0]], idx[pairs[:, 1]]]

    def g(x, y):
        X, Y = np.broadcast_arrays(np.atleast_2d(x), np.atleast_2d(y))
        distinct(X, Y, "multi-sphere Green's function")
        _check_points(O, eps, np.concatenate([X, Y]))
        out = np.empty(len(X))
        C = solver.coefficients(Y)
        nb = solver.nb
        W = np.array([solver.W(X[k : k + 1], Y[k : k + 1])[0, 0] for k in range(len(X))])
        corr = np.zeros(len(X))
        for i in range(len(O)):
            B = solver.basis(X, i)
            corr += np.einsum("pb,bp->p", B, C[i * nb : (i + 1) * nb])
        out[:] = W - corr
        return out

    sol = _MultiSphereOracle(g, np.nan, "multisphere-harmonics", {"L": L, "n_theta": solver.n_theta}, pairs_fn)
    object.__setattr__(sol, "_state", state)
    return sol


class _MultiSphereOracle(OracleSolution):
    @property
    def last_accuracy(self):
        return self._state["accuracy"]


def multi_sphere_green(centers, eps: float, x, y, L: int = 16):
    """G_eps(x, y) for the unit ball minus balls of radius eps at ``centers``."""
    return scalar_or_array(multi_sphere_oracle(centers, eps, L, check=False).g(pts(x), pts(y)))
