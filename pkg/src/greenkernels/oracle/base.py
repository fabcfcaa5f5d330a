"""Common result type for reference solvers."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .._arrays import scalar_or_array


@dataclass(frozen=True)
class OracleSolution:
    """Reference kernel g(x, y) with a self-reported accuracy.

    ``pairs_fn(points, pairs)``, when present, evaluates many pairs drawn
    from one point set at once (used by solvers that factor a matrix per
    point set); otherwise ``g`` is called on the stacked pair arrays.
    """

    g: Callable
    accuracy: float
    method: str
    resolution: dict = field(default_factory=dict)
    pairs_fn: Callable | None = None

    def __call__(self, x, y):
        return scalar_or_array(self.g(np.asarray(x, float), np.asarray(y, float)))

    def at_pairs(self, points, pairs):
        points = np.asarray(points, float)
        pairs = np.asarray(pairs, int)
        if self.pairs_fn is not None:
            return self.pairs_fn(points, pairs)
        return np.asarray(self.g(points[pairs[:, 0]], points[pairs[:, 1]]), dtype=float)


def log_image(p, half_angle_sin2):
    """log|1 - p e^{i phi}|^2 written as log((1 - p)^2 + 4 p sin^2(phi/2))."""
    return np.log((1 - p) ** 2 + 4 * p * half_angle_sin2)


def generations(ratio, tol=1e-18, cap=100000):
    """Number of geometric image generations until ratio**J < tol."""
    if ratio <= 0:
        return 1
    if ratio >= 1:
        return cap
    return int(min(cap, np.ceil(np.log(tol) / np.log(ratio)) + 1))


def radial_mode(p, q, s_in, s_out, eps, r, r0, jump):
    """Radial factor of one separable mode: continuous at r0, derivative drops by ``jump`` across r0.

    The inner solution is u = r^p + s_in eps^(p-q) r^q, the outer one
    v = r^q + s_out r^p (p > q). Both columns of the 2x2 continuity/jump
    system are scaled by their value at r0, so only ratios of powers below
    one appear and high modes cannot overflow.
    """
    r, r0 = np.broadcast_arrays(np.asarray(r, float), np.asarray(r0, float))
    n = p - q
    t_in = lambda s: (eps / s) ** n
    log_u = lambda s: (p + q * s_in * t_in(s)) / (s * (1 + s_in * t_in(s)))
    log_v = lambda s: (q + p * s_out * s**n) / (s * (1 + s_out * s**n))
    A = np.empty(r0.shape + (2, 2))
    A[..., 0, 0], A[..., 0, 1] = 1.0, -1.0
    A[..., 1, 0], A[..., 1, 1] = log_u(r0), -log_v(r0)
    rhs = np.zeros(r0.shape + (2, 1))
    rhs[..., 1, 0] = np.broadcast_to(jump, r0.shape)
    c = np.linalg.solve(A, rhs)[..., 0]
    lo, hi = np.minimum(r, r0), np.maximum(r, r0)
    inner = (lo / hi) ** p * (1 + s_in * t_in(r)) / (1 + s_in * t_in(r0))
    outer = (lo / hi) ** (-q) * (1 + s_out * r**n) / (1 + s_out * r0**n)
    return np.where(r <= r0, c[..., 0] * inner, c[..., 1] * outer)
