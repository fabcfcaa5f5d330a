"""Neumann-sided strip kernels for the planar thin-rod problem.

Coordinates are (x', x_n) = (x[0], x[1]): the cross-section is
-w/2 < x' < w/2 (Neumann walls), the rod axis is x_n. C+ = {x_n < 0}
and C- = {x_n > 0} carry a flat Dirichlet end at x_n = 0.
"""
from dataclasses import dataclass

import numpy as np

from .._arrays import distinct, pts, scalar_or_array
from ..errors import TruncationFailure, ValidationFailure

SERIES_TOL = 1e-13
SERIES_CAP = 10_000


def _log_abs_2sinh(a, b):
    """log|2 sinh(a + i b)| without overflow."""
    p = np.exp(-2 * np.abs(a))
    with np.errstate(divide="ignore"):
        return np.abs(a) + 0.5 * np.log1p(p * p - 2 * p * np.cos(2 * b))


@dataclass(frozen=True)
class StripKernels:
    """G+, G-, zeta+, zeta-, and G_inf for a strip of width ``width``.

    ``method="closed"`` uses the conformal map exp(pi z / w) of the strip
    onto the half-plane; ``method="series"`` sums the cosine modes across
    the width (slow when x_n is close to y_n; kept for cross-checks).
    """

    width: float = 1.0
    method: str = "closed"

    def __post_init__(self):
        if self.width <= 0:
            raise ValidationFailure("strip width must be positive")
        if self.method not in ("closed", "series"):
            raise ValidationFailure(f"unknown strip kernel method {self.method!r}")

    zeta_inf_plus = 0.0
    zeta_inf_minus = 0.0

    @property
    def area(self):
        """|omega|, the cross-section measure."""
        return self.width

    def G_inf(self, x, y):
        distinct(x, y, "strip Neumann kernel")
        if self.method == "series":
            return scalar_or_array(self._G_inf_series(pts(x), pts(y)))
        x, y = pts(x), pts(y)
        w = self.width
        s = np.pi / (2 * w)
        dn = x[..., 1] - y[..., 1]
        px, py = x[..., 0] + w / 2, y[..., 0] + w / 2
        v = _log_abs_2sinh(s * dn, s * (px - py)) + _log_abs_2sinh(s * dn, s * (px + py))
        return scalar_or_array(-v / (2 * np.pi))

    def _G_inf_series(self, x, y):
        w = self.width
        x, y = np.broadcast_arrays(x, y)
        dn = np.abs(x[..., 1] - y[..., 1])
        total = -dn / (2 * w)
        cx = np.pi * (x[..., 0] + w / 2) / w
        cy = np.pi * (y[..., 0] + w / 2) / w
        for k in range(1, SERIES_CAP + 1):
            mu = k * np.pi / w
            term = (2 / w) * np.cos(k * cx) * np.cos(k * cy) * np.exp(-mu * dn) / (2 * mu)
            total = total + term
            if np.all(np.abs(np.exp(-mu * dn) / (mu * w)) < SERIES_TOL * (np.abs(total) + 1)):
                return total
        raise TruncationFailure("strip cosine series did not converge (x_n too close to y_n)")

    @staticmethod
    def _mirror(y):
        y = pts(y).copy()
        y[..., 1] = -y[..., 1]
        return y

    def G_plus(self, x, y):
        """Kernel of C+ = {x_n < 0}: Dirichlet at x_n = 0, bounded as x_n -> -inf."""
        return scalar_or_array(np.asarray(self.G_inf(x, y)) - np.asarray(self.G_inf(x, self._mirror(y))))

    def G_minus(self, x, y):
        """Kernel of C- = {x_n > 0}: Dirichlet at x_n = 0, bounded as x_n -> +inf."""
        return self.G_plus(x, y)

    def zeta_plus(self, x):
        """Harmonic in C+, zero on the end, ~ -x_n / |omega| at -inf."""
        return scalar_or_array(-pts(x)[..., 1] / self.width)

    def zeta_minus(self, x):
        return scalar_or_array(pts(x)[..., 1] / self.width)


def strip_kernels(w: float = 1.0, ends: str = "flat", method: str = "closed") -> StripKernels:
    if ends != "flat":
        raise ValidationFailure("only flat rod ends are supported")
    return StripKernels(w, method)
