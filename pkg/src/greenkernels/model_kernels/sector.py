"""Planar wedge kernels via the power map w = z^(pi/alpha)."""
from dataclasses import dataclass

import numpy as np

from .._arrays import distinct, pts, scalar_or_array
from ..errors import NotInTruncatedSector, ValidationFailure

NORMALIZATIONS = ("l2", "sup")


@dataclass(frozen=True)
class SectorEigen:
    """First two Dirichlet eigen-exponents on the arc (0, alpha) and the first eigenfunction.

    ``normalization="l2"`` scales Psi to unit L2 norm on (0, alpha),
    ``"sup"`` to unit maximum.
    """

    alpha: float
    normalization: str = "l2"

    @property
    def lam(self):
        return np.pi / self.alpha

    @property
    def lam2(self):
        return 2 * np.pi / self.alpha

    @property
    def scale(self):
        return np.sqrt(2 / self.alpha) if self.normalization == "l2" else 1.0

    def Psi(self, theta):
        return scalar_or_array(self.scale * np.sin(self.lam * np.asarray(theta, dtype=float)))


def polar(x):
    x = pts(x)
    r = np.hypot(x[..., 0], x[..., 1])
    th = np.mod(np.arctan2(x[..., 1], x[..., 0]), 2 * np.pi)
    return r, th


@dataclass(frozen=True)
class SectorKernels:
    alpha: float
    normalization: str = "l2"

    def __post_init__(self):
        if not 0 < self.alpha < 2 * np.pi:
            raise ValidationFailure("alpha must lie in (0, 2 pi)")
        if self.normalization not in NORMALIZATIONS:
            raise ValidationFailure(f"normalization must be one of {NORMALIZATIONS}")

    @property
    def eigen(self) -> SectorEigen:
        return SectorEigen(self.alpha, self.normalization)

    def _w(self, x):
        r, th = polar(x)
        if np.any(th > self.alpha + 1e-12):
            raise NotInTruncatedSector("point outside the wedge")
        lam = np.pi / self.alpha
        return r**lam * np.exp(1j * lam * th)

    def G_cone(self, x, y):
        distinct(x, y, "cone Green's function")
        w, w0 = self._w(x), self._w(y)
        return scalar_or_array(np.log(np.abs(w - np.conj(w0)) / np.abs(w - w0)) / (2 * np.pi))

    def _half_disk(self, w, w0):
        num = np.abs(w - np.conj(w0)) * np.abs(1 - w * np.conj(w0))
        den = np.abs(w - w0) * np.abs(1 - w * w0)
        return np.log(num / den) / (2 * np.pi)

    def G_0(self, x, y):
        """Dirichlet kernel of the unit sector {r < 1}."""
        distinct(x, y, "sector Green's function")
        if np.any(polar(x)[0] > 1 + 1e-12) or np.any(polar(y)[0] > 1 + 1e-12):
            raise NotInTruncatedSector("point outside the unit sector")
        return scalar_or_array(self._half_disk(self._w(x), self._w(y)))

    def G_inf(self, xi, eta):
        """Dirichlet kernel of the exterior sector {r > 1}."""
        distinct(xi, eta, "exterior sector Green's function")
        if np.any(polar(xi)[0] < 1 - 1e-12) or np.any(polar(eta)[0] < 1 - 1e-12):
            raise NotInTruncatedSector("point inside the unit arc")
        return scalar_or_array(self._half_disk(self._w(xi), self._w(eta)))

    def Z_0(self, x):
        r, th = polar(x)
        lam = np.pi / self.alpha
        return scalar_or_array((r**-lam - r**lam) * self.eigen.Psi(th))

    def Z_inf(self, x):
        r, th = polar(x)
        lam = np.pi / self.alpha
        return scalar_or_array((r**lam - r**-lam) * self.eigen.Psi(th))


def sector_kernels(alpha: float, normalization: str = "l2") -> SectorKernels:
    return SectorKernels(alpha, normalization)
