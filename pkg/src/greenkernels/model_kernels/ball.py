"""Unit ball and exterior of the unit ball in R^3."""
import numpy as np

from .._arrays import distinct, dot, norm2, pts, scalar_or_array
from ..errors import NotInDomain, OutsideExterior, ValidationFailure

SPHERE_AREA = 4 * np.pi  # |S^2|
FUNDAMENTAL_COEF = 1 / ((3 - 2) * SPHERE_AREA)


def _check_dim(*args):
    for a in args:
        if pts(a).shape[-1] != 3:
            raise ValidationFailure("three-dimensional kernel called with a non-3D point")


def fundamental_3d(x, y):
    _check_dim(x, y)
    return scalar_or_array(FUNDAMENTAL_COEF / np.sqrt(distinct(x, y)))


def _image_quantity(x, y):
    x, y = pts(x), pts(y)
    return norm2(x) * norm2(y) - 2 * dot(x, y) + 1


class UnitBall:
    """Dirichlet Green's function of the unit ball (Kelvin image) and its regular part."""

    dim = 3
    fundamental = staticmethod(fundamental_3d)

    def green(self, x, y):
        _check_dim(x, y)
        if np.any(norm2(pts(x)) > 1 + 1e-12) or np.any(norm2(pts(y)) > 1 + 1e-12):
            raise NotInDomain("point outside the unit ball")
        d2 = distinct(x, y, "ball Green's function")
        return scalar_or_array(FUNDAMENTAL_COEF * (1 / np.sqrt(d2) - 1 / np.sqrt(_image_quantity(x, y))))

    def regular_part(self, x, y):
        _check_dim(x, y)
        return scalar_or_array(FUNDAMENTAL_COEF / np.sqrt(_image_quantity(x, y)))


class ExteriorBall:
    """Exterior Dirichlet kernel of the unit ball, capacitary potential and capacity.

    The capacity uses the normalization P(xi) ~ cap |xi|^{-1} / 4 pi, so the
    unit ball has cap = 4 pi.
    """

    dim = 3
    capacity = 4 * np.pi

    def green(self, xi, eta):
        _check_dim(xi, eta)
        if np.any(norm2(pts(xi)) < 1 - 1e-12) or np.any(norm2(pts(eta)) < 1 - 1e-12):
            raise OutsideExterior("point inside the unit ball hole")
        d2 = distinct(xi, eta, "exterior ball Green's function")
        return scalar_or_array(FUNDAMENTAL_COEF * (1 / np.sqrt(d2) - 1 / np.sqrt(_image_quantity(xi, eta))))

    def capacitary_potential(self, xi):
        _check_dim(xi)
        return scalar_or_array(1 / np.sqrt(norm2(pts(xi))))
