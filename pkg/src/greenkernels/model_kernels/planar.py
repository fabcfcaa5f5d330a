"""Closed-form kernels for the unit disk and the exterior of the unit disk.

Sign convention: -Laplace applied to every kernel gives +delta, so the
free-space kernel is log(1/|x - y|) / (2 pi).
"""
import numpy as np

from .._arrays import distinct, dot, norm2, pts, scalar_or_array
from ..errors import NotInDomain, OutsideExterior

FOUR_PI = 4 * np.pi


def fundamental_2d(x, y):
    return scalar_or_array(-np.log(distinct(x, y)) / FOUR_PI)


def _image_quantity(x, y):
    # |x|^2 |y|^2 - 2 x.y + 1 = | |y| x - y / |y| |^2, regular at y = 0
    x, y = pts(x), pts(y)
    return norm2(x) * norm2(y) - 2 * dot(x, y) + 1


def _check_inside(x, tol=1e-12):
    if np.any(norm2(pts(x)) > (1 + tol) ** 2):
        raise NotInDomain("point outside the unit disk")


def _check_outside(x, tol=1e-12):
    if np.any(norm2(pts(x)) < (1 - tol) ** 2):
        raise OutsideExterior("point inside the unit hole")


class UnitDisk:
    """Dirichlet Green's function G of the unit disk, its regular part H,
    and the Neumann function N with the log|x| compensated flux.

    N is normalized by d/dnu (N + log|x| / 2 pi) = 0 and zero mean against
    d/dnu log|x| (= 1) on the unit circle, which gives
    N(x, y) = -(log|x - y|^2 + log Q) / 4 pi and R(0, y) = 0.
    """

    dim = 2
    center = np.zeros(2)

    fundamental = staticmethod(fundamental_2d)

    def green(self, x, y):
        _check_inside(x), _check_inside(y)
        d2 = distinct(x, y, "disk Green's function")
        return scalar_or_array(np.log(_image_quantity(x, y) / d2) / FOUR_PI)

    def regular_part(self, x, y):
        return scalar_or_array(-np.log(_image_quantity(x, y)) / FOUR_PI)

    def grad_x_regular(self, x, y):
        x, y = np.broadcast_arrays(pts(x), pts(y))
        q = _image_quantity(x, y)[..., None]
        return -(2 * norm2(y)[..., None] * x - 2 * y) / (FOUR_PI * q)

    def grad_y_regular(self, x, y):
        return self.grad_x_regular(y, x)

    def mixed_hessian_regular(self, x, y):
        """Matrix d^2 H / dx_i dy_j."""
        x, y = np.broadcast_arrays(pts(x), pts(y))
        q = _image_quantity(x, y)[..., None, None]
        gx = (2 * norm2(y)[..., None] * x - 2 * y)[..., :, None]
        gy = (2 * norm2(x)[..., None] * y - 2 * x)[..., None, :]
        d2q = 4 * x[..., :, None] * y[..., None, :] - 2 * np.eye(2)
        return -(d2q / q - gx * gy / q**2) / FOUR_PI

    def normal_derivative(self, x, z):
        """dG/dnu_z (x, z) for z on the unit circle: minus the Poisson kernel."""
        x, z = pts(x), pts(z)
        return scalar_or_array(-(1 - norm2(x)) / (2 * np.pi * norm2(x - z)))

    # Neumann function and its regular part
    def neumann(self, x, y):
        _check_inside(x), _check_inside(y)
        d2 = distinct(x, y, "disk Neumann function")
        return scalar_or_array(-(np.log(d2) + np.log(_image_quantity(x, y))) / FOUR_PI)

    def neumann_regular(self, x, y):
        return scalar_or_array(np.log(_image_quantity(x, y)) / FOUR_PI)

    def grad_x_neumann_regular(self, x, y):
        return -self.grad_x_regular(x, y)

    def grad_y_neumann_regular(self, x, y):
        return -self.grad_y_regular(x, y)

    def mixed_hessian_neumann_regular(self, x, y):
        return -self.mixed_hessian_regular(x, y)


class ExteriorDisk:
    """Model kernels of the exterior of the unit disk.

    green is the Dirichlet kernel bounded at infinity, ``neumann`` the
    Neumann kernel normalized by N ~ log(1/|xi|)/2pi + o(1) at infinity.
    The hole normal points out of the hole, into the exterior domain.
    """

    dim = 2
    zeta_inf = 0.0

    def green(self, xi, eta):
        _check_outside(xi), _check_outside(eta)
        d2 = distinct(xi, eta, "exterior Green's function")
        return scalar_or_array(np.log(_image_quantity(xi, eta) / d2) / FOUR_PI)

    def zeta(self, eta):
        """Limit of green(xi, eta) as |xi| -> infinity."""
        _check_outside(eta)
        return scalar_or_array(np.log(norm2(pts(eta))) / FOUR_PI)

    def neumann(self, xi, eta):
        _check_outside(xi), _check_outside(eta)
        d2 = distinct(xi, eta, "exterior Neumann function")
        xi, eta = pts(xi), pts(eta)
        v = np.log(d2) + np.log(_image_quantity(xi, eta)) - np.log(norm2(xi)) - np.log(norm2(eta))
        return scalar_or_array(-v / FOUR_PI)

    def dipole_field(self, xi):
        """Vector field harmonic outside the hole, vanishing at infinity,
        with normal derivative equal to the normal on the unit circle."""
        _check_outside(xi)
        xi = pts(xi)
        return -xi / norm2(xi)[..., None]

    def dirichlet_field(self, xi):
        """Bounded harmonic vector field equal to xi on the unit circle."""
        _check_outside(xi)
        xi = pts(xi)
        return xi / norm2(xi)[..., None]
