import numpy as np
import pytest

from greenkernels.errors import NotInTruncatedSector, OutsideExterior, Singular, ValidationFailure
from greenkernels.model_kernels import (
    ExteriorBall,
    ExteriorDisk,
    UnitBall,
    UnitDisk,
    fundamental_2d,
    fundamental_3d,
    model_kernel_set,
    sector_kernels,
    strip_kernels,
)
from greenkernels.geometry import DomainSpec
from greenkernels.oracle import annulus_green, concentric_spheres_green

DISK, EXT, BALL, EXTB = UnitDisk(), ExteriorDisk(), UnitBall(), ExteriorBall()

# Exterior-disk Neumann values from an independent 40-digit Fourier series
EXT_NEUMANN_REF = [
    ((3.0, 0.0), (2.0, 0.0), 0.029017376995967611959),
    ((1.5, 0.5), (-0.3, 2.2), -0.14232851321187928534),
]


def _disk_pts(rng, n, r_hi=0.95):
    r = r_hi * np.sqrt(rng.uniform(0, 1, n))
    t = rng.uniform(0, 2 * np.pi, n)
    return np.stack([r * np.cos(t), r * np.sin(t)], axis=1)


def test_disk_green_reference_value():
    assert DISK.green((0.5, 0.0), (0.0, 0.0)) == pytest.approx(np.log(2) / (2 * np.pi), abs=1e-15)
    assert DISK.green((0.5, 0.0), (0.0, 0.0)) == pytest.approx(0.110318, abs=1e-6)
    assert DISK.regular_part((0.0, 0.0), (0.0, 0.0)) == 0.0


def test_disk_green_symmetric_and_vanishes_on_circle(rng):
    x, y = _disk_pts(rng, 100), _disk_pts(rng, 100)
    np.testing.assert_allclose(DISK.green(x, y), DISK.green(y, x), atol=1e-14)
    t = rng.uniform(0, 2 * np.pi, 50)
    circle = np.stack([np.cos(t), np.sin(t)], axis=1)
    assert np.max(np.abs(DISK.green(circle, _disk_pts(rng, 50)))) < 1e-12


def test_disk_regular_part_identity(rng):
    x, y = _disk_pts(rng, 30), _disk_pts(rng, 30)
    np.testing.assert_allclose(DISK.regular_part(x, y), fundamental_2d(x, y) - DISK.green(x, y), atol=1e-12)


def test_disk_green_matches_small_hole_annulus_with_capacity_correction():
    # the annulus kernel tends to the disk kernel only after removing the
    # log-capacity term G(x,0) G(0,y) / (log(eps) / 2 pi)
    x, y, eps = np.array([0.5, 0.1]), np.array([-0.3, 0.4]), 1e-8
    corr = DISK.green(x, (0, 0)) * DISK.green((0, 0), y) / (np.log(eps) / (2 * np.pi))
    assert annulus_green(eps, "DD", x, y) == pytest.approx(DISK.green(x, y) + corr, abs=1e-12)


def test_disk_neumann_normalization(rng):
    ys = _disk_pts(rng, 3, 0.8)
    t = 2 * np.pi * np.arange(512) / 512
    circle = np.stack([np.cos(t), np.sin(t)], axis=1)
    for y in ys:
        # orthogonality against d/dnu log|x| = 1 on the unit circle
        integral = np.mean(DISK.neumann(circle, y)) * 2 * np.pi
        assert abs(integral) < 1e-10
        assert DISK.neumann_regular(np.zeros(2), y) == pytest.approx(0.0, abs=1e-15)
    x, y = _disk_pts(rng, 100), _disk_pts(rng, 100)
    np.testing.assert_allclose(DISK.neumann(x, y), DISK.neumann(y, x), atol=1e-10)


def test_disk_gradients_match_finite_differences(rng):
    x, y = np.array([0.3, -0.2]), np.array([-0.1, 0.5])
    h = 1e-6
    fd = np.array([(DISK.regular_part(x + h * e, y) - DISK.regular_part(x - h * e, y)) / (2 * h) for e in np.eye(2)])
    np.testing.assert_allclose(DISK.grad_x_regular(x, y), fd, atol=1e-8)
    fdh = np.array(
        [[(DISK.grad_x_regular(x, y + h * e)[i] - DISK.grad_x_regular(x, y - h * e)[i]) / (2 * h) for e in np.eye(2)] for i in range(2)]
    )
    np.testing.assert_allclose(DISK.mixed_hessian_regular(x, y), fdh, atol=1e-7)


def test_exterior_disk_values():
    assert EXT.zeta((2.0, 0.0)) == pytest.approx(np.log(2) / (2 * np.pi), abs=1e-15)
    assert EXT.green((1e6, 0.0), (2.0, 0.0)) == pytest.approx(np.log(2) / (2 * np.pi), abs=1e-6)
    assert EXT.zeta_inf == 0.0
    big = np.array([1e8, 0.0])
    assert EXT.zeta(big) - np.log(1e8) / (2 * np.pi) == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(EXT.dirichlet_field((2.0, 0.0)), [0.5, 0.0], atol=1e-15)
    for t in (0.0, 1.0, 2.0):
        u = np.array([np.cos(t), np.sin(t)])
        np.testing.assert_allclose(EXT.dirichlet_field(u), u, atol=1e-15)
    assert np.linalg.norm(EXT.dipole_field((1e3, 0.0))) <= 2e-3
    with pytest.raises(OutsideExterior):
        EXT.green((0.5, 0.0), (2.0, 0.0))


@pytest.mark.parametrize("xi, eta, ref", EXT_NEUMANN_REF)
def test_exterior_neumann_matches_series(xi, eta, ref):
    assert EXT.neumann(xi, eta) == pytest.approx(ref, abs=1e-12)


def test_exterior_neumann_zero_flux_on_circle():
    t = np.linspace(0, 2 * np.pi, 32, endpoint=False)
    u = np.stack([np.cos(t), np.sin(t)], axis=1)
    eta = np.array([1.7, -0.9])
    h = 1e-4
    # one-sided second-order difference into the exterior
    d = (-3 * EXT.neumann(u * (1 + 1e-14), eta) + 4 * EXT.neumann(u * (1 + h), eta) - EXT.neumann(u * (1 + 2 * h), eta)) / (2 * h)
    assert np.max(np.abs(d)) < 1e-7


def test_ball_values():
    assert BALL.green((0.5, 0, 0), (0, 0, 0)) == pytest.approx((1 / 0.5 - 1) / (4 * np.pi), abs=1e-15)
    assert BALL.green((0.5, 0, 0), (0, 0, 0)) == pytest.approx(0.0795775, abs=1e-7)
    assert EXTB.capacitary_potential((2.0, 0, 0)) == 0.5
    assert EXTB.capacitary_potential((0.0, 1.0, 0.0)) == 1.0
    assert EXTB.capacity == pytest.approx(4 * np.pi)
    xi = np.array([0.0, 0.0, 1e6])
    assert EXTB.capacitary_potential(xi) == pytest.approx(EXTB.capacity * fundamental_3d(xi, np.zeros(3)), rel=1e-12)


def test_ball_green_matches_small_hole_spheres():
    x, y = np.array([0.3, 0.2, -0.1]), np.array([-0.4, 0.1, 0.5])
    assert concentric_spheres_green(1e-6, x, y) == pytest.approx(BALL.green(x, y), abs=1e-5)


def test_strip_flat_end_values():
    st = strip_kernels(1.0)
    for xn in (-0.3, -1.5, -4.0):
        assert st.zeta_plus((0.2, xn)) == pytest.approx(-xn, abs=1e-12)
    assert st.zeta_inf_plus == 0.0 and st.zeta_inf_minus == 0.0
    assert st.area == 1.0


def test_strip_cross_section_average():
    st = strip_kernels(1.0)
    xs = (np.arange(400) + 0.5) / 400 - 0.5
    y = np.array([0.1, 0.0])
    means = []
    for xn in (0.7, 1.4, 2.1):
        x = np.stack([xs, np.full_like(xs, xn)], axis=1)
        means.append(np.mean(st.G_inf(x, y)) + abs(xn) / 2)
    np.testing.assert_allclose(means, means[0], atol=1e-10)


def test_strip_closed_form_matches_series(rng):
    closed, series = strip_kernels(1.0), strip_kernels(1.0, method="series")
    x = np.stack([rng.uniform(-0.5, 0.5, 10), rng.uniform(-1.0, -0.2, 10)], axis=1)
    y = np.stack([rng.uniform(-0.5, 0.5, 10), rng.uniform(-2.5, -1.2, 10)], axis=1)
    np.testing.assert_allclose(closed.G_plus(x, y), series.G_plus(x, y), atol=1e-10)
    np.testing.assert_allclose(closed.G_inf(x, y), series.G_inf(x, y), atol=1e-10)


def test_sector_eigen_and_Z0():
    sk = sector_kernels(np.pi / 2, "sup")
    assert sk.eigen.lam == pytest.approx(2.0)
    assert sk.eigen.lam2 == pytest.approx(4.0)
    p = 0.5 * np.array([np.cos(np.pi / 4), np.sin(np.pi / 4)])
    assert sk.Z_0(p) == pytest.approx(3.75, abs=1e-12)
    h = 1e-3
    lap = sum(sk.Z_0(p + h * e) + sk.Z_0(p - h * e) for e in np.eye(2)) - 4 * sk.Z_0(p)
    assert abs(lap) <= 1e-6
    t = np.linspace(0.01, np.pi / 2 - 0.01, 16)
    arc = np.stack([np.cos(t), np.sin(t)], axis=1)
    assert np.max(np.abs(sk.Z_0(arc))) < 1e-12


@pytest.mark.parametrize("alpha", [np.pi / 2, 3 * np.pi / 4, 1.5 * np.pi])
def test_sector_psi_normalization(alpha):
    sk = sector_kernels(alpha, "l2")
    th = np.linspace(0, alpha, 4001)
    psi = sk.eigen.Psi(th)
    assert abs(psi[0]) < 1e-15 and abs(psi[-1]) < 1e-12
    assert np.all(psi[1:-1] > 0)
    w = np.full_like(th, alpha / 4000)
    w[[0, -1]] /= 2
    assert np.sum(w * psi**2) == pytest.approx(1.0, abs=1e-6)
    assert sk.eigen.lam == pytest.approx(np.pi / alpha)
    assert sk.eigen.lam2 == pytest.approx(2 * np.pi / alpha)


def test_sector_errors():
    with pytest.raises(ValidationFailure):
        sector_kernels(7.0)
    with pytest.raises(NotInTruncatedSector):
        sector_kernels(np.pi / 2).G_0((-0.5, 0.1), (0.3, 0.3))


def test_singular_on_diagonal():
    with pytest.raises(Singular):
        DISK.green((0.1, 0.2), (0.1, 0.2))
    with pytest.raises(Singular):
        BALL.green((0.1, 0.2, 0.0), (0.1, 0.2, 0.0))


def test_model_kernel_set_dispatch():
    assert isinstance(model_kernel_set(DomainSpec("DiskWithHole", 0.1)).inner, ExteriorDisk)
    assert isinstance(model_kernel_set(DomainSpec("BallWithHole", 0.1)).outer, UnitBall)
    assert model_kernel_set(DomainSpec("ThinRodStrip", 0.1, width=2.0)).strip.width == 2.0
    assert model_kernel_set(DomainSpec("TruncatedSector", 0.1), "sup").sector.normalization == "sup"
