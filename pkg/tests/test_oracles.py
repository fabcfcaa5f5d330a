import numpy as np
import pytest

from greenkernels.errors import BadRadii, OutsideRod, UnsupportedBoundary, ValidationFailure
from greenkernels.geometry import DomainSpec
from greenkernels.model_kernels import UnitBall, UnitDisk, sector_kernels
from greenkernels.oracle import (
    annulus_green,
    annulus_green_modal,
    boundary_integral_green,
    boundary_integral_oracle,
    concentric_spheres_green,
    concentric_spheres_green_modal,
    multi_sphere_green,
    multi_sphere_oracle,
    oracle_for,
    rectangle_mixed_green,
    rectangle_mixed_green_modal,
    truncated_sector_green,
    truncated_sector_green_modal,
)

# Reference values from independent 40-digit modal series (radial two-point
# problems solved symbolically per mode, summed to convergence)
ANNULUS_REF = [
    ("DD", 0.1, (0.7, 0.1), (-0.2, 0.25), 0.0086974388596214151521),
    ("DD", 0.2, (0.25, -0.2), (0.6, 0.3), 0.017507867127456658165),
    ("DN", 0.1, (0.7, 0.1), (-0.2, 0.25), 0.032671898165360046794),
    ("DN", 0.05, (0.5, 0.0), (-0.4, 0.2), 0.041553743864605563147),
    ("ND", 0.1, (0.7, 0.1), (-0.2, 0.25), 0.13084347639992531617),
    ("ND", 0.05, (0.5, 0.0), (-0.4, 0.2), 0.22413234643333771302),
]
SPHERES_REF = [
    (0.05, (0.7, 0.0, 0.0), (0.0, 0.3, 0.2), 0.020722801614918999536),
    (0.2, (0.3, 0.2, -0.1), (-0.4, 0.1, 0.5), 0.003937846783948362933),
]
SECTOR_REF = [
    (np.pi / 2, 0.1, (0.5, 0.2), (0.3, 0.6), 0.039500318179556715183),
    (3 * np.pi / 4, 0.05, (0.4, 0.3), (-0.2, 0.5), 0.022568823754244897152),
]
# rod half-length 0.25, width 2, eps 0.1 (cross-section 0.2)
RECTANGLE_REF = ((0.03, 0.1), (-0.05, -0.04), 0.30368798519372723892)


@pytest.mark.parametrize("bc, eps, x, y, ref", ANNULUS_REF)
def test_annulus_reference(bc, eps, x, y, ref):
    assert annulus_green(eps, bc, x, y) == pytest.approx(ref, abs=1e-15)
    assert annulus_green_modal(eps, bc, x, y) == pytest.approx(ref, abs=1e-13)


@pytest.mark.parametrize("eps, x, y, ref", SPHERES_REF)
def test_spheres_reference(eps, x, y, ref):
    assert concentric_spheres_green(eps, x, y) == pytest.approx(ref, abs=1e-15)
    assert concentric_spheres_green_modal(eps, x, y) == pytest.approx(ref, abs=1e-13)


@pytest.mark.parametrize("alpha, eps, x, y, ref", SECTOR_REF)
def test_sector_reference(alpha, eps, x, y, ref):
    assert truncated_sector_green(alpha, eps, x, y) == pytest.approx(ref, abs=1e-15)
    assert truncated_sector_green_modal(alpha, eps, x, y) == pytest.approx(ref, abs=1e-13)


def test_rectangle_reference():
    x, y, ref = RECTANGLE_REF
    assert rectangle_mixed_green(0.25, 2.0, 0.1, x, y) == pytest.approx(ref, abs=1e-14)
    assert rectangle_mixed_green_modal(0.25, 2.0, 0.1, x, y) == pytest.approx(ref, abs=1e-12)


def test_annulus_boundary_conditions(rng):
    t = rng.uniform(0, 2 * np.pi, 16)
    u = np.stack([np.cos(t), np.sin(t)], axis=1)
    y = np.array([0.45, -0.3])
    eps = 0.1
    assert np.max(np.abs(annulus_green(eps, "DD", u, y))) < 1e-14
    assert np.max(np.abs(annulus_green(eps, "DD", eps * u, y))) < 1e-14
    assert np.max(np.abs(annulus_green(eps, "DN", u, y))) < 1e-14
    assert np.max(np.abs(annulus_green(eps, "ND", eps * u, y))) < 1e-14
    h = 1e-4

    def radial_derivative(bc, r0, sign):
        # one-sided second-order difference stepping into the annulus
        f = lambda r: annulus_green(eps, bc, r * u, y)
        return (-3 * f(r0) + 4 * f(r0 + sign * h) - f(r0 + 2 * sign * h)) / (2 * h)

    assert np.max(np.abs(radial_derivative("DN", eps, 1))) < 1e-6
    assert np.max(np.abs(radial_derivative("ND", 1.0, -1))) < 1e-6


def test_annulus_errors():
    with pytest.raises(ValidationFailure):
        annulus_green(0.1, "XY", (0.5, 0), (0, 0.5))
    with pytest.raises(ValidationFailure):
        annulus_green(1.5, "DD", (0.5, 0), (0, 0.5))
    with pytest.raises(BadRadii):
        annulus_green(0.1, "DD", (0.05, 0), (0, 0.5))


def test_spheres_rotation_invariance(rng):
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    x, y = np.array([0.3, 0.2, -0.1]), np.array([-0.4, 0.1, 0.5])
    assert concentric_spheres_green(0.2, q @ x, q @ y) == pytest.approx(concentric_spheres_green(0.2, x, y), abs=1e-15)


def test_sector_limit_matches_model_sector():
    sk = sector_kernels(np.pi / 2)
    x, y = (0.5, 0.2), (0.3, 0.6)
    assert truncated_sector_green(np.pi / 2, 1e-8, x, y) == pytest.approx(sk.G_0(x, y), abs=1e-6)


def test_rectangle_outside_raises():
    with pytest.raises(OutsideRod):
        rectangle_mixed_green(0.25, 2.0, 0.1, (0.5, 0.0), (0.0, 0.0))


def test_bie_matches_unit_disk():
    spec = DomainSpec("PerturbedDisk", 0.0)
    x = np.array([[0.5, 0.1], [-0.7, 0.2], [0.1, -0.8]])
    y = np.array([[-0.3, 0.4], [0.2, -0.5], [0.6, 0.3]])
    np.testing.assert_allclose(boundary_integral_green(spec, x, y, m=256), UnitDisk().green(x, y), atol=1e-9)


@pytest.mark.parametrize("bc, eps, x, y, ref", [c for c in ANNULUS_REF if c[0] == "DD"])
def test_bie_matches_annulus_reference(bc, eps, x, y, ref):
    spec = DomainSpec("DiskWithHole", eps)
    assert boundary_integral_green(spec, x, y) == pytest.approx(ref, abs=1e-8)


def test_bie_vanishes_on_perturbed_boundary():
    spec = DomainSpec("PerturbedDisk", 0.1, delta_cos=(1.0, 0.3), delta_sin=(0.0, 0.1))
    t = np.linspace(0, 2 * np.pi, 7, endpoint=False)
    from greenkernels.geometry import curve

    z = curve(spec).point(t)
    y = np.tile([0.2, -0.1], (len(t), 1))
    assert np.max(np.abs(boundary_integral_green(spec, z, y, m=512))) < 1e-10


def test_bie_accuracy_estimate_bounds_refinement():
    spec = DomainSpec("PerturbedDisk", 0.08, delta_cos=(1.0, 0.3))
    P = np.array([[0.5, 0.1], [-0.3, 0.4], [0.2, -0.6]])
    pairs = np.array([[0, 1], [1, 2], [0, 2]])
    orc = boundary_integral_oracle(spec, m=128)
    g = orc.at_pairs(P, pairs)
    fine = boundary_integral_oracle(spec, m=256, check=False).at_pairs(P, pairs)
    assert np.max(np.abs(g - fine)) <= max(orc.last_accuracy, 1e-14)


def test_bie_off_centre_hole_symmetric():
    spec = DomainSpec("DiskWithHole", 0.1, center=(0.2, -0.1))
    x, y = np.array([0.5, 0.3]), np.array([-0.4, 0.2])
    assert boundary_integral_green(spec, x, y) == pytest.approx(boundary_integral_green(spec, y, x), abs=1e-10)


def test_multisphere_single_hole_matches_spheres():
    x, y = np.array([0.5, 0.1, 0.0]), np.array([-0.2, 0.4, 0.3])
    assert multi_sphere_green([(0, 0, 0)], 0.1, x, y) == pytest.approx(concentric_spheres_green(0.1, x, y), abs=1e-9)


def test_multisphere_two_holes_properties(rng):
    centers = [(0.3, 0, 0), (-0.3, 0, 0)]
    x, y = np.array([0.1, 0.4, 0.2]), np.array([-0.5, -0.2, 0.1])
    g = multi_sphere_green(centers, 0.04, x, y)
    assert g == pytest.approx(multi_sphere_green(centers, 0.04, y, x), abs=1e-10)
    mirror = np.array([-1.0, 1.0, 1.0])
    assert g == pytest.approx(multi_sphere_green(centers, 0.04, mirror * x, mirror * y), abs=1e-10)
    assert g == pytest.approx(multi_sphere_green(centers, 0.04, x, y, L=24), abs=1e-9)
    u = rng.normal(size=(8, 3))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    on_hole = np.array(centers[0]) + 0.04 * u
    assert np.max(np.abs(multi_sphere_green(centers, 0.04, on_hole, np.tile(y, (8, 1))))) < 1e-9
    assert multi_sphere_oracle(centers, 0.04).method == "multisphere-harmonics"


def test_oracle_dispatch():
    assert oracle_for("dirichlet_hole_2d", DomainSpec("DiskWithHole", 0.1)).method == "fourier-annulus"
    assert oracle_for("hadamard_auto", DomainSpec("PerturbedDisk", 0.1)).method == "boundary-integral"
    assert oracle_for("thin_rod", DomainSpec("ThinRodStrip", 0.1, half_length=0.25, width=2.0)).method == "cosine-rectangle"
    with pytest.raises(UnsupportedBoundary):
        oracle_for("mixed_outerD_holeN", DomainSpec("DiskWithHole", 0.1, center=(0.2, 0.0)))


def test_ball_limit():
    x, y = np.array([0.3, 0.2, -0.1]), np.array([-0.4, 0.1, 0.5])
    assert concentric_spheres_green(1e-6, x, y) == pytest.approx(UnitBall().green(x, y), abs=1e-5)
