import numpy as np
import pytest

from greenkernels import asymptotics
from greenkernels.asymptotics import evaluate, evaluate_terms, kernel_eval
from greenkernels.errors import (
    ConstraintViolated,
    DenominatorDegenerate,
    NotInPerforatedDomain,
    OutsideStrip,
    Singular,
    ValidationFailure,
)
from greenkernels.geometry import DomainSpec
from greenkernels.model_kernels import ExteriorDisk, ModelKernelSet, UnitBall, UnitDisk
from greenkernels.oracle import annulus_green, boundary_integral_green, concentric_spheres_green

PD = DomainSpec("PerturbedDisk", 0.04, delta_cos=(1.0, 0.3))
DH = DomainSpec("DiskWithHole", 0.05)
BH = DomainSpec("BallWithHole", 0.05)
TWO = DomainSpec("BallWithHoles", 0.04, centers=((0.3, 0, 0), (-0.3, 0, 0)))


def test_disk_green_formula_without_domain():
    ke = kernel_eval("disk_green", None, (0.5, 0), (0, 0))
    assert ke.value == pytest.approx(0.110318, abs=1e-6)
    assert ke.epsilon == 0.0 and ke.x == (0.5, 0.0)
    assert asymptotics.ball_green(None, (0.5, 0, 0), (0, 0, 0)).value == pytest.approx(0.0795775, abs=1e-7)
    with pytest.raises(ValidationFailure):
        kernel_eval("thin_rod", None, (0.5, 0), (0, 0))
    with pytest.raises(ValidationFailure):
        kernel_eval("no_such_formula", DH, (0.5, 0), (0, 0.5))


def test_hadamard_classical_unperturbed_limit():
    spec = DomainSpec("PerturbedDisk", 0.0, delta_cos=(1.0, 0.3))
    x, y = (0.3, 0.0), (0.0, 0.4)
    assert evaluate("hadamard_classical", spec, x, y)[0] == UnitDisk().green(x, y)


def test_hadamard_classical_interior_rate():
    x, y = np.array([0.3, 0.0]), np.array([0.0, 0.4])
    errs = []
    for eps in (0.08, 0.04, 0.02):
        spec = PD.with_epsilon(eps)
        errs.append(abs(evaluate("hadamard_classical", spec, x, y)[0] - boundary_integral_green(spec, x, y)))
    slope = np.polyfit(np.log([0.08, 0.04, 0.02]), np.log(errs), 1)[0]
    assert 1.7 <= slope <= 2.3


def test_hadamard_uniform_layer_vanishes_at_zero_eps():
    spec = DomainSpec("PerturbedDisk", 0.0, delta_cos=(1.0, 0.3))
    t = evaluate_terms("hadamard_uniform", spec, (0.9, 0.01), (0.9, -0.01))
    layer = sum(v for k, v in t.items() if k.startswith("boundary-layer"))
    assert abs(float(np.sum(layer))) < 1e-14


def test_hadamard_uniform_outside_strip():
    with pytest.raises(OutsideStrip):
        evaluate("hadamard_uniform", PD, (0.1, 0.0), (0.0, 0.2))
    # the auto variant falls back to the classical formula there
    a = evaluate("hadamard_auto", PD, (0.1, 0.0), (0.0, 0.2))
    c = evaluate("hadamard_classical", PD, (0.1, 0.0), (0.0, 0.2))
    np.testing.assert_allclose(a, c, atol=1e-15)


def test_hadamard_uniform_near_boundary_error_is_order_eps():
    # pair at distance eps/2 from the boundary, separated by 0.4 eps
    uniform, classical = [], []
    for eps in (0.08, 0.04, 0.02):
        spec = PD.with_epsilon(eps)
        r = 1 - eps * 1.3 - eps / 2
        dt = 0.2 * eps
        x = np.array([r * np.cos(dt), r * np.sin(dt)])
        y = np.array([r * np.cos(dt), -r * np.sin(dt)])
        exact = boundary_integral_green(spec, x, y)
        uniform.append(abs(evaluate("hadamard_uniform", spec, x, y)[0] - exact) / eps)
        classical.append(abs(evaluate("hadamard_classical", spec, x, y)[0] - exact) / eps)
    assert max(uniform) / min(uniform) < 2
    assert classical[-1] > 2 * classical[0]


def test_dirichlet_hole_3d_against_spheres():
    x, y = np.array([0.5, 0, 0]), np.array([0, 0.5, 0])
    err = abs(evaluate("dirichlet_hole_3d", BH, x, y)[0] - concentric_spheres_green(0.05, x, y))
    assert err <= 10 * 0.05**2 / 0.5


def test_dirichlet_hole_3d_vanishes_on_hole_to_order_eps(rng):
    u = rng.normal(size=(10, 3))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    y = np.tile([0.4, -0.2, 0.3], (10, 1))
    for eps in (0.1, 0.05):
        v = evaluate("dirichlet_hole_3d", BH.with_epsilon(eps), eps * u, y)
        assert np.max(np.abs(v)) <= 2 * eps


def test_dirichlet_hole_2d_terms_and_denominator():
    t = evaluate_terms("dirichlet_hole_2d", DH, (0.5, 0.0), (-0.4, 0.2))
    assert set(t) >= {"outer-green", "inner-green", "capacity-rational"}
    x, y = np.array([0.5, 0.0]), np.array([-0.4, 0.2])
    err = abs(evaluate("dirichlet_hole_2d", DH, x, y)[0] - annulus_green(0.05, "DD", x, y))
    assert err < 0.05


def test_dirichlet_hole_2d_outer_boundary_residual_shrinks():
    t = np.linspace(0, 2 * np.pi, 9)
    u = np.stack([np.cos(t), np.sin(t)], axis=1)
    y = np.tile([0.3, 0.2], (9, 1))
    sup = [np.max(np.abs(evaluate("dirichlet_hole_2d", DH.with_epsilon(e), u, y))) for e in (0.1, 0.05, 0.025)]
    assert sup[0] <= 0.1
    assert sup[-1] < sup[0] / 2


def test_degenerate_denominator():
    class ResonantHole(ExteriorDisk):
        zeta_inf = np.log(0.05) / (2 * np.pi)

    mk = ModelKernelSet(outer=UnitDisk(), inner=ResonantHole())
    with pytest.raises(DenominatorDegenerate):
        evaluate("dirichlet_hole_2d", DH, (0.5, 0.0), (-0.4, 0.2), mk=mk)


def test_corollary_constraints():
    with pytest.raises(ConstraintViolated):
        evaluate("corollary_far", DH, (0.05, 0.0), (0.5, 0.0))
    with pytest.raises(ConstraintViolated):
        evaluate("corollary_near", DH, (0.3, 0.0), (0.0, 0.6))


def test_corollary_far_3d_discrepancy_bound(rng):
    eps = 0.02
    spec = BH.with_epsilon(eps)
    x, y = np.array([0.5, 0.2, 0.1]), np.array([-0.3, 0.4, 0.2])
    full = evaluate("dirichlet_hole_3d", spec, x, y)[0]
    far = evaluate("corollary_far", spec, x, y)[0]
    rx, ry = np.linalg.norm(x), np.linalg.norm(y)
    assert abs(full - far) <= 10 * eps**2 / ((rx * ry) ** 2 * min(rx, ry))


def test_mixed_formulas_vanish_where_expected():
    t = np.linspace(0, 2 * np.pi, 9)
    u = np.stack([np.cos(t), np.sin(t)], axis=1)
    y = np.tile([0.3, 0.2], (9, 1))
    assert np.max(np.abs(evaluate("mixed_outerD_holeN", DH, u, y))) <= 0.05**2
    eps = 0.05
    v = evaluate("mixed_outerN_holeD", DH, eps * u * (1 + 1e-12), y)
    assert np.max(np.abs(v)) <= 2 * eps


def test_mixed_outerD_holeN_rate():
    x, y = np.array([0.5, 0.0]), np.array([-0.4, 0.2])
    eps = np.array([0.16, 0.08, 0.04, 0.02])
    errs = [abs(evaluate("mixed_outerD_holeN", DH.with_epsilon(e), x, y)[0] - annulus_green(e, "DN", x, y)) for e in eps]
    slope = np.polyfit(np.log(eps), np.log(errs), 1)[0]
    assert 1.7 <= slope <= 2.3


def test_thin_rod_denominator_flat_ends():
    spec = DomainSpec("ThinRodStrip", 0.1, half_length=1.0, width=1.0)
    ke = kernel_eval("thin_rod", spec, (0.02, 0.3), (-0.03, -0.5))
    assert ke.value == pytest.approx(sum(ke.terms.values()), abs=1e-13)
    assert np.isfinite(ke.value)


def test_multi_inclusion_single_hole_reduction(rng):
    one = DomainSpec("BallWithHoles", 0.05, centers=((0.0, 0.0, 0.0),))
    x = np.array([[0.5, 0.1, 0.0], [0.2, -0.3, 0.4]])
    y = np.array([[-0.2, 0.4, 0.3], [0.6, 0.1, -0.2]])
    np.testing.assert_allclose(evaluate("multi_inclusion_3d", one, x, y), evaluate("dirichlet_hole_3d", BH, x, y), atol=1e-13)


def test_multi_inclusion_pairing_symmetry():
    x, y = np.array([0.1, 0.4, 0.2]), np.array([-0.5, -0.2, 0.1])
    a = evaluate("multi_inclusion_3d", TWO, x, y)[0]
    b = evaluate("multi_inclusion_3d", TWO, y, x)[0]
    assert abs(a - b) <= 1e-12
    with pytest.raises(NotInPerforatedDomain):
        evaluate("multi_inclusion_3d", TWO, (0.3, 0.0, 0.01), y)


def test_singular_pairs():
    with pytest.raises(Singular):
        evaluate("dirichlet_hole_2d", DH, (0.5, 0.0), (0.5, 0.0))


def test_model_formulas_match_model_kernels(rng):
    x = rng.uniform(-0.5, 0.5, (10, 3))
    y = rng.uniform(-0.5, 0.5, (10, 3))
    np.testing.assert_allclose(evaluate("ball_green", None, x, y), UnitBall().green(x, y), atol=1e-15)
