"""Property-based checks of symmetries, identities and round trips."""
import csv
import io

import numpy as np
from hypothesis import assume, given
from hypothesis import strategies as st

from greenkernels.asymptotics import evaluate_terms, kernel_eval
from greenkernels.geometry import DomainSpec, contains, nearest_boundary_point
from greenkernels.model_kernels import ExteriorDisk, UnitBall, UnitDisk
from greenkernels.oracle import annulus_green, annulus_green_modal, truncated_sector_green
from greenkernels.validation import ErrorRow, ErrorTable, fit_rate

radius = st.floats(0.05, 0.9)
angle = st.floats(0.0, 2 * np.pi)


def polar(r, t):
    return np.array([r * np.cos(t), r * np.sin(t)])


@given(radius, angle, radius, angle)
def test_disk_kernels_symmetric(r1, t1, r2, t2):
    x, y = polar(r1, t1), polar(r2, t2)
    assume(np.linalg.norm(x - y) > 1e-3)
    D = UnitDisk()
    assert abs(D.green(x, y) - D.green(y, x)) <= 1e-12
    assert abs(D.neumann(x, y) - D.neumann(y, x)) <= 1e-10
    E = ExteriorDisk()
    assert abs(E.green(x / r1**2, y / r2**2) - E.green(y / r2**2, x / r1**2)) <= 1e-12


@given(st.lists(st.floats(-0.9, 0.9), min_size=6, max_size=6))
def test_ball_green_symmetric_and_positive(c):
    x, y = np.array(c[:3]), np.array(c[3:])
    assume(np.linalg.norm(x) < 0.95 and np.linalg.norm(y) < 0.95 and np.linalg.norm(x - y) > 1e-3)
    B = UnitBall()
    assert abs(B.green(x, y) - B.green(y, x)) <= 1e-10 * max(1.0, B.green(x, y))
    assert B.green(x, y) > 0


@given(st.sampled_from(["DD", "DN", "ND"]), st.floats(0.05, 0.3), st.floats(0.35, 0.95), angle, st.floats(0.35, 0.95), angle)
def test_annulus_resummed_matches_modal(bc, eps, r1, t1, r2, t2):
    x, y = polar(r1, t1), polar(r2, t2)
    assume(abs(r1 - r2) > 0.05)
    a, m = annulus_green(eps, bc, x, y), annulus_green_modal(eps, bc, x, y)
    assert abs(a - m) <= 1e-12
    assert abs(a - annulus_green(eps, bc, y, x)) <= 1e-12


@given(st.floats(0.3, 1.9 * np.pi), st.floats(0.02, 0.2), st.floats(0.3, 0.9), st.floats(0.05, 0.95), st.floats(0.3, 0.9), st.floats(0.05, 0.95))
def test_sector_symmetric_and_positive(alpha, eps, r1, s1, r2, s2):
    x, y = polar(r1, s1 * alpha), polar(r2, s2 * alpha)
    assume(np.linalg.norm(x - y) > 1e-2)
    g = truncated_sector_green(alpha, eps, x, y)
    assert g > 0
    assert abs(g - truncated_sector_green(alpha, eps, y, x)) <= 1e-12


FORMULA_DOMAINS = [
    ("dirichlet_hole_2d", DomainSpec("DiskWithHole", 0.05)),
    ("mixed_outerD_holeN", DomainSpec("DiskWithHole", 0.05)),
    ("mixed_outerN_holeD", DomainSpec("DiskWithHole", 0.05)),
    ("truncated_cone", DomainSpec("TruncatedSector", 0.05, alpha=3 * np.pi / 4)),
]


@given(st.sampled_from(FORMULA_DOMAINS), st.floats(0.15, 0.9), st.floats(0.05, 0.95), st.floats(0.15, 0.9), st.floats(0.05, 0.95))
def test_formula_terms_sum_and_swap(case, r1, s1, r2, s2):
    formula, spec = case
    span = spec.alpha if spec.variant == "TruncatedSector" else 2 * np.pi
    x, y = polar(r1, s1 * span), polar(r2, s2 * span)
    assume(np.linalg.norm(x - y) > 1e-2)
    ke = kernel_eval(formula, spec, x, y)
    assert abs(ke.value - sum(ke.terms.values())) <= 1e-13 * max(1.0, abs(ke.value))
    swapped = kernel_eval(formula, spec, y, x)
    assert abs(ke.value - swapped.value) <= 1e-10


@given(st.floats(0.02, 0.2), st.floats(0.2, 0.9), angle, st.floats(0.2, 0.9), angle)
def test_hadamard_terms_finite(eps, r1, t1, r2, t2):
    spec = DomainSpec("PerturbedDisk", eps, delta_cos=(1.0, 0.3))
    x, y = polar(r1 * (1 - 1.3 * eps), t1), polar(r2 * (1 - 1.3 * eps), t2)
    assume(np.linalg.norm(x - y) > 1e-2)
    terms = evaluate_terms("hadamard_auto", spec, x, y)
    assert all(np.all(np.isfinite(v)) for v in terms.values())


@given(st.floats(0.5, 5.0), st.floats(0.01, 100.0), st.integers(3, 6))
def test_fit_recovers_synthetic_exponent(p, c, n):
    eps = 0.32 / 2.0 ** np.arange(n)
    t = ErrorTable("synthetic", "none")
    for e in eps:
        v = c * e**p
        t.rows.append(ErrorRow(float(e), "all", 1, v, v, (0.0,), (0.0,)))
    fit = fit_rate(t, "all", p, 1e-9)
    assert abs(fit.slope - p) <= 1e-10
    assert fit.passed


@given(st.lists(st.floats(1e-300, 1e3, allow_nan=False), min_size=1, max_size=5))
def test_csv_numbers_round_trip(values):
    t = ErrorTable("f", "none", [ErrorRow(0.1, "all", 1, v, v, (v, -v), (0.5, 0.25)) for v in values])
    rows = list(csv.reader(io.StringIO(t.to_csv())))[1:]
    for row, v in zip(rows, values):
        assert float(row[4]) == v
        assert [float(s) for s in row[6].split()] == [v, -v]


@given(st.floats(0.01, 0.2), st.lists(st.floats(-0.3, 0.3), min_size=0, max_size=3), st.lists(st.floats(-0.3, 0.3), max_size=3))
def test_perturbed_disk_json_round_trip(eps, cos, sin):
    spec = DomainSpec("PerturbedDisk", eps, delta_cos=tuple([1.0] + cos), delta_sin=tuple(sin))
    assert DomainSpec.from_json(spec.to_json()) == spec


@given(st.floats(0.2, 0.85), angle)
def test_projection_is_nearest_among_scan(r, t):
    spec = DomainSpec("PerturbedDisk", 0.1, delta_cos=(1.0, 0.3), delta_sin=(0.0, 0.1))
    x = polar(r, t)
    assume(contains(spec, x[None])[0])
    res = nearest_boundary_point(spec, x)
    s = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
    d = 1 - 0.1 * (1 + 0.3 * np.cos(s) + 0.1 * np.sin(2 * s))
    scan = np.min(np.hypot(d * np.cos(s) - x[0], d * np.sin(s) - x[1]))
    assert res.rho <= scan + 1e-12
    assert res.rho >= scan - 1e-4
