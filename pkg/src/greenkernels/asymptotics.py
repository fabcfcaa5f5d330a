"""Uniform asymptotic approximations of perturbed-domain Green's kernels.

Every evaluator builds a dictionary of named additive terms; the
approximation is their sum. Term functions are vectorized over pairs
(arrays of shape (P, n)); the public single-pair functions wrap them into
:class:`KernelEval` records.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ._arrays import distinct, dot, norm2
from .errors import (
    ConstraintViolated,
    DenominatorDegenerate,
    NotInPerforatedDomain,
    NotInRod,
    NotInTruncatedSector,
    OutsideStrip,
    QuadratureUnderResolved,
    ValidationFailure,
)
from .geometry import DomainSpec, as_point, curve, project_many
from .model_kernels import ModelKernelSet, model_kernel_set
from .model_kernels.sector import polar

DENOMINATOR_TOL = 1e-8
HADAMARD_TOL = 1e-8
HADAMARD_MAX_NODES = 1 << 16


@dataclass(frozen=True)
class KernelEval:
    value: float
    terms: dict
    formula: str
    x: tuple
    y: tuple
    epsilon: float
    notes: dict = field(default_factory=dict)


def _require(spec, *variants):
    if spec.variant not in variants:
        raise ValidationFailure(f"formula needs a {' or '.join(variants)} domain, got {spec.variant}")


def _pairs(dim, x, y):
    X = np.atleast_2d(np.asarray(x, dtype=float))
    Y = np.atleast_2d(np.asarray(y, dtype=float))
    if X.shape[-1] != dim or Y.shape[-1] != dim:
        raise ValidationFailure(f"points must have dimension {dim}")
    X, Y = np.broadcast_arrays(X, Y)
    distinct(X, Y, "asymptotic kernel")
    return X, Y


def _check_perforated(spec, *arrays):
    eps = spec.epsilon
    for P in arrays:
        if np.any(norm2(P) > 1 + 1e-12):
            raise NotInPerforatedDomain("point outside the outer boundary")
        for c in spec.hole_centers:
            if np.any(np.sqrt(norm2(P - c)) < eps * (1 - 1e-12)):
                raise NotInPerforatedDomain("point inside a hole")


# ---------------------------------------------------------------------------
# Regular perturbation of the unit disk


@lru_cache(maxsize=64)
def _normal_gap(spec: DomainSpec, m: int):
    """Distance from each unit-circle node to the perturbed boundary (= eps * delta_z)."""
    t = 2 * np.pi * np.arange(m) / m
    z = np.stack([np.cos(t), np.sin(t)], axis=-1)
    if spec.epsilon == 0:
        return z, np.zeros(m)
    _, rho = project_many(curve(spec, "perturbed"), z)
    return z, rho


def _normal_gap_at(spec, z):
    if spec.epsilon == 0:
        return np.zeros(len(z))
    return project_many(curve(spec, "perturbed"), z)[1]


def _unique_rows(X, Y):
    allp = np.concatenate([X, Y])
    u, inv = np.unique(allp, axis=0, return_inverse=True)
    inv = inv.ravel()
    return u, inv[: len(X)], inv[len(X) :]


def _hadamard_integral(spec, X, Y, m=None):
    """-eps * int dG/dnu(x,z) dG/dnu(z,y) delta_z ds_z with doubling until stable."""
    u, ix, iy = _unique_rows(X, Y)
    rho_min = np.min(1 - np.sqrt(norm2(u)))
    if m is None:
        m = 256
        while m * rho_min < 36 and m < HADAMARD_MAX_NODES // 2:
            m *= 2

    def integral(mm):
        z, gap = _normal_gap(spec, mm)
        w = gap * (2 * np.pi / mm)
        pk = (1 - norm2(u))[:, None] / (2 * np.pi * norm2(u[:, None, :] - z[None, :, :]))
        return -np.einsum("pk,pk->p", pk[ix] * w, pk[iy])

    a = integral(m)
    while True:
        b = integral(2 * m)
        if np.max(np.abs(a - b)) <= HADAMARD_TOL:
            return b, 2 * m
        if 4 * m > HADAMARD_MAX_NODES:
            raise QuadratureUnderResolved(f"Hadamard integral not converged at m={2 * m}")
        m, a = 2 * m, b


def _terms_hadamard_classical(spec, mk, X, Y, m=None):
    _require(spec, "PerturbedDisk")
    inside = np.concatenate([X, Y])
    if not np.all(np.sqrt(norm2(inside)) < 1 - spec.epsilon * spec.delta(np.arctan2(inside[:, 1], inside[:, 0]))):
        raise NotInPerforatedDomain("point outside the perturbed disk")
    g = mk.outer.green(X, Y)
    integ, _ = _hadamard_integral(spec, X, Y, m)
    return {"outer-green": np.asarray(g), "hadamard-integral": integ}


def _boundary_layer(spec, X, Y, d0):
    rx, ry = np.sqrt(norm2(X)), np.sqrt(norm2(Y))
    rho_x, rho_y = 1 - rx, 1 - ry
    if np.any(rho_x > d0) or np.any(rho_y > d0):
        raise OutsideStrip(f"a point is farther than d0={d0} from the boundary")
    zx, zy = X / rx[:, None], Y / ry[:, None]
    gx, gy = _normal_gap_at(spec, zx), _normal_gap_at(spec, zy)
    dz2 = norm2(zx - zy)
    s = rho_x + rho_y
    den = dz2 + s**2
    log_term = np.log((dz2 + (rho_x - gx + rho_y - gy) ** 2) / den) / (4 * np.pi)
    rat_term = (gx + gy) * s / den / (2 * np.pi)
    return log_term, rat_term


def _terms_hadamard_uniform(spec, mk, X, Y, m=None, d0=0.3):
    t = _terms_hadamard_classical(spec, mk, X, Y, m)
    lt, rt = _boundary_layer(spec, X, Y, d0)
    t["boundary-layer"] = lt
    t["boundary-layer-rational"] = rt
    return t


def _terms_hadamard_auto(spec, mk, X, Y, m=None, d0=0.3):
    """Uniform formula inside the strip {rho <= d0}, classical formula elsewhere."""
    t = _terms_hadamard_classical(spec, mk, X, Y, m)
    near = (1 - np.sqrt(norm2(X)) <= d0) & (1 - np.sqrt(norm2(Y)) <= d0)
    lt, rt = np.zeros(len(X)), np.zeros(len(X))
    if np.any(near):
        lt[near], rt[near] = _boundary_layer(spec, X[near], Y[near], d0)
    t["boundary-layer"] = lt
    t["boundary-layer-rational"] = rt
    return t


# ---------------------------------------------------------------------------
# Small holes


def _scaled(spec, X, c=None):
    c = spec.hole_centers[0] if c is None else c
    return (X - c) / spec.epsilon


def _terms_dirichlet_hole_3d(spec, mk, X, Y):
    _require(spec, "BallWithHole")
    _check_perforated(spec, X, Y)
    return _single_hole_3d_block(spec, mk, X, Y, spec.hole_centers[0], include_outer=True)


def _single_hole_3d_block(spec, mk, X, Y, c, include_outer):
    eps = spec.epsilon
    G, H = mk.outer.green, mk.outer.regular_part
    cap = mk.inner.capacity
    xi, eta = _scaled(spec, X, c), _scaled(spec, Y, c)
    Px, Py = mk.inner.capacitary_potential(xi), mk.inner.capacitary_potential(eta)
    Hxc, Hcy, Hcc = H(X, c), H(c, Y), H(c, c)
    t = {}
    if include_outer:
        t["outer-green"] = np.asarray(G(X, Y))
    t["inner-green"] = np.asarray(mk.inner.green(xi, eta)) / eps
    t["fundamental-compensator"] = -np.asarray(mk.outer.fundamental(X, Y))
    t["capacitary-x"] = Hcy * Px
    t["capacitary-y"] = Hxc * Py
    t["capacitary-cross-term"] = -Hcc * Px * Py
    t["capacity-term"] = -eps * cap * Hxc * Hcy
    return t


def _log_denominator(spec, mk, c):
    L = np.log(spec.epsilon) / (2 * np.pi)
    den = L + mk.outer.regular_part(c, c) - mk.inner.zeta_inf
    if abs(den) < DENOMINATOR_TOL:
        raise DenominatorDegenerate(f"log-capacity denominator {den:.3e} vanishes at epsilon={spec.epsilon}")
    return L, den


def _terms_dirichlet_hole_2d(spec, mk, X, Y):
    _require(spec, "DiskWithHole")
    _check_perforated(spec, X, Y)
    c = spec.hole_centers[0]
    eps = spec.epsilon
    H = mk.outer.regular_part
    xi, eta = _scaled(spec, X), _scaled(spec, Y)
    zx, zy, zinf = mk.inner.zeta(xi), mk.inner.zeta(eta), mk.inner.zeta_inf
    L, den = _log_denominator(spec, mk, c)
    return {
        "outer-green": np.asarray(mk.outer.green(X, Y)),
        "inner-green": np.asarray(mk.inner.green(xi, eta)),
        "log-compensator": np.log(np.sqrt(norm2(X - Y)) / eps) / (2 * np.pi),
        "capacity-rational": (L + zx - zinf + H(X, c)) * (L + zy - zinf + H(c, Y)) / den,
        "zeta-x": -zx,
        "zeta-y": -zy,
        "zeta-inf": np.full(len(X), zinf),
    }


def _terms_corollary_far(spec, mk, X, Y):
    _require(spec, "DiskWithHole", "BallWithHole")
    _check_perforated(spec, X, Y)
    c = spec.hole_centers[0]
    eps = spec.epsilon
    dmin = np.minimum(np.sqrt(norm2(X - c)), np.sqrt(norm2(Y - c)))
    if np.any(dmin <= 2 * eps):
        raise ConstraintViolated("far-field form needs min(|x|, |y|) > 2 epsilon")
    G = mk.outer.green
    Gxc, Gcy = np.asarray(G(X, c)), np.asarray(G(c, Y))
    t = {"outer-green": np.asarray(G(X, Y))}
    if spec.dim == 2:
        _, den = _log_denominator(spec, mk, c)
        t["capacity-rational"] = Gxc * Gcy / den
    else:
        t["capacity-term"] = -eps * mk.inner.capacity * Gxc * Gcy
    return t


def _terms_corollary_near(spec, mk, X, Y):
    _require(spec, "DiskWithHole", "BallWithHole")
    _check_perforated(spec, X, Y)
    c = spec.hole_centers[0]
    eps = spec.epsilon
    dmax = np.maximum(np.sqrt(norm2(X - c)), np.sqrt(norm2(Y - c)))
    if np.any(dmax >= 0.5):
        raise ConstraintViolated("near-field form needs max(|x|, |y|) < 1/2")
    xi, eta = _scaled(spec, X), _scaled(spec, Y)
    if spec.dim == 2:
        _, den = _log_denominator(spec, mk, c)
        return {
            "inner-green": np.asarray(mk.inner.green(xi, eta)),
            "capacity-rational": mk.inner.zeta(xi) * mk.inner.zeta(eta) / den,
        }
    P = mk.inner.capacitary_potential
    return {
        "inner-green": np.asarray(mk.inner.green(xi, eta)) / eps,
        "capacitary-cross-term": -mk.outer.regular_part(c, c) * (P(xi) - 1) * (P(eta) - 1),
    }


def _bilinear(a, M, b):
    return np.einsum("pi,ij,pj->p", a, M, b)


def _terms_mixed_outerD_holeN(spec, mk, X, Y):
    _require(spec, "DiskWithHole")
    _check_perforated(spec, X, Y)
    c = spec.hole_centers[0]
    eps = spec.epsilon
    xi, eta = _scaled(spec, X), _scaled(spec, Y)
    Dx, Dy = mk.inner.dipole_field(xi), mk.inner.dipole_field(eta)
    M = mk.outer.mixed_hessian_regular(c, c)
    return {
        "outer-green": np.asarray(mk.outer.green(X, Y)),
        "inner-neumann": np.asarray(mk.inner.neumann(xi, eta)),
        "log-compensator": np.log(np.sqrt(norm2(X - Y)) / eps) / (2 * np.pi),
        "dipole-x": eps * dot(Dx, mk.outer.grad_x_regular(c, Y)),
        "dipole-y": eps * dot(Dy, mk.outer.grad_y_regular(X, c)),
        "dipole-cross": -(eps**2) * _bilinear(Dx, M, Dy),
    }


def _terms_mixed_outerN_holeD(spec, mk, X, Y):
    _require(spec, "DiskWithHole")
    _check_perforated(spec, X, Y)
    c = spec.hole_centers[0]
    eps = spec.epsilon
    xi, eta = _scaled(spec, X), _scaled(spec, Y)
    Dx, Dy = mk.inner.dirichlet_field(xi), mk.inner.dirichlet_field(eta)
    M = mk.outer.mixed_hessian_neumann_regular(c, c)
    return {
        "inner-green": np.asarray(mk.inner.green(xi, eta)),
        "outer-neumann": np.asarray(mk.outer.neumann(X, Y)),
        "fundamental-compensator": np.log(norm2(X - Y)) / (4 * np.pi),
        "neumann-regular-constant": np.full(len(X), mk.outer.neumann_regular(c, c)),
        "dirichlet-field-y": eps * dot(Dy, mk.outer.grad_y_neumann_regular(X, c)),
        "dirichlet-field-x": eps * dot(Dx, mk.outer.grad_x_neumann_regular(c, Y)),
        "dirichlet-field-cross": -(eps**2) * _bilinear(Dx, M, Dy),
    }


# ---------------------------------------------------------------------------
# Thin rod and truncated cone


def _terms_thin_rod(spec, mk, X, Y):
    _require(spec, "ThinRodStrip")
    eps, a = spec.epsilon, spec.half_length
    half = eps * spec.width / 2
    for P in (X, Y):
        if np.any(np.abs(P[:, 0]) > half * (1 + 1e-12)) or np.any(np.abs(P[:, 1]) > a * (1 + 1e-12)):
            raise NotInRod("point outside the rod")
    sk = mk.strip
    w = sk.area
    av = np.array([0.0, a])
    zp, zm = sk.zeta_inf_plus, sk.zeta_inf_minus

    def shifted(P):
        return (P - av) / eps, (P + av) / eps, P / eps

    Xp, Xm, Xs = shifted(X)
    Yp, Ym, Ys = shifted(Y)

    def A(P, Pp, Pm):
        return P[:, 1] / (eps * w) - 0.5 * (zm - zp) + sk.zeta_plus(Pp) - sk.zeta_minus(Pm)

    sums = sk.zeta_plus(Xp) + sk.zeta_minus(Xm) + sk.zeta_plus(Yp) + sk.zeta_minus(Ym)
    pref = eps ** (2 - 2)
    return {
        "strip-plus": pref * np.asarray(sk.G_plus(Xp, Yp)),
        "strip-minus": pref * np.asarray(sk.G_minus(Xm, Ym)),
        "strip-infinite": -pref * np.asarray(sk.G_inf(Xs, Ys)),
        "rod-rational": -pref * eps * A(X, Xp, Xm) * A(Y, Yp, Ym) / (2 * a / w + eps * (zp + zm)),
        "rod-constant": pref * 0.25 * (2 * a / (eps * w) + zm + zp - 2 * sums),
    }


def _terms_truncated_cone(spec, mk, X, Y):
    _require(spec, "TruncatedSector")
    eps = spec.epsilon
    sk = mk.sector
    for P in (X, Y):
        r, th = polar(P)
        if np.any(r < eps * (1 - 1e-12)) or np.any(r > 1 + 1e-12) or np.any(th > spec.alpha + 1e-12):
            raise NotInTruncatedSector("point outside the truncated sector")
    n = 2
    lam = sk.eigen.lam
    Psi = sk.eigen.Psi
    xi, eta = X / eps, Y / eps
    (rx, tx), (ry, ty) = polar(X), polar(Y)
    inner_x = (rx / eps) ** lam * Psi(tx) - sk.Z_inf(xi)
    inner_y = (ry / eps) ** lam * Psi(ty) - sk.Z_inf(eta)
    outer_x = rx ** (2 - n - lam) * Psi(tx) - sk.Z_0(X)
    outer_y = ry ** (2 - n - lam) * Psi(ty) - sk.Z_0(Y)
    return {
        "sector-green": np.asarray(sk.G_0(X, Y)),
        "exterior-sector-green": eps ** (2 - n) * np.asarray(sk.G_inf(xi, eta)),
        "cone-compensator": -np.asarray(sk.G_cone(X, Y)),
        "eigen-correction": eps**lam / (2 * lam + n - 2) * (inner_x * outer_y + inner_y * outer_x),
    }


def _terms_multi_inclusion_3d(spec, mk, X, Y, pairing="ordered"):
    _require(spec, "BallWithHoles", "BallWithHole")
    _check_perforated(spec, X, Y)
    eps = spec.epsilon
    O = spec.hole_centers
    total = None
    for c in O:
        blk = _single_hole_3d_block(spec, mk, X, Y, c, include_outer=False)
        total = blk if total is None else {k: total[k] + blk[k] for k in total}
    t = {"outer-green": np.asarray(mk.outer.green(X, Y))}
    t.update(total)
    P = [mk.inner.capacitary_potential((X - c) / eps) for c in O]
    Q = [mk.inner.capacitary_potential((Y - c) / eps) for c in O]
    inter = np.zeros(len(X))
    for j in range(len(O)):
        for i in range(len(O)):
            if i == j:
                continue
            if pairing == "ordered":
                inter = inter + mk.outer.green(O[j], O[i]) * P[j] * Q[i]
            elif pairing == "unordered":
                if j < i:
                    inter = inter + 2 * mk.outer.green(O[j], O[i]) * P[j] * Q[i]
            else:
                raise ValidationFailure(f"unknown pairing {pairing!r}")
    t["interaction"] = inter
    return t


def _terms_disk_green(spec, mk, X, Y):
    from .model_kernels import UnitDisk

    return {"green": np.asarray(UnitDisk().green(X, Y))}


def _terms_ball_green(spec, mk, X, Y):
    from .model_kernels import UnitBall

    return {"green": np.asarray(UnitBall().green(X, Y))}


# formulas that need no domain description, with their dimension
MODEL_FORMULAS = {"disk_green": 2, "ball_green": 3}

FORMULAS = {
    "hadamard_classical": _terms_hadamard_classical,
    "hadamard_uniform": _terms_hadamard_uniform,
    "hadamard_auto": _terms_hadamard_auto,
    "dirichlet_hole_3d": _terms_dirichlet_hole_3d,
    "dirichlet_hole_2d": _terms_dirichlet_hole_2d,
    "corollary_far": _terms_corollary_far,
    "corollary_near": _terms_corollary_near,
    "mixed_outerD_holeN": _terms_mixed_outerD_holeN,
    "mixed_outerN_holeD": _terms_mixed_outerN_holeD,
    "thin_rod": _terms_thin_rod,
    "truncated_cone": _terms_truncated_cone,
    "multi_inclusion_3d": _terms_multi_inclusion_3d,
    "disk_green": _terms_disk_green,
    "ball_green": _terms_ball_green,
}


def evaluate_terms(formula: str, spec: DomainSpec | None, X, Y, mk: ModelKernelSet | None = None, **opts) -> dict:
    """Named term arrays of ``formula`` at the pairs (X[p], Y[p]).

    ``spec`` may be None for the unperturbed kernels ``disk_green`` and ``ball_green``.
    """
    if formula not in FORMULAS:
        raise ValidationFailure(f"unknown formula {formula!r}")
    if spec is None:
        if formula not in MODEL_FORMULAS:
            raise ValidationFailure(f"formula {formula!r} needs a domain")
        X, Y = _pairs(MODEL_FORMULAS[formula], X, Y)
        return FORMULAS[formula](None, None, X, Y)
    X, Y = _pairs(spec.dim, X, Y)
    mk = mk or model_kernel_set(spec, **_mk_opts(opts))
    return FORMULAS[formula](spec, mk, X, Y, **opts)


def _mk_opts(opts):
    out = {}
    if "normalization" in opts:
        out["normalization"] = opts.pop("normalization")
    return out


def sum_terms(terms: dict) -> np.ndarray:
    total = 0.0
    for v in terms.values():
        total = total + v
    return np.asarray(total)


def evaluate(formula: str, spec: DomainSpec, X, Y, mk=None, **opts) -> np.ndarray:
    return sum_terms(evaluate_terms(formula, spec, X, Y, mk, **opts))


def kernel_eval(formula: str, spec: DomainSpec | None, x, y, mk=None, **opts) -> KernelEval:
    dim = MODEL_FORMULAS.get(formula) if spec is None else spec.dim
    x, y = as_point(x, dim), as_point(y, dim)
    terms = {k: float(v[0]) for k, v in evaluate_terms(formula, spec, x, y, mk, **opts).items()}
    value = 0.0
    for v in terms.values():
        value += v
    return KernelEval(value, terms, formula, tuple(float(v) for v in x), tuple(float(v) for v in y), 0.0 if spec is None else float(spec.epsilon))


def _single(name):
    def fn(spec, x, y, mk=None, **opts):
        return kernel_eval(name, spec, x, y, mk, **opts)

    fn.__name__ = name
    fn.__doc__ = (FORMULAS[name].__doc__ or "") + f"\n\nSingle-pair form of the ``{name}`` formula."
    return fn


disk_green = _single("disk_green")
ball_green = _single("ball_green")
hadamard_classical = _single("hadamard_classical")
hadamard_uniform = _single("hadamard_uniform")
dirichlet_hole_3d = _single("dirichlet_hole_3d")
dirichlet_hole_2d = _single("dirichlet_hole_2d")
corollary_far = _single("corollary_far")
corollary_near = _single("corollary_near")
mixed_outerD_holeN = _single("mixed_outerD_holeN")
mixed_outerN_holeD = _single("mixed_outerN_holeD")
thin_rod = _single("thin_rod")
truncated_cone = _single("truncated_cone")
multi_inclusion_3d = _single("multi_inclusion_3d")
