"""Battery of structural checks: symmetry, boundary conditions, harmonicity,
far-field behaviour, hole-free limits and cross-oracle agreement.

Each check returns a :class:`Check` with the measured deviation and the
tolerance it is held to. :func:`run_checks` runs the whole battery.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import asymptotics
from .geometry import DomainSpec
from .model_kernels import ExteriorBall, ExteriorDisk, UnitBall, UnitDisk, sector_kernels, strip_kernels
from .oracle import (
    annulus_green,
    annulus_green_modal,
    boundary_integral_green,
    concentric_spheres_green,
    concentric_spheres_green_modal,
    multi_sphere_green,
    rectangle_mixed_green,
    rectangle_mixed_green_modal,
    truncated_sector_green,
    truncated_sector_green_modal,
)

FD_STEP = 1e-4
LAPLACE_STEP = 1e-3


@dataclass(frozen=True)
class Check:
    name: str
    group: str
    value: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value) and self.value <= self.tol)

    def to_dict(self) -> dict:
        return {"name": self.name, "group": self.group, "value": self.value, "tol": self.tol, "passed": self.passed}


def _max(a) -> float:
    return float(np.max(np.abs(np.asarray(a, dtype=float))))


# ---------------------------------------------------------------------------
# Point samplers


def _polar_pts(rng, n, r_lo, r_hi, th_lo=0.0, th_hi=2 * np.pi):
    r = rng.uniform(r_lo, r_hi, n)
    t = rng.uniform(th_lo, th_hi, n)
    return np.stack([r * np.cos(t), r * np.sin(t)], axis=-1)


def _ball_pts(rng, n, r_lo, r_hi):
    u = rng.normal(size=(n, 3))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    return u * rng.uniform(r_lo, r_hi, n)[:, None]


def _circle(n, r=1.0, phase=0.1):
    t = phase + 2 * np.pi * np.arange(n) / n
    return r * np.stack([np.cos(t), np.sin(t)], axis=-1)


def _sphere(rng, n, r=1.0, center=(0.0, 0.0, 0.0)):
    u = rng.normal(size=(n, 3))
    return np.asarray(center) + r * u / np.linalg.norm(u, axis=1, keepdims=True)


def _inward_derivative(f, z, n_in, h=FD_STEP):
    """One-sided second-order derivative of f along n_in at boundary points z."""
    return (-3 * f(z) + 4 * f(z + h * n_in) - f(z + 2 * h * n_in)) / (2 * h)


def _laplacian(f, x, h=LAPLACE_STEP):
    x = np.atleast_2d(x)
    dim = x.shape[1]
    total = -2 * dim * f(x)
    for k in range(dim):
        e = np.zeros(dim)
        e[k] = h
        total = total + f(x + e) + f(x - e)
    return total / h**2


def _swap(fn, X, Y):
    return _max(np.asarray(fn(X, Y)) - np.asarray(fn(Y, X)))


# ---------------------------------------------------------------------------
# Model kernels


def model_kernel_checks(rng) -> list:
    out = []
    D, B, ED, EB = UnitDisk(), UnitBall(), ExteriorDisk(), ExteriorBall()
    X, Y = _polar_pts(rng, 64, 0.05, 0.95), _polar_pts(rng, 64, 0.05, 0.95)
    Xb, Yb = _ball_pts(rng, 64, 0.05, 0.95), _ball_pts(rng, 64, 0.05, 0.95)
    Xe, Ye = _polar_pts(rng, 64, 1.05, 6.0), _polar_pts(rng, 64, 1.05, 6.0)
    Xeb, Yeb = _ball_pts(rng, 64, 1.05, 6.0), _ball_pts(rng, 64, 1.05, 6.0)
    out += [
        Check("disk green symmetry", "symmetry", _swap(D.green, X, Y), 1e-10),
        Check("ball green symmetry", "symmetry", _swap(B.green, Xb, Yb), 1e-10),
        Check("exterior disk green symmetry", "symmetry", _swap(ED.green, Xe, Ye), 1e-10),
        Check("exterior ball green symmetry", "symmetry", _swap(EB.green, Xeb, Yeb), 1e-10),
        Check("disk neumann symmetry", "symmetry", _swap(D.neumann, X, Y), 1e-10),
        Check("exterior disk neumann symmetry", "symmetry", _swap(ED.neumann, Xe, Ye), 1e-10),
    ]
    z = _circle(48)
    zb = _sphere(rng, 48)
    y0 = X[:48]
    out += [
        Check("disk green vanishes on circle", "boundary", _max(D.green(z, y0)), 1e-10),
        Check("ball green vanishes on sphere", "boundary", _max(B.green(zb, Xb[:48])), 1e-10),
        Check("exterior disk green vanishes on circle", "boundary", _max(ED.green(z, Xe[:48])), 1e-10),
        Check("exterior ball green vanishes on sphere", "boundary", _max(EB.green(zb, Xeb[:48])), 1e-10),
        Check("capacitary potential equals 1 on sphere", "boundary", _max(EB.capacitary_potential(zb) - 1), 1e-12),
    ]
    # Neumann data: d/dnu (N + log|x| / 2 pi) = 0 on the unit circle (outer normal)
    dn = _inward_derivative(lambda p: D.neumann(p, y0), z, -z)
    out.append(Check("disk neumann flux", "boundary", _max(-dn + 1 / (2 * np.pi)), 1e-6))
    dn = _inward_derivative(lambda p: ED.neumann(p, Xe[:48]), z, z)
    out.append(Check("exterior neumann flux on hole", "boundary", _max(dn), 1e-6))
    # dipole field: d D / d nu = nu, Dirichlet field equals xi on the circle
    for k in range(2):
        d = _inward_derivative(lambda p: ED.dipole_field(p)[:, k], z, z)
        out.append(Check(f"dipole field normal derivative [{k}]", "boundary", _max(d - z[:, k]), 1e-6))
    out.append(Check("dirichlet field equals xi on circle", "boundary", _max(ED.dirichlet_field(z) - z), 1e-12))
    # strip kernels: Neumann walls, Dirichlet end
    sk = strip_kernels(2.0)
    ys = np.array([0.3, -1.2])
    wall = np.stack([np.full(20, 1.0), np.linspace(-3, -0.1, 20)], axis=-1)
    out.append(
        Check(
            "strip kernel Neumann wall",
            "boundary",
            _max(_inward_derivative(lambda p: sk.G_plus(p, ys), wall, np.array([-1.0, 0.0]))),
            1e-6,
        )
    )
    end = np.stack([np.linspace(-0.9, 0.9, 20), np.zeros(20)], axis=-1)
    out.append(Check("strip kernel Dirichlet end", "boundary", _max(sk.G_plus(end, ys)), 1e-12))
    Xs = np.stack([rng.uniform(-1, 1, 32), rng.uniform(-3, -0.05, 32)], axis=-1)
    Ys = np.stack([rng.uniform(-1, 1, 32), rng.uniform(-3, -0.05, 32)], axis=-1)
    out.append(Check("strip kernel symmetry", "symmetry", _swap(sk.G_plus, Xs, Ys), 1e-10))
    # sector kernels
    for alpha in (np.pi / 2, 3 * np.pi / 4):
        sc = sector_kernels(alpha)
        Xa, Ya = _polar_pts(rng, 32, 0.05, 0.95, 0.02, alpha - 0.02), _polar_pts(rng, 32, 0.05, 0.95, 0.02, alpha - 0.02)
        rr = np.linspace(0.05, 0.95, 16)
        edges = np.concatenate(
            [
                np.stack([rr, 0 * rr], -1),
                np.stack([rr * np.cos(alpha), rr * np.sin(alpha)], -1),
                _polar_pts(rng, 16, 1.0, 1.0, 0.0, alpha),
            ]
        )
        y1 = Ya[:1].repeat(len(edges), 0)
        tag = f"alpha={alpha:.4f}"
        out += [
            Check(f"sector G_0 symmetry {tag}", "symmetry", _swap(sc.G_0, Xa, Ya), 1e-10),
            Check(f"sector G_0 vanishes on boundary {tag}", "boundary", _max(sc.G_0(edges, y1)), 1e-10),
            Check(
                f"sector G_inf vanishes on boundary {tag}",
                "boundary",
                _max(sc.G_inf(_exterior(edges), _exterior(y1))),
                1e-10,
            ),
        ]
    # harmonicity
    y1 = np.array([0.2, -0.1])
    xh = _polar_pts(rng, 16, 0.5, 0.9)
    out.append(Check("disk green harmonic", "harmonicity", _max(_laplacian(lambda p: D.green(p, y1), xh)), 1e-4))
    yb = np.array([0.1, 0.0, -0.2])
    xb = _ball_pts(rng, 16, 0.5, 0.9)
    out.append(Check("ball green harmonic", "harmonicity", _max(_laplacian(lambda p: B.green(p, yb), xb)), 1e-4))
    ye = np.array([1.5, 0.3])
    xe = _polar_pts(rng, 16, 2.5, 5.0)
    out.append(Check("exterior neumann harmonic", "harmonicity", _max(_laplacian(lambda p: ED.neumann(p, ye), xe)), 1e-4))
    sc = sector_kernels(3 * np.pi / 4)
    xa = _polar_pts(rng, 16, 0.3, 0.8, 0.3, 2.0)
    out.append(
        Check("sector G_0 harmonic", "harmonicity", _max(_laplacian(lambda p: sc.G_0(p, np.array([0.1, 0.05])), xa)), 1e-4)
    )
    # far field at radius 1e3
    R = 1e3
    u = _circle(16)
    eta = _polar_pts(rng, 16, 1.2, 3.0)
    xi = R * u
    lead = -np.log(R) / (2 * np.pi)
    grad = -xi / (2 * np.pi * R**2)
    asym = lead + np.sum((ED.dipole_field(eta) - eta) * grad, axis=-1)
    out.append(Check("exterior neumann far field", "far-field", _max((ED.neumann(xi, eta) - asym) / asym), 1e-4))
    z_asym = np.log(R) / (2 * np.pi) + ED.zeta_inf
    out.append(Check("zeta far field", "far-field", _max((ED.zeta(xi) - z_asym) / z_asym), 1e-4))
    xb = R * _sphere(rng, 16)
    out.append(
        Check(
            "capacitary potential far field",
            "far-field",
            _max(EB.capacitary_potential(xb) * R / (EB.capacity / (4 * np.pi)) - 1),
            1e-4,
        )
    )
    out.append(Check("dipole field decays", "far-field", _max(np.linalg.norm(ED.dipole_field(xi), axis=-1) * R - 1), 1e-4))
    return out


def _exterior(P):
    """Reflect points of the unit sector to the exterior sector (r -> 1/r)."""
    r2 = np.sum(P * P, axis=-1, keepdims=True)
    return P / r2


# ---------------------------------------------------------------------------
# Oracles


def oracle_checks(rng) -> list:
    out = []
    eps = 0.2
    X, Y = _polar_pts(rng, 48, eps + 0.02, 0.98), _polar_pts(rng, 48, eps + 0.02, 0.98)
    outer, inner = _circle(48), _circle(48, eps, 0.3)
    y0 = _polar_pts(rng, 48, 0.4, 0.9)
    for bc in ("DD", "DN", "ND"):
        g = lambda p, q, bc=bc: annulus_green(eps, bc, p, q)
        out.append(Check(f"annulus {bc} symmetry", "symmetry", _swap(g, X, Y), 1e-11))
        out.append(Check(f"annulus {bc} modal agreement", "cross-oracle", _max(g(X, Y) - annulus_green_modal(eps, bc, X, Y)), 1e-10))
        if bc[0] == "D":
            out.append(Check(f"annulus {bc} vanishes on outer circle", "boundary", _max(g(outer, y0)), 1e-12))
        else:
            dn = _inward_derivative(lambda p: g(p, y0), outer, -outer)
            out.append(Check(f"annulus {bc} Neumann on outer circle", "boundary", _max(dn), 1e-6))
        if bc[1] == "D":
            out.append(Check(f"annulus {bc} vanishes on hole", "boundary", _max(g(inner, y0)), 1e-12))
        else:
            dn = _inward_derivative(lambda p: g(p, y0), inner, inner / eps)
            out.append(Check(f"annulus {bc} Neumann on hole", "boundary", _max(dn), 1e-6))
    out.append(
        Check(
            "annulus harmonic",
            "harmonicity",
            _max(_laplacian(lambda p: annulus_green(eps, "DD", p, np.array([0.5, 0.0])), _polar_pts(rng, 8, 0.3, 0.9, 1.0, 5.0))),
            1e-4,
        )
    )
    # concentric spheres
    Xb, Yb = _ball_pts(rng, 48, eps + 0.02, 0.98), _ball_pts(rng, 48, eps + 0.02, 0.98)
    sg = lambda p, q: concentric_spheres_green(eps, p, q)
    out += [
        Check("spheres symmetry", "symmetry", _swap(sg, Xb, Yb), 1e-11),
        Check("spheres modal agreement", "cross-oracle", _max(sg(Xb, Yb) - concentric_spheres_green_modal(eps, Xb, Yb)), 1e-10),
        Check("spheres vanish on outer sphere", "boundary", _max(sg(_sphere(rng, 48), Yb)), 1e-12),
        Check("spheres vanish on hole", "boundary", _max(sg(_sphere(rng, 48, eps), Yb)), 1e-12),
    ]
    R = np.linalg.qr(rng.normal(size=(3, 3)))[0]
    out.append(Check("spheres rotation invariance", "symmetry", _max(sg(Xb, Yb) - sg(Xb @ R.T, Yb @ R.T)), 1e-12))
    # rectangle
    a, w, e = 0.25, 2.0, 0.1
    h = e * w
    Xr = np.stack([rng.uniform(-h / 2, h / 2, 48), rng.uniform(-a, a, 48)], -1)
    Yr = np.stack([rng.uniform(-h / 2, h / 2, 48), rng.uniform(-a, a, 48)], -1)
    rg = lambda p, q: rectangle_mixed_green(a, w, e, p, q)
    ends = np.stack([rng.uniform(-h / 2, h / 2, 24), np.repeat([-a, a], 12)], -1)
    side = np.stack([np.full(24, h / 2), rng.uniform(-a * 0.9, a * 0.9, 24)], -1)
    flip = np.array([-1.0, 1.0])
    out += [
        Check("rectangle symmetry", "symmetry", _swap(rg, Xr, Yr), 1e-11),
        Check("rectangle mirror symmetry", "symmetry", _max(rg(Xr, Yr) - rg(Xr * flip, Yr * flip)), 1e-11),
        Check("rectangle modal agreement", "cross-oracle", _max(rg(Xr, Yr) - rectangle_mixed_green_modal(a, w, e, Xr, Yr)), 1e-10),
        Check("rectangle vanishes on ends", "boundary", _max(rg(ends, Yr[:24])), 1e-12),
        Check(
            "rectangle Neumann sides",
            "boundary",
            _max(_inward_derivative(lambda p: rg(p, Yr[:24] * 0.5), side, np.array([-1.0, 0.0]), h=1e-5)),
            1e-6,
        ),
    ]
    # truncated sector
    for alpha in (np.pi / 2, 3 * np.pi / 4):
        tg = lambda p, q, al=alpha: truncated_sector_green(al, eps, p, q)
        Xa = _polar_pts(rng, 32, eps + 0.02, 0.98, 0.02, alpha - 0.02)
        Ya = _polar_pts(rng, 32, eps + 0.02, 0.98, 0.02, alpha - 0.02)
        rr = np.linspace(eps, 1.0, 10)
        pieces = np.concatenate(
            [
                np.stack([rr, 0 * rr], -1),
                np.stack([rr * np.cos(alpha), rr * np.sin(alpha)], -1),
                _polar_pts(rng, 10, 1.0, 1.0, 0.0, alpha),
                _polar_pts(rng, 10, eps, eps, 0.0, alpha),
            ]
        )
        tag = f"alpha={alpha:.4f}"
        out += [
            Check(f"sector oracle symmetry {tag}", "symmetry", _swap(tg, Xa, Ya), 1e-11),
            Check(f"sector oracle modal agreement {tag}", "cross-oracle", _max(tg(Xa, Ya) - truncated_sector_green_modal(alpha, eps, Xa, Ya)), 1e-10),
            Check(f"sector oracle vanishes on boundary {tag}", "boundary", _max(tg(pieces, Ya[:1].repeat(len(pieces), 0))), 1e-12),
        ]
    # boundary integral and multi-sphere solvers
    spec = DomainSpec(variant="DiskWithHole", epsilon=eps)
    Xs, Ys = _polar_pts(rng, 24, eps + 0.1, 0.9), _polar_pts(rng, 24, eps + 0.1, 0.9)
    out.append(
        Check(
            "boundary integral vs annulus series",
            "cross-oracle",
            _max(boundary_integral_green(spec, Xs, Ys) - annulus_green(eps, "DD", Xs, Ys)),
            1e-8,
        )
    )
    out.append(Check("boundary integral symmetry", "symmetry", _swap(lambda p, q: boundary_integral_green(spec, p, q), Xs, Ys), 1e-8))
    flat = DomainSpec(variant="PerturbedDisk", epsilon=0.0)
    Xd, Yd = _polar_pts(rng, 24, 0.0, 0.8), _polar_pts(rng, 24, 0.0, 0.8)
    out.append(
        Check(
            "boundary integral vs disk image formula (m=256)",
            "cross-oracle",
            _max(boundary_integral_green(flat, Xd, Yd, m=256) - UnitDisk().green(Xd, Yd)),
            1e-9,
        )
    )
    bumpy = DomainSpec(variant="PerturbedDisk", epsilon=0.05, delta_cos=(1.0, 0.3))
    t = np.linspace(0, 2 * np.pi, 24, endpoint=False)
    rb = (1 - 0.05 * bumpy.delta(t)) * (1 - 1e-12)
    zb = np.stack([rb * np.cos(t), rb * np.sin(t)], -1)
    out.append(
        Check(
            "boundary integral vanishes on perturbed boundary",
            "boundary",
            _max(boundary_integral_green(bumpy, zb, Xd[:24] * 0.8, m=512)),
            1e-8,
        )
    )
    Xm, Ym = _ball_pts(rng, 24, eps + 0.05, 0.95), _ball_pts(rng, 24, eps + 0.05, 0.95)
    out.append(
        Check(
            "multi-sphere (one hole) vs concentric spheres",
            "cross-oracle",
            _max(multi_sphere_green([[0.0, 0.0, 0.0]], eps, Xm, Ym) - concentric_spheres_green(eps, Xm, Ym)),
            1e-8,
        )
    )
    cen = [[0.3, 0.0, 0.0], [-0.3, 0.0, 0.0]]
    Xt = np.array([[0.0, 0.5, 0.1], [0.6, 0.2, -0.3], [-0.1, -0.4, 0.5]])
    Yt = np.array([[0.1, -0.6, 0.2], [-0.6, 0.1, 0.3], [0.2, 0.3, -0.6]])
    mg = lambda p, q: multi_sphere_green(cen, 0.08, p, q)
    hole = np.array(cen[0]) + 0.08 * _sphere(rng, 16) / 1.0
    out += [
        Check("multi-sphere symmetry", "symmetry", _swap(mg, Xt, Yt), 1e-10),
        Check("multi-sphere mirror symmetry", "symmetry", _max(mg(Xt, Yt) - mg(Xt * [-1, 1, 1], Yt * [-1, 1, 1])), 1e-10),
        Check("multi-sphere vanishes on a hole", "boundary", _max(mg(hole, Yt[:1].repeat(16, 0))), 1e-8),
        Check("multi-sphere vanishes on outer sphere", "boundary", _max(mg(_sphere(rng, 16), Yt[:1].repeat(16, 0))), 1e-8),
    ]
    # hole-free limits
    Xl, Yl = _polar_pts(rng, 24, 0.1, 0.9), _polar_pts(rng, 24, 0.1, 0.9)
    tiny = 1e-8
    D = UnitDisk()
    g0x, g0y = D.green(Xl, np.zeros(2)), D.green(np.zeros(2), Yl)
    log_cap = g0x * g0y / (np.log(tiny) / (2 * np.pi))
    out.append(
        Check(
            "annulus DD limit (with log-capacity term)",
            "limit",
            _max(annulus_green(tiny, "DD", Xl, Yl) - D.green(Xl, Yl) - log_cap),
            1e-7,
        )
    )
    out.append(Check("annulus DN limit", "limit", _max(annulus_green(tiny, "DN", Xl, Yl) - D.green(Xl, Yl)), 1e-7))
    Xb2, Yb2 = _ball_pts(rng, 24, 0.1, 0.9), _ball_pts(rng, 24, 0.1, 0.9)
    out.append(
        Check("spheres limit", "limit", _max(concentric_spheres_green(1e-6, Xb2, Yb2) - UnitBall().green(Xb2, Yb2)), 1e-5)
    )
    for alpha in (np.pi / 2, 3 * np.pi / 4):
        Xa = _polar_pts(rng, 16, 0.1, 0.9, 0.05, alpha - 0.05)
        Ya = _polar_pts(rng, 16, 0.1, 0.9, 0.05, alpha - 0.05)
        out.append(
            Check(
                f"truncated sector limit alpha={alpha:.4f}",
                "limit",
                _max(truncated_sector_green(alpha, 1e-8, Xa, Ya) - sector_kernels(alpha).G_0(Xa, Ya)),
                1e-6,
            )
        )
    return out


def annulus_dd_raw_limit(rng=None, tiny: float = 1e-8) -> float:
    """Deviation of the Dirichlet annulus kernel from the disk kernel at a tiny hole.

    It does not vanish: the log-capacity term G(x,0)G(0,y)/((2 pi)^-1 log eps)
    decays only like 1/|log eps|.
    """
    rng = rng or np.random.default_rng(0)
    Xl, Yl = _polar_pts(rng, 24, 0.1, 0.9), _polar_pts(rng, 24, 0.1, 0.9)
    return _max(annulus_green(tiny, "DD", Xl, Yl) - UnitDisk().green(Xl, Yl))


# ---------------------------------------------------------------------------
# Asymptotic formulas


def formula_cases():
    """(formula, spec, options, sampler) for every evaluator."""
    pd = DomainSpec(variant="PerturbedDisk", epsilon=0.05, delta_cos=(1.0, 0.3))
    dh = DomainSpec(variant="DiskWithHole", epsilon=0.05)
    dho = DomainSpec(variant="DiskWithHole", epsilon=0.05, center=(0.2, -0.1))
    bh = DomainSpec(variant="BallWithHole", epsilon=0.05)
    bhs = DomainSpec(variant="BallWithHoles", epsilon=0.05, centers=((0.3, 0, 0), (-0.3, 0, 0)))
    rod = DomainSpec(variant="ThinRodStrip", epsilon=0.1, half_length=0.25, width=2.0)
    sec = DomainSpec(variant="TruncatedSector", epsilon=0.1, alpha=3 * np.pi / 4)

    def annular(lo, hi, c=(0.0, 0.0)):
        return lambda rng, n: _polar_pts(rng, n, lo, hi) + np.asarray(c)

    def shell(lo, hi):
        return lambda rng, n: _ball_pts(rng, n, lo, hi)

    def rod_pts(rng, n):
        return np.stack([rng.uniform(-0.1, 0.1, n), rng.uniform(-0.25, 0.25, n)], -1)

    def far3(rng, n):
        P = _ball_pts(rng, 4 * n, 0.05, 0.9)
        d = np.min([np.linalg.norm(P - c, axis=1) for c in bhs.hole_centers], axis=0)
        return P[d > 0.06][:n]

    return [
        ("hadamard_classical", pd, {}, annular(0.0, 0.9)),
        ("hadamard_uniform", pd, {}, annular(0.75, 0.93)),
        ("hadamard_auto", pd, {}, annular(0.0, 0.93)),
        ("dirichlet_hole_2d", dh, {}, annular(0.06, 0.99)),
        ("dirichlet_hole_2d", dho, {}, annular(0.06, 0.6, (0.2, -0.1))),
        ("dirichlet_hole_3d", bh, {}, shell(0.06, 0.99)),
        ("corollary_far", dh, {}, annular(0.11, 0.99)),
        ("corollary_far", bh, {}, shell(0.11, 0.99)),
        ("corollary_near", dh, {}, annular(0.06, 0.49)),
        ("corollary_near", bh, {}, shell(0.06, 0.49)),
        ("mixed_outerD_holeN", dh, {}, annular(0.06, 0.99)),
        ("mixed_outerN_holeD", dh, {}, annular(0.06, 0.99)),
        ("thin_rod", rod, {}, rod_pts),
        ("truncated_cone", sec, {}, lambda rng, n: _polar_pts(rng, n, 0.11, 0.99, 0.0, 3 * np.pi / 4)),
        ("multi_inclusion_3d", bhs, {"pairing": "ordered"}, far3),
    ]


def formula_checks(rng) -> list:
    out = []
    for name, spec, opts, sampler in formula_cases():
        X, Y = sampler(rng, 32), sampler(rng, 32)
        n = min(len(X), len(Y))
        X, Y = X[:n], Y[:n]
        tol = 1e-12 if name == "multi_inclusion_3d" else 1e-10
        f = lambda p, q: asymptotics.evaluate(name, spec, p, q, **opts)
        label = spec.variant
        if spec.center is not None and np.any(spec.center):
            label += " off-centre"
        out.append(Check(f"{name} symmetry ({label})", "symmetry", _swap(f, X, Y), tol))
        ke = asymptotics.kernel_eval(name, spec, X[0], Y[0], **opts)
        out.append(Check(f"{name} term sum ({label})", "term-sum", abs(ke.value - sum(ke.terms.values())), 1e-13))
    # degenerate limits
    pd0 = DomainSpec(variant="PerturbedDisk", epsilon=1e-9, delta_cos=(1.0, 0.3))
    X, Y = _polar_pts(rng, 8, 0.0, 0.8), _polar_pts(rng, 8, 0.0, 0.8)
    integ = asymptotics.evaluate_terms("hadamard_classical", pd0, X, Y)["hadamard-integral"]
    out.append(Check("hadamard integral vanishes as eps -> 0", "limit", _max(integ), 1e-7))
    bh0 = DomainSpec(variant="BallWithHole", epsilon=1e-7)
    Xb, Yb = _ball_pts(rng, 8, 0.2, 0.9), _ball_pts(rng, 8, 0.2, 0.9)
    v = asymptotics.evaluate("dirichlet_hole_3d", bh0, Xb, Yb)
    out.append(Check("hole corrections vanish as eps -> 0 (3D)", "limit", _max(v - UnitBall().green(Xb, Yb)), 1e-5))
    one = DomainSpec(variant="BallWithHoles", epsilon=0.05, centers=((0.1, 0.2, -0.1),))
    single = DomainSpec(variant="BallWithHole", epsilon=0.05, center=(0.1, 0.2, -0.1))
    Xs, Ys = _ball_pts(rng, 32, 0.4, 0.95), _ball_pts(rng, 32, 0.4, 0.95)
    out.append(
        Check(
            "multi-inclusion N=1 reduction",
            "limit",
            _max(asymptotics.evaluate("multi_inclusion_3d", one, Xs, Ys) - asymptotics.evaluate("dirichlet_hole_3d", single, Xs, Ys)),
            1e-13,
        )
    )
    return out


GROUPS = {"model-kernels": model_kernel_checks, "oracles": oracle_checks, "formulas": formula_checks}


def run_checks(seed: int = 0, groups=None) -> list:
    """Run the invariant battery; deterministic for a given seed."""
    out = []
    for name in groups or GROUPS:
        out += GROUPS[name](np.random.default_rng([seed, list(GROUPS).index(name)]))
    return out
