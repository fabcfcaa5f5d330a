"""Points, perturbed-domain descriptions, boundary curves and pair grids.

All domains are normalized: the outer boundary is the unit circle/sphere
(or the unit arc for sectors), holes are scaled copies of the unit disk/ball
with radius ``epsilon``.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from typing import Iterator

import jsonschema
import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import (
    AmbiguousProjection,
    EmptyGrid,
    HolesOverlap,
    NotInDomain,
    UnsupportedBoundary,
    ValidationFailure,
)

VARIANTS = (
    "PerturbedDisk",
    "DiskWithHole",
    "BallWithHole",
    "BallWithHoles",
    "ThinRodStrip",
    "TruncatedSector",
)

SCAN_POINTS = 2048
BISECTION_STEPS = 40
TIE_TOL = 1e-10


def as_point(x, dim=None) -> np.ndarray:
    """Coerce ``x`` to a finite float vector, optionally checking its dimension."""
    p = np.asarray(x, dtype=float)
    if p.ndim != 1 or p.size not in (2, 3):
        raise ValidationFailure(f"point must be a vector of length 2 or 3, got shape {p.shape}")
    if dim is not None and p.size != dim:
        raise ValidationFailure(f"point has dimension {p.size}, domain has dimension {dim}")
    if not np.all(np.isfinite(p)):
        raise ValidationFailure("point has non-finite coordinates")
    return p


# ---------------------------------------------------------------------------
# Domain description

DOMAIN_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "DomainSpec",
    "type": "object",
    "properties": {
        "variant": {"enum": list(VARIANTS)},
        "epsilon": {"type": "number", "minimum": 0},
        "delta": {
            "type": "object",
            "properties": {
                "cos": {"type": "array", "items": {"type": "number"}},
                "sin": {"type": "array", "items": {"type": "number"}},
            },
            "additionalProperties": False,
        },
        "center": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 3},
        "centers": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3},
            "minItems": 1,
        },
        "half_length": {"type": "number", "exclusiveMinimum": 0},
        "width": {"type": "number", "exclusiveMinimum": 0},
        "ends": {"enum": ["flat"]},
        "alpha": {"type": "number", "exclusiveMinimum": 0},
    },
    "required": ["variant", "epsilon"],
    "additionalProperties": False,
}


@dataclass(frozen=True)
class DomainSpec:
    """Tagged description of a perturbed-domain configuration.

    PerturbedDisk: the disk r < 1 - epsilon * delta(theta), with
    ``delta`` a trigonometric polynomial, ``delta_cos[k]`` multiplying
    cos(k theta) and ``delta_sin[k]`` multiplying sin((k + 1) theta).
    DiskWithHole / BallWithHole: unit disk/ball minus the closed ball of
    radius epsilon at ``center``. BallWithHoles: unit ball minus balls of
    radius epsilon at ``centers``. ThinRodStrip: the rectangle
    |x_1| < epsilon * width / 2, |x_2| < half_length with Neumann sides and
    Dirichlet (flat) ends. TruncatedSector: epsilon < r < 1, 0 < theta < alpha.
    """

    variant: str
    epsilon: float
    delta_cos: tuple = (1.0,)
    delta_sin: tuple = ()
    center: tuple | None = None
    centers: tuple = ()
    half_length: float = 1.0
    width: float = 1.0
    ends: str = "flat"
    alpha: float = np.pi / 2

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValidationFailure(f"unknown variant {self.variant!r}")
        eps = float(self.epsilon)
        if not np.isfinite(eps) or eps < 0:
            raise ValidationFailure("epsilon must be a finite non-negative number")
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "delta_cos", tuple(float(c) for c in self.delta_cos))
        object.__setattr__(self, "delta_sin", tuple(float(c) for c in self.delta_sin))
        object.__setattr__(self, "centers", tuple(tuple(float(v) for v in c) for c in self.centers))
        if self.center is not None:
            object.__setattr__(self, "center", tuple(float(v) for v in self.center))
        getattr(self, "_check_" + self.variant)()

    # -- per-variant validation -------------------------------------------
    def _check_PerturbedDisk(self):
        th = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
        d = self.delta(th)
        if np.min(d) <= 0:
            raise ValidationFailure("delta(theta) must be positive")
        if np.max(self.epsilon * d) >= 1:
            raise ValidationFailure("epsilon * delta must stay below 1")

    def _check_hole(self, dim):
        if not 0 < self.epsilon < 0.5:
            raise ValidationFailure("epsilon must lie in (0, 1/2)")
        c = np.zeros(dim) if self.center is None else np.asarray(self.center)
        if c.size != dim:
            raise ValidationFailure(f"hole center must have {dim} coordinates")
        if np.linalg.norm(c) + self.epsilon >= 1:
            raise ValidationFailure("hole is not inside the unit domain")
        object.__setattr__(self, "center", tuple(float(v) for v in c))

    def _check_DiskWithHole(self):
        self._check_hole(2)

    def _check_BallWithHole(self):
        self._check_hole(3)

    def _check_BallWithHoles(self):
        if not self.centers:
            raise ValidationFailure("BallWithHoles needs at least one center")
        if self.epsilon <= 0:
            raise ValidationFailure("epsilon must be positive")
        c = np.asarray(self.centers)
        for j, cj in enumerate(c):
            if np.linalg.norm(cj) + self.epsilon >= 1:
                raise ValidationFailure(f"hole {j} is not inside the unit ball")
            for i in range(j):
                gap = np.linalg.norm(cj - c[i])
                if gap == 0:
                    raise ValidationFailure("hole centers must be pairwise distinct")
                if gap <= 2 * self.epsilon:
                    raise HolesOverlap(f"holes {i} and {j} overlap at epsilon={self.epsilon}")

    def _check_ThinRodStrip(self):
        if self.epsilon <= 0:
            raise ValidationFailure("epsilon must be positive")
        if self.half_length <= 0 or self.width <= 0:
            raise ValidationFailure("half_length and width must be positive")
        if self.ends != "flat":
            raise ValidationFailure("only flat rod ends are supported")

    def _check_TruncatedSector(self):
        if not 0 < self.alpha < 2 * np.pi:
            raise ValidationFailure("alpha must lie in (0, 2 pi)")
        if not 0 < self.epsilon < 1:
            raise ValidationFailure("epsilon must lie in (0, 1)")

    # -- derived quantities -----------------------------------------------
    @property
    def dim(self) -> int:
        return 3 if self.variant in ("BallWithHole", "BallWithHoles") else 2

    @property
    def hole_centers(self) -> np.ndarray:
        if self.variant == "BallWithHoles":
            return np.asarray(self.centers, dtype=float)
        if self.variant in ("DiskWithHole", "BallWithHole"):
            return np.asarray([self.center], dtype=float)
        return np.zeros((0, self.dim))

    def delta(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros_like(theta)
        for k, a in enumerate(self.delta_cos):
            out = out + a * np.cos(k * theta)
        for k, b in enumerate(self.delta_sin, start=1):
            out = out + b * np.sin(k * theta)
        return out

    def delta_prime(self, theta, order=1):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros_like(theta)
        for k, a in enumerate(self.delta_cos):
            out = out + a * k**order * np.cos(k * theta + order * np.pi / 2)
        for k, b in enumerate(self.delta_sin, start=1):
            out = out + b * k**order * np.sin(k * theta + order * np.pi / 2)
        return out

    def with_epsilon(self, eps: float) -> "DomainSpec":
        return replace(self, epsilon=eps)

    def contains(self, x, tol=0.0) -> bool:
        """Independent membership test: True iff ``x`` is inside the perturbed domain."""
        return bool(contains(self, np.asarray(x, dtype=float)[None, :], tol)[0])

    # -- serialization ----------------------------------------------------
    def to_dict(self) -> dict:
        d = {"variant": self.variant, "epsilon": self.epsilon}
        if self.variant == "PerturbedDisk":
            d["delta"] = {"cos": list(self.delta_cos), "sin": list(self.delta_sin)}
        elif self.variant in ("DiskWithHole", "BallWithHole"):
            d["center"] = list(self.center)
        elif self.variant == "BallWithHoles":
            d["centers"] = [list(c) for c in self.centers]
        elif self.variant == "ThinRodStrip":
            d.update(half_length=self.half_length, width=self.width, ends=self.ends)
        elif self.variant == "TruncatedSector":
            d["alpha"] = self.alpha
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "DomainSpec":
        try:
            jsonschema.validate(d, DOMAIN_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise ValidationFailure(f"invalid domain spec: {exc.message}") from exc
        kw = {k: v for k, v in d.items() if k != "delta"}
        if "delta" in d:
            kw["delta_cos"] = tuple(d["delta"].get("cos", ()))
            kw["delta_sin"] = tuple(d["delta"].get("sin", ()))
        if "centers" in kw:
            kw["centers"] = tuple(tuple(c) for c in kw["centers"])
        if "center" in kw:
            kw["center"] = tuple(kw["center"])
        return cls(**kw)

    @classmethod
    def from_json(cls, text: str) -> "DomainSpec":
        return cls.from_dict(json.loads(text))


def contains(spec: DomainSpec, pts: np.ndarray, tol: float = 0.0) -> np.ndarray:
    """Vectorized inside-test for the perturbed domain (strict, with margin ``tol``)."""
    pts = np.atleast_2d(pts)
    v, eps = spec.variant, spec.epsilon
    if v == "PerturbedDisk":
        r = np.hypot(pts[:, 0], pts[:, 1])
        th = np.arctan2(pts[:, 1], pts[:, 0])
        return r < 1 - eps * spec.delta(th) - tol
    if v == "ThinRodStrip":
        half = eps * spec.width / 2
        return (np.abs(pts[:, 0]) < half - tol) & (np.abs(pts[:, 1]) < spec.half_length - tol)
    if v == "TruncatedSector":
        r = np.hypot(pts[:, 0], pts[:, 1])
        th = np.mod(np.arctan2(pts[:, 1], pts[:, 0]), 2 * np.pi)
        return (r > eps + tol) & (r < 1 - tol) & (th > 0) & (th < spec.alpha)
    r = np.linalg.norm(pts, axis=1)
    ok = r < 1 - tol
    for c in spec.hole_centers:
        ok &= np.linalg.norm(pts - c, axis=1) > eps + tol
    return ok


# ---------------------------------------------------------------------------
# Boundaries


@dataclass(frozen=True)
class BoundaryPoint:
    location: np.ndarray
    normal: np.ndarray
    parameter: float | tuple
    weight: float = 0.0


@dataclass(frozen=True)
class BoundaryNodes:
    """Quadrature nodes on one boundary piece, stored as arrays.

    Iterating yields :class:`BoundaryPoint` objects.
    """

    points: np.ndarray
    normals: np.ndarray
    params: np.ndarray
    weights: np.ndarray
    closed: bool

    def __len__(self):
        return len(self.weights)

    def __getitem__(self, i) -> BoundaryPoint:
        p = self.params[i]
        return BoundaryPoint(self.points[i], self.normals[i], p if np.ndim(p) == 0 else tuple(p), self.weights[i])

    def __iter__(self) -> Iterator[BoundaryPoint]:
        for i in range(len(self)):
            yield self[i]

    @property
    def length(self) -> float:
        return float(np.sum(self.weights))


@dataclass(frozen=True)
class ClosedCurve:
    """Smooth closed planar curve parametrized over [0, 2 pi).

    ``normal_sign`` = +1 gives the normal pointing to the right of the
    tangent for a counter-clockwise curve, i.e. away from the enclosed region.
    """

    kind: str  # "radial" or "circle"
    center: tuple = (0.0, 0.0)
    radius: float = 1.0
    spec: DomainSpec | None = None
    normal_sign: float = 1.0

    def _radial(self, t, order=0):
        eps = self.spec.epsilon
        if order == 0:
            return 1 - eps * self.spec.delta(t)
        return -eps * self.spec.delta_prime(t, order)

    def point(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "circle":
            r = self.radius
        else:
            r = self._radial(t)
        return np.stack([self.center[0] + r * np.cos(t), self.center[1] + r * np.sin(t)], axis=-1)

    def deriv(self, t, order=1):
        t = np.asarray(t, dtype=float)
        c, s = np.cos(t), np.sin(t)
        if self.kind == "circle":
            r, r1, r2 = self.radius, 0.0, 0.0
        else:
            r, r1 = self._radial(t), self._radial(t, 1)
            r2 = self._radial(t, 2)
        if order == 1:
            return np.stack([r1 * c - r * s, r1 * s + r * c], axis=-1)
        return np.stack([r2 * c - 2 * r1 * s - r * c, r2 * s + 2 * r1 * c - r * s], axis=-1)

    def normal(self, t):
        d = self.deriv(t)
        n = np.stack([d[..., 1], -d[..., 0]], axis=-1)
        return self.normal_sign * n / np.linalg.norm(n, axis=-1, keepdims=True)

    def speed(self, t):
        return np.linalg.norm(self.deriv(t), axis=-1)

    def nodes(self, m: int) -> BoundaryNodes:
        t = 2 * np.pi * np.arange(m) / m
        w = self.speed(t) * 2 * np.pi / m
        return BoundaryNodes(self.point(t), self.normal(t), t, w, True)


def curve(spec: DomainSpec, which: str | None = None) -> ClosedCurve:
    """Return the closed boundary curve ``which`` of a planar domain."""
    v = spec.variant
    if v == "PerturbedDisk":
        which = which or "perturbed"
        if which == "outer":
            return ClosedCurve("circle")
        if which == "perturbed":
            return ClosedCurve("radial", spec=spec)
    elif v == "DiskWithHole":
        which = which or "outer"
        if which == "outer":
            return ClosedCurve("circle")
        if which == "hole":
            return ClosedCurve("circle", center=spec.center, radius=spec.epsilon, normal_sign=-1.0)
    raise UnsupportedBoundary(f"{v} has no closed boundary curve {which!r}")


def _gauss_segment(p0, p1, m):
    s, w = leggauss(m)
    p0, p1 = np.asarray(p0, float), np.asarray(p1, float)
    t = 0.5 * (s + 1)
    pts = p0 + t[:, None] * (p1 - p0)
    L = np.linalg.norm(p1 - p0)
    tang = (p1 - p0) / L
    return pts, tang, t, 0.5 * L * w


def _gauss_arc(radius, a0, a1, m):
    s, w = leggauss(m)
    th = a0 + 0.5 * (s + 1) * (a1 - a0)
    pts = radius * np.stack([np.cos(th), np.sin(th)], axis=-1)
    return pts, th, 0.5 * (a1 - a0) * radius * w


def sphere_nodes(center, radius, m, normal_sign=1.0) -> BoundaryNodes:
    """Gauss-Legendre (polar, ``m`` nodes) x trapezoid (azimuth, ``2m`` nodes) rule on a sphere."""
    x, wx = leggauss(m)
    nphi = 2 * m
    phi = 2 * np.pi * np.arange(nphi) / nphi
    ct = np.repeat(x, nphi)
    ph = np.tile(phi, m)
    st = np.sqrt(1 - ct**2)
    u = np.stack([st * np.cos(ph), st * np.sin(ph), ct], axis=-1)
    w = np.repeat(wx, nphi) * (2 * np.pi / nphi) * radius**2
    return BoundaryNodes(np.asarray(center) + radius * u, normal_sign * u, np.stack([np.arccos(ct), ph], -1), w, True)


def boundary_quadrature(spec: DomainSpec, which: str | None = None, m: int = 64) -> BoundaryNodes:
    """Quadrature nodes and weights on one boundary piece of ``spec``.

    Closed curves get the periodic trapezoid rule, open arcs and segments
    Gauss-Legendre, spheres a Gauss x trapezoid product rule (``m`` polar
    nodes). Normals point out of the perturbed domain.
    """
    if m < 16:
        raise ValidationFailure("boundary quadrature needs m >= 16")
    v = spec.variant
    if v in ("PerturbedDisk", "DiskWithHole"):
        return curve(spec, which).nodes(m)
    if v in ("BallWithHole", "BallWithHoles"):
        which = which or "outer"
        if which == "outer":
            return sphere_nodes(np.zeros(3), 1.0, m)
        if which.startswith("hole"):
            j = int(which[4:] or 0) if which != "hole" else 0
            if j >= len(spec.hole_centers):
                raise UnsupportedBoundary(f"no hole {j}")
            return sphere_nodes(spec.hole_centers[j], spec.epsilon, m, normal_sign=-1.0)
    if v == "TruncatedSector":
        a, eps = spec.alpha, spec.epsilon
        if which in ("arc_outer", "arc_inner"):
            r, sgn = (1.0, 1.0) if which == "arc_outer" else (eps, -1.0)
            pts, th, w = _gauss_arc(r, 0.0, a, m)
            nrm = sgn * pts / r
            return BoundaryNodes(pts, nrm, th, w, False)
        if which in ("edge_0", "edge_alpha"):
            ang = 0.0 if which == "edge_0" else a
            e = np.array([np.cos(ang), np.sin(ang)])
            pts, tang, t, w = _gauss_segment(eps * e, e, m)
            nrm = np.array([np.sin(ang), -np.cos(ang)]) * (1 if which == "edge_0" else -1)
            return BoundaryNodes(pts, np.tile(nrm, (m, 1)), t, w, False)
    if v == "ThinRodStrip":
        a, h = spec.half_length, spec.epsilon * spec.width / 2
        segs = {
            "end_plus": ((-h, a), (h, a), (0.0, 1.0)),
            "end_minus": ((h, -a), (-h, -a), (0.0, -1.0)),
            "side_plus": ((h, a), (h, -a), (1.0, 0.0)),
            "side_minus": ((-h, -a), (-h, a), (-1.0, 0.0)),
        }
        if which in segs:
            p0, p1, nrm = segs[which]
            pts, tang, t, w = _gauss_segment(p0, p1, m)
            return BoundaryNodes(pts, np.tile(nrm, (m, 1)), t, w, False)
    raise UnsupportedBoundary(f"{v} has no boundary {which!r}")


# ---------------------------------------------------------------------------
# Nearest-point projection


@dataclass(frozen=True)
class ProjectionResult:
    z_of_x: BoundaryPoint
    rho: float


def _refine(cv: ClosedCurve, x, t_lo, t_hi):
    """Bisection on d/dt |z(t) - x|^2 over brackets (vectorized)."""
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (t_lo + t_hi)
        g = np.sum((cv.point(mid) - x) * cv.deriv(mid), axis=-1)
        neg = g < 0
        t_lo = np.where(neg, mid, t_lo)
        t_hi = np.where(neg, t_hi, mid)
    return 0.5 * (t_lo + t_hi)


def project_many(cv: ClosedCurve, pts: np.ndarray, scan: int = SCAN_POINTS):
    """Nearest parameters and distances for many points (no tie detection)."""
    pts = np.atleast_2d(pts)
    ts = 2 * np.pi * np.arange(scan) / scan
    zs = cv.point(ts)
    h = 2 * np.pi / scan
    out_t = np.empty(len(pts))
    for s in range(0, len(pts), 512):
        blk = pts[s : s + 512]
        d2 = np.sum((blk[:, None, :] - zs[None, :, :]) ** 2, axis=-1)
        i = np.argmin(d2, axis=1)
        out_t[s : s + 512] = _refine(cv, blk, ts[i] - h, ts[i] + h)
    out_t = np.mod(out_t, 2 * np.pi)
    rho = np.linalg.norm(cv.point(out_t) - pts, axis=-1)
    return out_t, rho


def nearest_boundary_point(spec: DomainSpec, x, which: str | None = None) -> ProjectionResult:
    """Global nearest point on a closed boundary curve and the distance to it.

    A 2048-point parameter scan locates every local minimum of the distance,
    each is refined by 40 bisection steps on the derivative of the squared
    distance. Ties within 1e-10 raise :class:`AmbiguousProjection`; its
    ``choice`` is the candidate with the smallest parameter.
    """
    x = as_point(x, 2)
    if np.hypot(*x) > 1 + 1e-12:
        raise NotInDomain(f"{x} lies outside the outer boundary")
    cv = curve(spec, which)
    ts = 2 * np.pi * np.arange(SCAN_POINTS) / SCAN_POINTS
    h = ts[1]
    d = np.linalg.norm(cv.point(ts) - x, axis=-1)

    def result(t):
        z = cv.point(t)
        bp = BoundaryPoint(z, cv.normal(t), float(t))
        return ProjectionResult(bp, float(np.linalg.norm(z - x)))

    if d.max() - d.min() < TIE_TOL:
        choice = result(0.0)
        raise AmbiguousProjection(f"every point of the boundary is equidistant from {x}", ts, choice)
    is_min = (d <= np.roll(d, 1)) & (d < np.roll(d, -1))
    idx = np.flatnonzero(is_min)
    t_ref = np.mod(_refine(cv, x, ts[idx] - h, ts[idx] + h), 2 * np.pi)
    dist = np.linalg.norm(cv.point(t_ref) - x, axis=-1)
    best = dist.min()
    tied = np.sort(t_ref[dist - best < TIE_TOL])
    if len(tied) > 1:
        raise AmbiguousProjection(f"{len(tied)} nearest boundary points tie for {x}", tied, result(tied[0]))
    return result(t_ref[np.argmin(dist)])


# ---------------------------------------------------------------------------
# Pair grids

TAGS = ("interior", "near-outer-boundary", "near-hole", "coincidence-excluded")


@dataclass(frozen=True)
class GridPolicy:
    """Layout of an evaluation grid.

    ``spacing`` is the interior lattice step (2D), ``spacing_3d`` the shell
    step in 3D. Near-boundary layers sit at ``offsets`` * epsilon from each
    boundary; each layer holds ``anchors`` clusters of points separated by
    ``cluster`` * epsilon of arc length. Interior lattice points are kept
    when they are at least ``interior_margin`` from the boundaries of the
    reference configuration with epsilon = ``eps_ref`` (defaults to the
    spec's epsilon), so one interior set serves a whole epsilon sweep.
    ``bulk_offsets`` adds further layers (kind "bulk") deeper inside the
    domain; they count as interior and sample the inner edge of the region
    outside the boundary layers.
    """

    spacing: float = 0.15
    spacing_3d: float = 0.25
    offsets: tuple = (0.5, 1.0, 2.0)
    bulk_offsets: tuple = (4.0, 8.0)
    anchors: int = 4
    cluster: tuple = (-2.0, -1.0, 0.0, 1.0, 2.0)
    r_min: float | None = None
    interior_margin: float = 0.1
    eps_ref: float | None = None
    d0: float = 0.3
    seed: int = 0
    max_pairs: int | None = None

    def to_dict(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, d: dict) -> "GridPolicy":
        kw = {k: (tuple(v) if isinstance(v, list) else v) for k, v in d.items()}
        return cls(**kw)


@dataclass(frozen=True)
class PairGrid:
    """Point set with kind/offset metadata and the list of evaluation pairs.

    ``pairs`` indexes into ``points``; ``excluded`` holds the pairs dropped
    because |x - y| < r_min (tag ``coincidence-excluded``).
    """

    points: np.ndarray
    kinds: np.ndarray
    offsets: np.ndarray
    holes: np.ndarray
    pairs: np.ndarray
    tags: np.ndarray
    excluded: np.ndarray
    r_min: float
    spec: DomainSpec = field(repr=False, default=None)

    @property
    def x(self):
        return self.points[self.pairs[:, 0]]

    @property
    def y(self):
        return self.points[self.pairs[:, 1]]

    def __len__(self):
        return len(self.pairs)


def _fib_dirs(n, rot):
    k = np.arange(n) + 0.5
    ct = 1 - 2 * k / n
    ph = np.pi * (1 + 5**0.5) * k
    st = np.sqrt(1 - ct**2)
    u = np.stack([st * np.cos(ph), st * np.sin(ph), ct], axis=-1)
    return u @ rot.T


def _random_rotation(rng):
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    a, b, c, d = q
    return np.array(
        [
            [a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c)],
            [2 * (b * c + a * d), a * a - b * b + c * c - d * d, 2 * (c * d - a * b)],
            [2 * (b * d - a * c), 2 * (c * d + a * b), a * a - b * b - c * c + d * d],
        ]
    )


def _tangent_frame(u):
    ref = np.where(np.abs(u[:, [2]]) < 0.9, np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0]))
    t1 = np.cross(u, ref)
    return t1 / np.linalg.norm(t1, axis=1, keepdims=True)


def _circle_layer(center, radius, eps, pol, rng, angle_range=None):
    if angle_range is None:
        base = 2 * np.pi * (np.arange(pol.anchors) + rng.uniform()) / pol.anchors
    else:
        lo, hi = angle_range
        base = lo + (hi - lo) * (np.arange(pol.anchors) + 0.5) / pol.anchors
    ang = (base[:, None] + np.asarray(pol.cluster)[None, :] * eps / radius).ravel()
    if angle_range is not None:
        ang = ang[(ang > angle_range[0]) & (ang < angle_range[1])]
    return np.asarray(center) + radius * np.stack([np.cos(ang), np.sin(ang)], axis=-1)


def _sphere_layer(center, radius, eps, pol, rng):
    u = _fib_dirs(max(pol.anchors, 2) + 2, _random_rotation(rng))
    t1 = _tangent_frame(u)
    pts = []
    for c in pol.cluster:
        if abs(c) > 1:
            continue
        v = u + (c * eps / radius) * t1
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        pts.append(v)
    return np.asarray(center) + radius * np.concatenate(pts)


def _layer_kinds(pol):
    for o in pol.offsets:
        yield o, "near-outer", "near-hole"
    for o in pol.bulk_offsets:
        yield o, "bulk", "bulk"


def _layers_and_lattice(spec, pol, rng):
    eps = spec.epsilon
    eps_ref = max(pol.eps_ref if pol.eps_ref is not None else eps, eps)
    ref = spec.with_epsilon(eps_ref) if spec.variant != "ThinRodStrip" else spec
    pts, kinds, offs, holes = [], [], [], []

    def add(p, kind, off=np.nan, hole=-1):
        p = np.atleast_2d(p)
        pts.append(p)
        kinds.extend([kind] * len(p))
        offs.extend([off] * len(p))
        holes.extend([hole] * len(p))

    v = spec.variant
    if v in ("PerturbedDisk", "DiskWithHole", "TruncatedSector"):
        h = pol.spacing
        lat = []
        for r in np.arange(h, 1.0, h):
            if v == "TruncatedSector":
                n = max(2, int(round(spec.alpha * r / h)))
                th = spec.alpha * (np.arange(n) + 0.5) / n
            else:
                n = max(1, int(round(2 * np.pi * r / h)))
                th = 2 * np.pi * (np.arange(n) + rng.uniform()) / n
            lat.append(r * np.stack([np.cos(th), np.sin(th)], axis=-1))
        lat = np.concatenate(lat)
        lat = lat[contains(ref, lat, pol.interior_margin)]
        add(lat, "lattice")
        for o, kind_out, kind_hole in _layer_kinds(pol):
            if v == "PerturbedDisk":
                q = _circle_layer((0.0, 0.0), 1.0, eps, pol, rng)
                th = np.arctan2(q[:, 1], q[:, 0])
                r = 1 - eps * spec.delta(th) - o * eps
                if np.all(r > 0):
                    add(r[:, None] * np.stack([np.cos(th), np.sin(th)], -1), kind_out, o)
            elif v == "DiskWithHole":
                if 1 - o * eps > 0:
                    add(_circle_layer((0.0, 0.0), 1 - o * eps, eps, pol, rng), kind_out, o)
                add(_circle_layer(spec.center, eps * (1 + o), eps, pol, rng), kind_hole, o, 0)
            else:
                rng_ang = (0.0, spec.alpha)
                if 1 - o * eps > eps:
                    add(_circle_layer((0.0, 0.0), 1 - o * eps, eps, pol, rng, rng_ang), kind_out, o)
                add(_circle_layer((0.0, 0.0), eps * (1 + o), eps, pol, rng, rng_ang), kind_hole, o, 0)
    elif v in ("BallWithHole", "BallWithHoles"):
        h = pol.spacing_3d
        lat = []
        for r in np.arange(h, 1.0, h):
            n = max(4, int(round(4 * np.pi * r**2 / h**2)))
            lat.append(r * _fib_dirs(n, _random_rotation(rng)))
        lat = np.concatenate(lat)
        lat = lat[contains(ref, lat, pol.interior_margin)]
        add(lat, "lattice")
        for o, kind_out, kind_hole in _layer_kinds(pol):
            if 1 - o * eps > 0:
                add(_sphere_layer(np.zeros(3), 1 - o * eps, eps, pol, rng), kind_out, o)
            for j, c in enumerate(spec.hole_centers):
                add(_sphere_layer(c, eps * (1 + o), eps, pol, rng), kind_hole, o, j)
    elif v == "ThinRodStrip":
        a, half = spec.half_length, eps * spec.width / 2
        across = half * np.array([-0.75, -0.25, 0.25, 0.75])
        along = a * np.linspace(-1, 1, 9)[1:-1]
        add(np.array([(s, t) for t in along for s in across]), "lattice")
        for o, kind_out, _ in _layer_kinds(pol):
            if a - o * eps <= 0:
                continue
            for sgn in (1.0, -1.0):
                add(np.array([(s, sgn * (a - o * eps)) for s in across]), kind_out, o)
    pts = np.concatenate(pts)
    kinds = np.asarray(kinds)
    keep = contains(spec, pts)
    return pts[keep], kinds[keep], np.asarray(offs)[keep], np.asarray(holes)[keep]


def make_pair_grid(spec: DomainSpec, layout: GridPolicy | None = None) -> PairGrid:
    """Build the evaluation pairs for ``spec`` (deterministic given ``layout.seed``)."""
    pol = layout or GridPolicy()
    rng = np.random.default_rng(pol.seed)
    r_min = pol.r_min if pol.r_min is not None else max(1e-3, spec.epsilon / 10)
    pts, kinds, offs, holes = _layers_and_lattice(spec, pol, rng)
    i, j = np.triu_indices(len(pts), k=1)
    dist = np.linalg.norm(pts[i] - pts[j], axis=1)
    ok = dist >= r_min
    pairs = np.stack([i[ok], j[ok]], axis=1)
    excluded = np.stack([i[~ok], j[~ok]], axis=1)
    if pol.max_pairs is not None and len(pairs) > pol.max_pairs:
        sel = np.sort(rng.choice(len(pairs), pol.max_pairs, replace=False))
        pairs = pairs[sel]
    if len(pairs) == 0:
        raise EmptyGrid(f"no admissible pairs for {spec.variant} with r_min={r_min}")
    kx, ky = kinds[pairs[:, 0]], kinds[pairs[:, 1]]
    tags = np.where(
        (kx == "near-hole") | (ky == "near-hole"),
        "near-hole",
        np.where((kx == "near-outer") | (ky == "near-outer"), "near-outer-boundary", "interior"),
    )
    return PairGrid(pts, kinds, offs, holes, pairs, tags.astype(object), excluded, r_min, spec)
