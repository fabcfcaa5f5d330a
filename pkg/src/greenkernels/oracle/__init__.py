"""Independent reference solvers for the exact perturbed-domain Green's functions.

None of these modules import the model kernels: every solver builds its own
representation (resummed separable series, Nystrom boundary integrals,
multipole reflections) so that comparisons against the asymptotic formulas
are meaningful.
"""
import numpy as np

from ..errors import UnsupportedBoundary
from ..geometry import DomainSpec
from .annulus import BCS, annulus_green, annulus_green_modal, annulus_oracle
from .base import OracleSolution
from .bie import BoundaryIntegralSolver, boundary_integral_green, boundary_integral_oracle
from .multisphere import MultiSphereSolver, multi_sphere_green, multi_sphere_oracle
from .rectangle import rectangle_mixed_green, rectangle_mixed_green_modal, rectangle_oracle
from .sector import truncated_sector_green, truncated_sector_green_modal, truncated_sector_oracle
from .spheres import concentric_spheres_green, concentric_spheres_green_modal, concentric_spheres_oracle

# boundary conditions (outer, hole) of the true kernel each formula approximates
FORMULA_BC = {
    "mixed_outerD_holeN": "DN",
    "mixed_outerN_holeD": "ND",
}


def _concentric(spec):
    return spec.center is None or np.allclose(spec.center, 0.0)


def oracle_for(formula: str, spec: DomainSpec) -> OracleSolution:
    """Reference solver for the exact kernel that ``formula`` approximates on ``spec``."""
    v = spec.variant
    eps = spec.epsilon
    if v == "PerturbedDisk":
        return boundary_integral_oracle(spec)
    if v == "DiskWithHole":
        bc = FORMULA_BC.get(formula, "DD")
        if _concentric(spec):
            return annulus_oracle(eps, bc)
        if bc != "DD":
            raise UnsupportedBoundary("mixed conditions are only available for a concentric hole")
        return boundary_integral_oracle(spec)
    if v == "BallWithHole":
        if _concentric(spec):
            return concentric_spheres_oracle(eps)
        return multi_sphere_oracle(spec.hole_centers, eps)
    if v == "BallWithHoles":
        return multi_sphere_oracle(spec.hole_centers, eps)
    if v == "ThinRodStrip":
        return rectangle_oracle(spec.half_length, spec.width, eps)
    if v == "TruncatedSector":
        return truncated_sector_oracle(spec.alpha, eps)
    raise UnsupportedBoundary(f"no oracle for {v}")


__all__ = [
    "BCS",
    "BoundaryIntegralSolver",
    "MultiSphereSolver",
    "OracleSolution",
    "annulus_green",
    "annulus_green_modal",
    "annulus_oracle",
    "boundary_integral_green",
    "boundary_integral_oracle",
    "concentric_spheres_green",
    "concentric_spheres_green_modal",
    "concentric_spheres_oracle",
    "multi_sphere_green",
    "multi_sphere_oracle",
    "oracle_for",
    "rectangle_mixed_green",
    "rectangle_mixed_green_modal",
    "rectangle_oracle",
    "truncated_sector_green",
    "truncated_sector_green_modal",
    "truncated_sector_oracle",
]
