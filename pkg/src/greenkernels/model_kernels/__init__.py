"""Model-problem solutions consumed by the asymptotic formulas."""
from dataclasses import dataclass
from typing import Any

from ..geometry import DomainSpec
from .ball import ExteriorBall, UnitBall, fundamental_3d
from .planar import ExteriorDisk, UnitDisk, fundamental_2d
from .sector import SectorEigen, SectorKernels, sector_kernels
from .strip import StripKernels, strip_kernels


@dataclass(frozen=True)
class ModelKernelSet:
    """Bundle of model kernels for one geometry.

    ``outer`` is the unperturbed domain (G, H, N, R), ``inner`` the
    hole model (exterior kernels, zeta, P, cap, fields), ``strip`` and
    ``sector`` the thin-rod and truncated-cone models.
    """

    outer: Any = None
    inner: Any = None
    strip: StripKernels | None = None
    sector: SectorKernels | None = None


def model_kernel_set(spec: DomainSpec, normalization: str = "l2", strip_method: str = "closed") -> ModelKernelSet:
    v = spec.variant
    if v in ("PerturbedDisk",):
        return ModelKernelSet(outer=UnitDisk())
    if v == "DiskWithHole":
        return ModelKernelSet(outer=UnitDisk(), inner=ExteriorDisk())
    if v in ("BallWithHole", "BallWithHoles"):
        return ModelKernelSet(outer=UnitBall(), inner=ExteriorBall())
    if v == "ThinRodStrip":
        return ModelKernelSet(strip=strip_kernels(spec.width, spec.ends, strip_method))
    return ModelKernelSet(sector=sector_kernels(spec.alpha, normalization))


__all__ = [
    "ExteriorBall",
    "ExteriorDisk",
    "ModelKernelSet",
    "SectorEigen",
    "SectorKernels",
    "StripKernels",
    "UnitBall",
    "UnitDisk",
    "fundamental_2d",
    "fundamental_3d",
    "model_kernel_set",
    "sector_kernels",
    "strip_kernels",
]
