"""Uniform asymptotic Green's kernels for singularly and regularly perturbed domains."""
from . import acceptance, asymptotics, geometry, invariants, model_kernels, oracle, validation
from .asymptotics import KernelEval, evaluate, evaluate_terms, kernel_eval
from .geometry import DomainSpec, GridPolicy, make_pair_grid

__version__ = "0.1.0"

__all__ = [
    "DomainSpec",
    "GridPolicy",
    "KernelEval",
    "acceptance",
    "asymptotics",
    "evaluate",
    "evaluate_terms",
    "geometry",
    "invariants",
    "kernel_eval",
    "make_pair_grid",
    "model_kernels",
    "oracle",
    "validation",
]
