"""Small array helpers shared by kernels and oracles."""
import numpy as np

from .errors import Singular


def pts(x):
    """Return ``x`` as a float array with coordinates on the last axis."""
    return np.asarray(x, dtype=float)


def dot(a, b):
    return np.sum(a * b, axis=-1)


def norm2(a):
    return np.sum(a * a, axis=-1)


def distinct(x, y, what="kernel"):
    """Raise :class:`Singular` if any pair coincides; return |x - y|^2."""
    d2 = norm2(pts(x) - pts(y))
    if np.any(d2 == 0):
        raise Singular(f"{what} evaluated at x == y")
    return d2


def scalar_or_array(v):
    v = np.asarray(v)
    return float(v) if v.ndim == 0 else v
