"""Epsilon sweeps, convergence-rate fits and uniformity ratios."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import asymptotics
from .errors import (
    GreenKernelError,
    InsufficientData,
    MissingStratum,
    ValidationFailure,
    ZeroError,
)
from .geometry import DomainSpec, GridPolicy, make_pair_grid
from .oracle import oracle_for

NEAR_TAGS = ("near-outer-boundary", "near-hole")
CSV_COLUMNS = ("formula", "eps", "stratum", "n_pairs", "sup_err", "mean_err", "argmax_x", "argmax_y")


@dataclass(frozen=True)
class ErrorRow:
    eps: float
    stratum: str
    n_pairs: int
    sup_err: float
    mean_err: float
    argmax_x: tuple
    argmax_y: tuple


@dataclass
class ErrorTable:
    formula: str
    oracle_method: str
    rows: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    def strata(self):
        return list(dict.fromkeys(r.stratum for r in self.rows))

    def select(self, stratum: str):
        out = [r for r in self.rows if r.stratum == stratum]
        if not out:
            raise MissingStratum(f"stratum {stratum!r} not in table (have {self.strata()})")
        return out

    def sup(self, stratum: str) -> dict:
        return {r.eps: r.sup_err for r in self.select(stratum)}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow(
                [
                    self.formula,
                    _g17(r.eps),
                    r.stratum,
                    r.n_pairs,
                    _g17(r.sup_err),
                    _g17(r.mean_err),
                    " ".join(_g17(v) for v in r.argmax_x),
                    " ".join(_g17(v) for v in r.argmax_y),
                ]
            )
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "formula": self.formula,
            "oracle_method": self.oracle_method,
            "rows": [
                {
                    "eps": r.eps,
                    "stratum": r.stratum,
                    "n_pairs": r.n_pairs,
                    "sup_err": r.sup_err,
                    "mean_err": r.mean_err,
                    "argmax_x": list(r.argmax_x),
                    "argmax_y": list(r.argmax_y),
                }
                for r in self.rows
            ],
            "notes": _jsonable(self.notes),
        }


def _g17(v) -> str:
    return format(float(v), ".17g")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


# ---------------------------------------------------------------------------
# Strata

Stratum = Callable[[np.ndarray, np.ndarray, object, float], np.ndarray]


def tag_stratum(*tags) -> Stratum:
    def pred(X, Y, grid, eps):
        return np.isin(grid.tags, tags)

    return pred


def all_pairs(X, Y, grid, eps):
    return np.ones(len(X), dtype=bool)


def distance_from_holes(P, spec):
    c = spec.hole_centers
    return np.min(np.linalg.norm(P[:, None, :] - c[None, :, :], axis=-1), axis=1)


def min_hole_distance_at_least(r: float) -> Stratum:
    """Pairs whose points are both at least ``r`` from every hole centre."""

    def pred(X, Y, grid, eps):
        s = grid.spec
        return np.minimum(distance_from_holes(X, s), distance_from_holes(Y, s)) >= r

    return pred


def min_hole_distance_equal(multiple: float, rtol: float = 1e-9) -> Stratum:
    """Pairs with min(|x - O|, |y - O|) = multiple * eps."""

    def pred(X, Y, grid, eps):
        s = grid.spec
        d = np.minimum(distance_from_holes(X, s), distance_from_holes(Y, s))
        return np.isclose(d, multiple * eps, rtol=rtol, atol=0)

    return pred


def boundary_offset_equal(offset: float) -> Stratum:
    """Pairs whose two points both lie on the near-boundary layer at ``offset`` * eps."""

    def pred(X, Y, grid, eps):
        i, j = grid.pairs[:, 0], grid.pairs[:, 1]
        return np.isclose(grid.offsets[i], offset) & np.isclose(grid.offsets[j], offset)

    return pred


def kind_stratum(kind: str) -> Stratum:
    """Pairs whose two points both have grid kind ``kind``."""

    def pred(X, Y, grid, eps):
        k = grid.kinds
        return (k[grid.pairs[:, 0]] == kind) & (k[grid.pairs[:, 1]] == kind)

    return pred


DEFAULT_STRATA = {
    "all": all_pairs,
    "interior": tag_stratum("interior"),
    "near-outer-boundary": tag_stratum("near-outer-boundary"),
    "near-hole": tag_stratum("near-hole"),
    "near": tag_stratum(*NEAR_TAGS),
    "lattice": kind_stratum("lattice"),
}


def _check_eps_list(eps_list):
    eps = [float(e) for e in eps_list]
    if len(eps) < 3:
        raise ValidationFailure("eps list must have length ≥ 3")
    eps = sorted(eps, reverse=True)
    ratios = np.array(eps[:-1]) / np.array(eps[1:])
    if not np.allclose(ratios, 2.0, rtol=1e-9):
        raise ValidationFailure("eps list must be dyadic (successive ratio 2)")
    if eps[-1] <= 0:
        raise ValidationFailure("eps values must be positive")
    return eps


def _locate_failure(formula, spec, X, Y, opts, exc):
    for k in range(len(X)):
        try:
            asymptotics.evaluate(formula, spec, X[k], Y[k], **dict(opts))
        except GreenKernelError as e:
            return f"{e} (pair x={X[k].tolist()}, y={Y[k].tolist()})"
    return str(exc)


def error_sweep(
    formula: str,
    spec: DomainSpec,
    eps_list,
    policy: GridPolicy | None = None,
    strata: dict | None = None,
    formula_opts: dict | None = None,
    oracle_factory=None,
) -> ErrorTable:
    """Errors of ``formula`` against the matching oracle over a pair grid per epsilon.

    The interior lattice is fixed across the sweep (built for the largest
    epsilon); near-boundary layers follow each epsilon.
    """
    eps_list = _check_eps_list(eps_list)
    policy = policy or GridPolicy()
    policy = replace(policy, eps_ref=max(eps_list) if policy.eps_ref is None else policy.eps_ref)
    strata = strata if strata is not None else DEFAULT_STRATA
    opts = formula_opts or {}
    factory = oracle_factory or (lambda s: oracle_for(formula, s))
    table = None
    acc = {}
    for eps in eps_list:
        s = spec.with_epsilon(eps)
        grid = make_pair_grid(s, policy)
        X, Y = grid.x, grid.y
        try:
            approx = asymptotics.evaluate(formula, s, X, Y, **dict(opts))
        except GreenKernelError as e:
            if not _simple_ctor(e):
                raise
            raise type(e)(_locate_failure(formula, s, X, Y, opts, e)) from e
        orc = factory(s)
        exact = orc.at_pairs(grid.points, grid.pairs)
        acc[eps] = getattr(orc, "last_accuracy", orc.accuracy)
        if table is None:
            table = ErrorTable(formula, orc.method)
        err = np.abs(approx - exact)
        if not np.all(np.isfinite(err)):
            raise ValidationFailure(f"non-finite error at eps={eps}")
        for name, pred in strata.items():
            mask = np.asarray(pred(X, Y, grid, eps), dtype=bool)
            if not mask.any():
                continue
            e = err[mask]
            k = int(np.argmax(e))
            table.rows.append(
                ErrorRow(
                    eps,
                    name,
                    int(mask.sum()),
                    float(e[k]),
                    float(e.mean()),
                    tuple(float(v) for v in X[mask][k]),
                    tuple(float(v) for v in Y[mask][k]),
                )
            )
    table.notes["oracle_accuracy"] = acc
    table.notes["policy"] = policy.to_dict()
    return table


def _simple_ctor(e):
    try:
        type(e)("probe")
        return True
    except TypeError:
        return False


# ---------------------------------------------------------------------------
# Rate fits


@dataclass(frozen=True)
class RateFit:
    stratum: str
    slope: float
    intercept: float
    correlation: float
    expected: object
    band: float
    passed: bool
    eps: tuple = ()
    errors: tuple = ()
    local_slopes: tuple = ()
    inverse_eps_correlation: float = float("nan")

    def to_dict(self) -> dict:
        return _jsonable(self.__dict__)


def _loglog(eps, err):
    le, lr = np.log(eps), np.log(err)
    slope, intercept = np.polyfit(le, lr, 1)
    corr = float(np.corrcoef(le, lr)[0, 1])
    return float(slope), float(intercept), corr


def fit_rate(table: ErrorTable, stratum: str = "all", expected=None, band: float = 0.3) -> RateFit:
    """Least-squares slope of log(sup error) against log(eps).

    ``expected`` is a number (pass iff |slope - expected| <= band) or
    "super-polynomial" (pass iff the local slopes increase as eps shrinks
    and log error against 1/eps has correlation <= -0.99).
    """
    rows = sorted(table.select(stratum), key=lambda r: -r.eps)
    if len(rows) < 3:
        raise InsufficientData(f"stratum {stratum!r} has {len(rows)} rows; need at least 3")
    eps = np.array([r.eps for r in rows])
    err = np.array([r.sup_err for r in rows])
    if np.all(err == 0):
        raise ZeroError(f"all errors in stratum {stratum!r} are zero; the formula is exact there")
    if np.any(err <= 0):
        raise InsufficientData("some sup errors are zero; cannot fit a power law")
    slope, intercept, corr = _loglog(eps, err)
    local = tuple(float(v) for v in np.diff(np.log(err)) / np.diff(np.log(eps)))
    inv_corr = float(np.corrcoef(1 / eps, np.log(err))[0, 1])
    if expected is None:
        passed = True
    elif expected == "super-polynomial":
        passed = bool(np.all(np.diff(local) > 0) and inv_corr <= -0.99)
    else:
        passed = bool(abs(slope - float(expected)) <= band)
    return RateFit(stratum, slope, intercept, corr, expected, band, passed, tuple(eps), tuple(err), local, inv_corr)


def uniformity_ratio(table: ErrorTable, near=NEAR_TAGS, interior: str = "interior") -> dict:
    """sup error over the near-boundary strata divided by the interior sup error, per eps."""
    present = set(table.strata())
    if interior not in present:
        raise MissingStratum(f"table has no {interior!r} stratum")
    near = [n for n in near if n in present]
    if not near:
        raise MissingStratum("table has no near-boundary stratum")
    inner = table.sup(interior)
    out = {}
    for eps, v in inner.items():
        top = max(table.sup(n).get(eps, 0.0) for n in near)
        out[eps] = top / v if v > 0 else float("inf")
    return out


def density_stability(formula, spec, eps, policy=None, stratum="all", formula_opts=None) -> float:
    """Relative change of the sup error when the grid is refined (anchors doubled, spacing halved)."""
    policy = policy or GridPolicy()
    fine = replace(policy, anchors=2 * policy.anchors, spacing=policy.spacing / 2, spacing_3d=policy.spacing_3d / 2)
    lst = [eps * 4, eps * 2, eps]
    base = error_sweep(formula, spec, lst, replace(policy, eps_ref=eps * 4), {stratum: DEFAULT_STRATA[stratum]}, formula_opts)
    ref = error_sweep(formula, spec, lst, replace(fine, eps_ref=eps * 4), {stratum: DEFAULT_STRATA[stratum]}, formula_opts)
    a, b = base.sup(stratum)[eps], ref.sup(stratum)[eps]
    return abs(b - a) / max(b, 1e-300)


def write_report(path, payload: dict):
    text = json.dumps(_jsonable(payload), indent=2, sort_keys=True)
    with open(path, "w") as fh:
        fh.write(text + "\n")
    return text
