"""Command-line interface: eval, oracle, sweep, rates and report.

A run is described by a JSON config (``--config`` path, or an inline JSON
object) validated against :data:`CONFIG_SCHEMA`; the flags ``--out``,
``--seed``, ``--formula`` and ``--eps`` override the matching config
fields. Exit codes: 0 success, 1 invalid configuration or input, 2
numerical failure, 3 acceptance failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

import jsonschema
import numpy as np

from . import acceptance, asymptotics
from .errors import GreenKernelError, NumericalFailure, ValidationFailure
from .geometry import DOMAIN_SCHEMA, DomainSpec, GridPolicy
from .oracle import boundary_integral_oracle, oracle_for
from .validation import DEFAULT_STRATA, _jsonable, error_sweep, fit_rate

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_ACCEPTANCE = 0, 1, 2, 3
COMMANDS = ("eval", "oracle", "sweep", "rates", "report")

_POINT = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 3}
_NUM = {"type": "number"}

GRID_SCHEMA = {
    "type": "object",
    "properties": {
        "spacing": {"type": "number", "exclusiveMinimum": 0},
        "spacing_3d": {"type": "number", "exclusiveMinimum": 0},
        "offsets": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1},
        "bulk_offsets": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
        "anchors": {"type": "integer", "minimum": 1},
        "cluster": {"type": "array", "items": _NUM, "minItems": 1},
        "r_min": {"type": ["number", "null"], "minimum": 0},
        "interior_margin": {"type": "number", "minimum": 0},
        "eps_ref": {"type": ["number", "null"], "exclusiveMinimum": 0},
        "d0": {"type": "number", "exclusiveMinimum": 0},
        "seed": {"type": "integer", "minimum": 0},
        "max_pairs": {"type": ["integer", "null"], "minimum": 1},
    },
    "additionalProperties": False,
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "RunConfig",
    "type": "object",
    "properties": {
        "command": {"enum": list(COMMANDS)},
        "domain": {"oneOf": [DOMAIN_SCHEMA, {"type": "string", "minLength": 1}]},
        "formula": {"enum": sorted(asymptotics.FORMULAS)},
        "eps": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1},
        "grid": GRID_SCHEMA,
        "out": {"type": "string", "minLength": 1},
        "seed": {"type": "integer", "minimum": 0},
        "x": _POINT,
        "y": _POINT,
        "options": {
            "type": "object",
            "properties": {
                "normalization": {"enum": ["l2", "sup"]},
                "pairing": {"enum": ["ordered", "unordered"]},
                "d0": {"type": "number", "exclusiveMinimum": 0},
                "m": {"type": "integer", "minimum": 16},
            },
            "additionalProperties": False,
        },
        "stratum": {"enum": sorted(DEFAULT_STRATA)},
        "expected": {"oneOf": [_NUM, {"const": "super-polynomial"}]},
        "band": {"type": "number", "exclusiveMinimum": 0},
        "criteria": {
            "type": "array",
            "items": {"type": "integer", "minimum": 1, "maximum": 10},
            "minItems": 1,
            "uniqueItems": True,
        },
    },
    "required": ["command"],
    "additionalProperties": False,
}

# Schemas of the emitted JSON documents
EVAL_SCHEMA = {
    "type": "object",
    "properties": {
        "formula": {"type": "string"},
        "value": _NUM,
        "terms": {"type": "object", "additionalProperties": _NUM},
        "x": _POINT,
        "y": _POINT,
        "epsilon": _NUM,
    },
    "required": ["formula", "value", "terms", "x", "y", "epsilon"],
    "additionalProperties": False,
}
ORACLE_SCHEMA = {
    "type": "object",
    "properties": {
        "method": {"type": "string"},
        "value": _NUM,
        "accuracy": _NUM,
        "resolution": {"type": "object"},
        "x": _POINT,
        "y": _POINT,
        "domain": DOMAIN_SCHEMA,
    },
    "required": ["method", "value", "accuracy", "x", "y", "domain"],
    "additionalProperties": False,
}
RATES_SCHEMA = {
    "type": "object",
    "properties": {
        "formula": {"type": "string"},
        "stratum": {"type": "string"},
        "slope": _NUM,
        "intercept": _NUM,
        "correlation": _NUM,
        "expected": {"oneOf": [_NUM, {"const": "super-polynomial"}, {"type": "null"}]},
        "band": _NUM,
        "passed": {"type": "boolean"},
        "eps": {"type": "array", "items": _NUM},
        "errors": {"type": "array", "items": _NUM},
        "local_slopes": {"type": "array", "items": _NUM},
        "inverse_eps_correlation": _NUM,
    },
    "required": ["formula", "stratum", "slope", "intercept", "correlation", "passed", "eps", "errors"],
    "additionalProperties": False,
}
REPORT_SCHEMA = {
    "type": "object",
    "properties": {
        "seed": {"type": "integer"},
        "passed": {"type": "boolean"},
        "criteria": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "number": {"type": "integer"},
                    "title": {"type": "string"},
                    "passed": {"type": "boolean"},
                    "budget": {"type": ["number", "null"]},
                    "details": {"type": "object"},
                },
                "required": ["number", "title", "passed", "details"],
                "additionalProperties": False,
            },
        },
        "summary": {"type": "array", "items": {"type": "string"}},
    },
    "required": ["seed", "passed", "criteria", "summary"],
    "additionalProperties": False,
}
OUTPUT_SCHEMAS = {"eval": EVAL_SCHEMA, "oracle": ORACLE_SCHEMA, "rates": RATES_SCHEMA, "report": REPORT_SCHEMA}


class Failure(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# Config handling


def _load_json(text_or_path: str, what: str):
    if text_or_path.lstrip().startswith("{"):
        text = text_or_path
    else:
        try:
            text = Path(text_or_path).read_text()
        except OSError as exc:
            raise ValidationFailure(f"cannot read {what} {text_or_path!r}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationFailure(f"{what} is not valid JSON: {exc.msg} (line {exc.lineno})") from exc


def _parse_eps(text: str):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ValidationFailure(f"--eps must be a comma-separated list of numbers, got {text!r}") from exc


def build_config(args) -> dict:
    cfg = _load_json(args.config, "config") if args.config else {}
    if not isinstance(cfg, dict):
        raise ValidationFailure("config must be a JSON object")
    if "command" in cfg and cfg["command"] != args.command:
        raise ValidationFailure(f"config command {cfg['command']!r} does not match {args.command!r}")
    cfg = dict(cfg, command=args.command)
    if args.out is not None:
        cfg["out"] = args.out
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.formula is not None:
        cfg["formula"] = args.formula
    if args.eps is not None:
        cfg["eps"] = _parse_eps(args.eps)
    validate_config(cfg)
    return cfg


def validate_config(cfg: dict):
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "config"
        raise ValidationFailure(f"invalid config at {where}: {exc.message}") from exc


def _domain(cfg, required=True):
    d = cfg.get("domain")
    if d is None:
        if required:
            raise ValidationFailure(f"command {cfg['command']!r} needs a 'domain'")
        return None
    if isinstance(d, str):
        d = _load_json(d, "domain file")
        if not isinstance(d, dict):
            raise ValidationFailure("domain file must hold a JSON object")
    return DomainSpec.from_dict(d)


def _policy(cfg):
    pol = GridPolicy.from_dict(cfg.get("grid", {}))
    return replace(pol, seed=cfg.get("seed", pol.seed))


def _require(cfg, *keys):
    for k in keys:
        if k not in cfg:
            raise ValidationFailure(f"command {cfg['command']!r} needs {k!r}")


# ---------------------------------------------------------------------------
# Commands


def cmd_eval(cfg):
    _require(cfg, "formula", "x", "y")
    f = cfg["formula"]
    spec = _domain(cfg, required=f not in asymptotics.MODEL_FORMULAS)
    ke = asymptotics.kernel_eval(f, spec, cfg["x"], cfg["y"], **_formula_opts(cfg))
    doc = {"formula": ke.formula, "value": ke.value, "terms": ke.terms, "x": list(ke.x), "y": list(ke.y), "epsilon": ke.epsilon}
    return _dump_json(doc), EXIT_OK


def _formula_opts(cfg):
    return {k: v for k, v in cfg.get("options", {}).items() if k != "m"}


def cmd_oracle(cfg):
    _require(cfg, "x", "y")
    spec = _domain(cfg)
    m = cfg.get("options", {}).get("m")
    if m is not None and spec.variant in ("PerturbedDisk", "DiskWithHole"):
        orc = boundary_integral_oracle(spec, m)
    else:
        orc = oracle_for(cfg.get("formula", ""), spec)
    x, y = np.asarray(cfg["x"], float), np.asarray(cfg["y"], float)
    value = float(np.asarray(orc(x[None, :], y[None, :])).ravel()[0])
    acc = getattr(orc, "last_accuracy", orc.accuracy)
    resolution = dict(orc.resolution)
    if getattr(orc, "last_resolution", None) is not None:
        resolution["m"] = orc.last_resolution
    doc = {
        "method": orc.method,
        "value": value,
        "accuracy": float(acc) if np.isfinite(acc) else -1.0,
        "resolution": resolution,
        "x": x.tolist(),
        "y": y.tolist(),
        "domain": spec.to_dict(),
    }
    return _dump_json(doc), EXIT_OK


def _sweep_table(cfg):
    _require(cfg, "formula")
    spec = _domain(cfg)
    eps = cfg.get("eps", list(acceptance.DEFAULT_EPS))
    return error_sweep(cfg["formula"], spec, eps, _policy(cfg), formula_opts=_formula_opts(cfg))


def cmd_sweep(cfg):
    return _sweep_table(cfg).to_csv(), EXIT_OK


def cmd_rates(cfg):
    table = _sweep_table(cfg)
    stratum = cfg.get("stratum", "all")
    fit = fit_rate(table, stratum, cfg.get("expected"), cfg.get("band", 0.3))
    doc = dict(fit.to_dict(), formula=cfg["formula"])
    code = EXIT_OK if fit.passed else EXIT_ACCEPTANCE
    return _dump_json(doc), code


def cmd_report(cfg):
    results = acceptance.run(cfg.get("criteria"), cfg.get("seed", 0), _policy(cfg))
    for r in results:
        print(r.line(), file=sys.stderr)
    doc = acceptance.report(results, cfg.get("seed", 0), timings=False)
    code = EXIT_OK if doc["passed"] else EXIT_ACCEPTANCE
    return _dump_json(doc), code


HANDLERS = {"eval": cmd_eval, "oracle": cmd_oracle, "sweep": cmd_sweep, "rates": cmd_rates, "report": cmd_report}


def _dump_json(doc) -> str:
    return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"


def write_atomic(path: str, text: str):
    """Write ``text`` to ``path`` through a temporary file in the same directory."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def execute(cfg: dict) -> tuple:
    """Run a validated config; returns (output text, exit code)."""
    try:
        return HANDLERS[cfg["command"]](cfg)
    except NumericalFailure as exc:
        raise Failure(EXIT_NUMERICAL, f"numerical failure: {exc}") from exc
    except GreenKernelError as exc:
        raise Failure(EXIT_CONFIG, f"error: {exc}") from exc


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="greenkernels", description=__doc__.split("\n\n")[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON config file, or an inline JSON object")
    p.add_argument("--out", help="output path (default: standard output)")
    p.add_argument("--seed", type=int, help="grid seed")
    p.add_argument("--formula", help="formula id")
    p.add_argument("--eps", help="comma-separated epsilon list")
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = build_config(args)
        text, code = execute(cfg)
    except Failure as exc:
        print(str(exc), file=sys.stderr)
        return exc.code
    except ValidationFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if "out" in cfg:
        write_atomic(cfg["out"], text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
