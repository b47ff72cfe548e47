"""Command-line front end: one JSON config in, one report out.

Exit codes: 0 success, 1 configuration error, 2 computation error,
3 identity residual above threshold.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import jsonschema

from . import fixtures
from .core import (DiscreteMeasure, InterpolationProblem, Precision, gauss_discretize,
                   herglotz_audit)
from .errors import ConfigError, InsufficientDepth, NevPickError
from .harness import emit_report, run_convergence
from .pencil import PencilCoefficients
from .recurrence import (ROUTES, christoffel_darboux_residual, eval_pq, orthogonality_check,
                         ostrogradsky_residual, pade_value, route_spread)
from .schur import build_chain_from_measure, build_chain_from_values
from .weyl import blaschke_sum, determinacy_indicator, weyl_disk

COMMANDS = ("validate", "coeffs", "pade", "weyl", "converge", "identities")
PRECISION_ENV = ("NEVPICK_PRECISION_BITS", "TOOL_PRECISION_BITS")
WEIGHT_SLACK = 1e-9

_number = {"oneOf": [{"type": "number"}, {"type": "string", "pattern": r"^\s*-?[0-9./eE+\-\s]+$"}]}
_pair = {"type": "array", "items": _number, "minItems": 2, "maxItems": 2}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "precision_bits": {"type": "integer", "minimum": 53},
        "measure": {
            "type": "object",
            "properties": {
                "atoms": {
                    "type": "array", "minItems": 1,
                    "items": {"type": "object", "properties": {"t": _number, "w": _number},
                              "required": ["t", "w"], "additionalProperties": False},
                },
                "quadrature": {
                    "type": "object",
                    "properties": {
                        "density": {"enum": ["uniform", "chebyshev"]},
                        "interval": _pair,
                        "nodes": {"type": "integer", "minimum": 1},
                    },
                    "required": ["density", "interval", "nodes"],
                    "additionalProperties": False,
                },
            },
            "oneOf": [{"required": ["atoms"]}, {"required": ["quadrature"]}],
            "additionalProperties": False,
        },
        "data": {
            "type": "object",
            "properties": {"points": {"type": "array", "items": _pair, "minItems": 1},
                           "values": {"type": "array", "items": _pair, "minItems": 1}},
            "required": ["points", "values"],
            "additionalProperties": False,
        },
        "points": {
            "oneOf": [
                {"type": "array", "items": _pair, "minItems": 1},
                {"type": "object",
                 "properties": {"rule": {"enum": sorted(fixtures.POINT_RULES)},
                                "count": {"type": "integer", "minimum": 1}},
                 "required": ["rule", "count"], "additionalProperties": False},
            ]
        },
        "depth": {"type": "integer", "minimum": 1},
        "grid": {"oneOf": [{"type": "array", "items": _pair}, {"const": "standard"}]},
        "options": {"type": "object"},
        "fixture": {"type": "string"},
    },
    "required": ["depth"],
    "additionalProperties": False,
}


@dataclass
class RunConfig:
    prec: Precision
    depth: int
    measure: DiscreteMeasure | None = None
    problem: InterpolationProblem | None = None
    points: list = field(default_factory=list)
    grid: list = field(default_factory=list)
    options: dict = field(default_factory=dict)
    fixture: str = "custom"
    source: dict = field(default_factory=dict)


def _pointer(path) -> str:
    return "".join(f"/{p}" for p in path) or "/"


def _fraction(value) -> Fraction:
    return Fraction(str(value).strip()) if isinstance(value, str) else Fraction(value)


def _resolve_bits(doc, env) -> int:
    for name in PRECISION_ENV:
        raw = env.get(name)
        if raw:
            try:
                bits = int(raw)
            except ValueError:
                raise ConfigError(f"${name}", "not an integer") from None
            if bits < 53:
                raise ConfigError(f"${name}", "precision must be at least 53 bits")
            return bits
    return int(doc.get("precision_bits", 128))


def _parse_measure(spec, prec) -> DiscreteMeasure:
    if "quadrature" in spec:
        q = spec["quadrature"]
        lo, hi = (_fraction(v) for v in q["interval"])
        if not lo < hi:
            raise ConfigError("/measure/quadrature/interval", "need alpha < beta")
        return gauss_discretize(q["density"], (lo, hi), q["nodes"], prec)
    atoms = spec["atoms"]
    try:
        pairs = [(_fraction(a["t"]), _fraction(a["w"])) for a in atoms]
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError("/measure/atoms", f"unreadable number: {exc}") from None
    for k, (_, w) in enumerate(pairs):
        if w <= 0:
            raise ConfigError(f"/measure/atoms/{k}/w", "weights must be positive")
    ts = sorted(t for t, _ in pairs)
    if any(a == b for a, b in zip(ts, ts[1:])):
        raise ConfigError("/measure/atoms", "atom positions must be distinct")
    total = sum(w for _, w in pairs)
    if abs(total - 1) > WEIGHT_SLACK:
        raise ConfigError("/measure/atoms", f"weights sum to {float(total)}, not 1")
    return DiscreteMeasure(pairs, prec, normalize=total != 1)


def _parse_pairs(items, prec, where, upper=True):
    out = []
    for k, item in enumerate(items):
        try:
            z = prec.mpc([_fraction(v) for v in item])
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"{where}/{k}", f"unreadable number: {exc}") from None
        if upper and not z.imag > 0:
            raise ConfigError(f"{where}/{k}", "point must lie in the upper half plane")
        out.append(z)
    return out


def _check_distinct(points, prec, where):
    for k, z in enumerate(points):
        for i in range(k):
            if abs(z - points[i]) <= prec.geo_tol * (1 + abs(z)):
                raise ConfigError(where, f"points {i} and {k} coincide")


def parse_config(document, env=None) -> RunConfig:
    """Validate a JSON config (bytes, text or an already-parsed dict).

    The first problem found is raised as :class:`ConfigError` with a JSON
    pointer to the offending field.
    """
    env = os.environ if env is None else env
    if isinstance(document, (bytes, str)):
        try:
            doc = json.loads(document)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise ConfigError("/", f"malformed JSON: {exc}") from None
    else:
        doc = document
    if not isinstance(doc, dict):
        raise ConfigError("/", "config must be a JSON object")
    errors = sorted(jsonschema.Draft202012Validator(CONFIG_SCHEMA).iter_errors(doc),
                    key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        err = errors[0]
        raise ConfigError(_pointer(err.absolute_path), err.message)
    if ("measure" in doc) == ("data" in doc):
        raise ConfigError("/", "exactly one of 'measure' and 'data' is required")

    prec = Precision(_resolve_bits(doc, env))
    cfg = RunConfig(prec, doc["depth"], options=dict(doc.get("options", {})),
                    fixture=doc.get("fixture", "custom"), source=doc)
    if "measure" in doc:
        cfg.measure = _parse_measure(doc["measure"], prec)
        spec = doc.get("points")
        if spec is None:
            raise ConfigError("/points", "a measure run needs interpolation points")
        if isinstance(spec, dict):
            cfg.points = fixtures.POINT_RULES[spec["rule"]](spec["count"], prec)
        else:
            cfg.points = _parse_pairs(spec, prec, "/points")
            _check_distinct(cfg.points, prec, "/points")
    else:
        data = doc["data"]
        pts = _parse_pairs(data["points"], prec, "/data/points")
        _check_distinct(pts, prec, "/data/points")
        vals = _parse_pairs(data["values"], prec, "/data/values")
        if len(pts) != len(vals):
            raise ConfigError("/data/values", "points and values differ in length")
        cfg.problem = InterpolationProblem(pts, vals, prec)
        cfg.points = pts
    if cfg.depth > len(cfg.points):
        raise ConfigError("/depth", f"depth {cfg.depth} exceeds the {len(cfg.points)} points")

    grid = doc.get("grid", "standard")
    if grid == "standard":
        cfg.grid = fixtures.standard_grid(prec)
    else:
        cfg.grid = _parse_pairs(grid, prec, "/grid", upper=False)
    return cfg


def _chain(cfg: RunConfig):
    if cfg.measure is not None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return build_chain_from_measure(cfg.measure, cfg.points, cfg.depth)
    return build_chain_from_values(cfg.problem, cfg.depth)


def _base(cfg, command):
    return {"kind": command, "precision_bits": cfg.prec.significand_bits}


def _cmd_validate(cfg):
    doc = _base(cfg, "validate")
    if cfg.measure is not None:
        upper = [l if l.imag > 0 else cfg.prec.ctx.conj(l) for l in cfg.grid]
        audit = herglotz_audit(cfg.measure, upper, cfg.prec)
        doc["audit"] = {"min_imag": audit.min_imag, "symmetry_defect": audit.symmetry_defect,
                        "violation": audit.violation}
    else:
        doc["audit"] = {"min_imag": min(w.imag for w in cfg.problem.values),
                        "violation": False}
    doc["config"] = cfg.source
    return doc, 0


def _cmd_coeffs(cfg):
    chain = _chain(cfg)
    doc = _base(cfg, "coeffs")
    doc["termination"] = chain.termination
    doc["rows"] = [{"level": p.level, "z": p.z, "a1": p.a1, "a2": p.a2, "b": p.b}
                   for p in chain.steps]
    return doc, 0


def _cmd_pade(cfg):
    chain = _chain(cfg)
    n = len(chain) - 1
    rows = []
    for lam in cfg.grid:
        vals, spread = route_spread(chain, lam, n)
        rows.append({"lam": lam, "n": n, "value": vals["ratio"], "route_spread": spread})
    doc = _base(cfg, "pade")
    doc["rows"] = rows
    return doc, 0


def _uncorrected_radius(chain, lam, j):
    try:
        return weyl_disk(chain, lam, j, "paper_formula").radius
    except InsufficientDepth:
        return None


def _cmd_weyl(cfg):
    chain = _chain(cfg)
    prec = cfg.prec
    lams = _parse_pairs(cfg.options["lambdas"], prec, "/options/lambdas") \
        if "lambdas" in cfg.options else [prec.mpc(2j)]
    rows, determinacy = [], []
    for lam in lams:
        for j in range(1, len(chain) + 1):
            d = weyl_disk(chain, lam, j)
            rows.append({"lam": lam, "j": j, "center": d.center, "radius": d.radius,
                         "uncorrected_radius": _uncorrected_radius(chain, lam, j)})
        try:
            rep = determinacy_indicator(chain, lam, len(chain) - 1)
        except InsufficientDepth:
            continue
        determinacy.append({"lam": lam, "classification": rep.classification,
                            "partial_sums": list(rep.partial_sums)})
    bl = blaschke_sum(cfg.points, len(cfg.points), prec)
    doc = _base(cfg, "weyl")
    doc.update(rows=rows, determinacy=determinacy,
               blaschke={"partial": bl.partial, "divergence_trend": bl.divergence_trend})
    return doc, 0


def _cmd_converge(cfg):
    if cfg.measure is None:
        raise ConfigError("/measure", "converge needs a measure to compare against")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = run_convergence(cfg.measure, cfg.points, cfg.depth - 1, cfg.grid, cfg.fixture)
    return rep.document(), 0


def default_threshold(prec: Precision) -> float:
    """About ``1e-25`` at 128 bits, scaled with the unit roundoff."""
    return float(prec.eps * 34e12)


def _cmd_identities(cfg):
    chain = _chain(cfg)
    prec = cfg.prec
    coeffs = PencilCoefficients.from_chain(chain)
    threshold = float(cfg.options.get("threshold", default_threshold(prec)))
    lams = [l for l in cfg.grid if l.imag > 0]
    top = len(coeffs) - 1
    rows = []
    worst = prec.ctx.zero
    for n in range(top + 1):
        ostro = max(ostrogradsky_residual(coeffs, l, n) for l in lams)
        spread = max(route_spread(coeffs, l, n)[1] for l in lams)
        row = {"n": n, "ostrogradsky": ostro, "route_spread": spread,
               "hat_defect": max(eval_pq(coeffs, l, n).hat_defect for l in lams)}
        pairs = zip(lams, lams[1:] + lams[:1])
        row["christoffel_darboux"] = max(christoffel_darboux_residual(coeffs, l, m, n) for l, m in pairs)
        if cfg.measure is not None and n < len(cfg.measure):
            row["gram_defect"] = orthogonality_check(cfg.measure, coeffs, n).gram_defect
        worst = max([worst] + [v for k, v in row.items() if k != "n"])
        rows.append(row)
    doc = _base(cfg, "identities")
    doc.update(rows=rows, threshold=threshold, worst=worst, routes=list(ROUTES))
    return doc, 0 if worst <= threshold else 3


DISPATCH = {
    "validate": _cmd_validate, "coeffs": _cmd_coeffs, "pade": _cmd_pade,
    "weyl": _cmd_weyl, "converge": _cmd_converge, "identities": _cmd_identities,
}


def dispatch(command: str, cfg: RunConfig):
    """Run ``command``; returns ``(document, exit_code)``."""
    return DISPATCH[command](cfg)


def _fail(code, exc, location=None):
    err = {"error": type(exc).__name__, "message": str(exc)}
    if location is not None:
        err["location"] = location
    sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="nevpick", description=__doc__.splitlines()[0])
    parser.add_argument("--command", required=True, choices=COMMANDS)
    parser.add_argument("--config", required=True, help="path to a JSON run configuration")
    parser.add_argument("--format", default="json", choices=("json", "csv"))
    args = parser.parse_args(argv)

    try:
        with open(args.config, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        return _fail(1, exc, "/")
    try:
        cfg = parse_config(raw)
    except ConfigError as exc:
        return _fail(1, exc, exc.location)
    except (ValueError, NevPickError) as exc:
        return _fail(1, exc, "/")
    try:
        doc, code = dispatch(args.command, cfg)
        out = emit_report(doc, args.format)
    except ConfigError as exc:
        return _fail(1, exc, exc.location)
    except (NevPickError, ValueError, ZeroDivisionError, ArithmeticError) as exc:
        return _fail(2, exc)
    sys.stdout.buffer.write(out)
    sys.stdout.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
