"""End-to-end experiments and deterministic report serialization."""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field

from mpmath import libmp

from .core import DiscreteMeasure, InterpolationProblem, Precision
from .errors import SerializationFailure
from .pencil import PencilCoefficients
from .recurrence import ROUTES, pade_value
from .schur import build_chain_from_measure, build_chain_from_values


@dataclass
class InterpolationReport:
    precision_bits: int
    rows: list = field(default_factory=list)

    kind = "interpolation"

    def document(self):
        return {"kind": self.kind, "precision_bits": self.precision_bits, "rows": self.rows}


@dataclass
class ConvergenceReport:
    fixture: str
    precision_bits: int
    depths: list = field(default_factory=list)
    sup_errors: list = field(default_factory=list)
    interp_resids: list = field(default_factory=list)
    grid: list = field(default_factory=list)
    runtime: float = 0.0

    kind = "convergence"

    @property
    def rows(self):
        return [{"n": n, "sup_error": e, "interp_resid": r}
                for n, e, r in zip(self.depths, self.sup_errors, self.interp_resids)]

    @property
    def reduction(self):
        """``sup_errors[0] / sup_errors[-1]`` (None when undefined)."""
        if len(self.sup_errors) < 2 or not self.sup_errors[-1]:
            return None
        return self.sup_errors[0] / self.sup_errors[-1]

    def document(self):
        # runtime is left out so that emitted bytes stay reproducible
        return {"kind": self.kind, "fixture": self.fixture,
                "precision_bits": self.precision_bits, "rows": self.rows}


@dataclass
class ClassicalLimitReport:
    precision_bits: int
    R_list: list
    rows: list = field(default_factory=list)
    j_deviation: dict = field(default_factory=dict)
    diag_deviation: dict = field(default_factory=dict)
    classical_a: list = field(default_factory=list)
    classical_b: list = field(default_factory=list)

    kind = "classical"

    def document(self):
        return {"kind": self.kind, "precision_bits": self.precision_bits, "rows": self.rows}


def _chain_for(measure: DiscreteMeasure, points, depth):
    depth = min(depth, len(points))
    return build_chain_from_measure(measure, points, depth)


def run_interpolation_check(measure: DiscreteMeasure, points, n: int,
                            pipeline: str = "measure") -> InterpolationReport:
    """Residuals ``|m_[0,n](z_j) - phi(z_j)|`` and at ``conj z_j`` for j <= n."""
    prec = measure.prec
    ctx = prec.ctx
    pts = [prec.mpc(z) for z in points[:n + 1]]
    if len(pts) < n + 1:
        raise ValueError(f"order {n} needs {n + 1} points")
    if pipeline == "measure":
        chain = build_chain_from_measure(measure, pts, n + 1)
    elif pipeline == "values":
        problem = InterpolationProblem(pts, [measure(z) for z in pts], prec)
        chain = build_chain_from_values(problem, n + 1)
    else:
        raise ValueError(f"unknown pipeline {pipeline!r}")
    # a terminated chain already represents phi exactly
    order = min(n, len(chain) - 1)
    report = InterpolationReport(prec.significand_bits)
    for j, z in enumerate(pts):
        w = measure(z)
        res = abs(pade_value(chain, z, order) - w)
        cres = abs(pade_value(chain, ctx.conj(z), order) - ctx.conj(w))
        report.rows.append({"n": n, "j": j, "z": z, "residual": res, "conj_residual": cres})
    return report


def _median(values):
    ctx_re = sorted(v.real for v in values)
    ctx_im = sorted(v.imag for v in values)
    mid = len(values) // 2
    return type(values[0])(ctx_re[mid], ctx_im[mid])


def run_convergence(measure: DiscreteMeasure, points, N: int, grid,
                    fixture: str = "custom", start: int = 0) -> ConvergenceReport:
    """Sup-grid error of ``m_[0,n]`` against the exact transform for ``start <= n <= N``.

    Each grid value is the componentwise median of the three routes.
    """
    prec = measure.prec
    t0 = time.perf_counter()
    pts = [prec.mpc(z) for z in points]
    if len(pts) < N + 1:
        raise ValueError(f"N={N} needs {N + 1} points")
    chain = _chain_for(measure, pts, N + 1)
    lams = [prec.mpc(l) for l in grid]
    for lam in lams:
        if abs(lam.imag) < prec.mpf("0.25"):
            raise ValueError("grid points need |Im lam| >= 0.25")
    exact = [measure(l) for l in lams]
    targets = [measure(z) for z in pts]
    report = ConvergenceReport(fixture, prec.significand_bits, grid=lams)
    last = len(chain) - 1
    for n in range(start, N + 1):
        k = min(n, last)
        sup = max((abs(_median([pade_value(chain, l, k, r) for r in ROUTES]) - f)
                   for l, f in zip(lams, exact)), default=prec.ctx.zero)
        interp = max(abs(pade_value(chain, pts[j], k) - targets[j]) for j in range(n + 1))
        report.depths.append(n)
        report.sup_errors.append(sup)
        report.interp_resids.append(interp)
    report.runtime = time.perf_counter() - t0
    return report


def windowed_nonincreasing(seq, window: int = 2) -> bool:
    """True when the running maxima over consecutive windows never increase."""
    blocks = [max(seq[i:i + window]) for i in range(0, len(seq) - window + 1)]
    return all(b >= a for a, b in zip(blocks[1:], blocks))


def stieltjes_coefficients(measure: DiscreteMeasure, n: int):
    """Classical Jacobi coefficients ``(a_k, b_k)`` of ``measure`` by the discrete Stieltjes procedure.

    Returns ``n`` diagonal entries and ``n`` off-diagonal entries (the last
    ones only while the support allows).
    """
    ctx = measure.prec.ctx
    ts, ws = measure.positions, measure.weights
    p_prev = [ctx.zero] * len(ts)
    p = [ctx.one] * len(ts)
    norm_prev = None
    a_out, b_out = [], []
    norm = ctx.fsum(ws)
    for k in range(min(n, len(ts))):
        a = ctx.fsum(w * t * q * q for t, w, q in zip(ts, ws, p)) / norm
        beta = norm / norm_prev if norm_prev else ctx.zero
        nxt = [(t - a) * q - beta * r for t, q, r in zip(ts, p, p_prev)]
        a_out.append(a)
        new_norm = ctx.fsum(w * q * q for w, q in zip(ws, nxt))
        if k + 1 < len(ts):
            b_out.append(ctx.sqrt(new_norm / norm))
        p_prev, p = p, nxt
        norm_prev, norm = norm, new_norm
    return a_out, b_out


def run_classical_limit(measure: DiscreteMeasure, n_levels: int, R_list) -> ClassicalLimitReport:
    """Pencil coefficients at ``z_k = iR(1 + k 1e-3)`` compared with the Jacobi matrix of ``measure``.

    Per level: ``d_j = b_j``, ``b_ratio = b_j |z_j|`` (tends to the classical
    off-diagonal entry) and ``a_ratio = a1_j / a2_j`` (tends to the classical
    diagonal entry).  ``j_deviation`` is the largest entry of ``J - I`` over
    the levels, ``diag_deviation`` only its diagonal part ``b_j^2``.
    """
    prec = measure.prec
    ctx = prec.ctx
    Rs = [prec.mpf(R) for R in R_list]
    if any(not b > a for a, b in zip(Rs, Rs[1:])):
        raise ValueError("R values must increase")
    ca, cb = stieltjes_coefficients(measure, n_levels)
    report = ClassicalLimitReport(prec.significand_bits, Rs, classical_a=ca, classical_b=cb)
    step = ctx.mpf(1) / 1000
    for R in Rs:
        pts = [ctx.mpc(0, R * (1 + k * step)) for k in range(n_levels)]
        chain = _chain_for(measure, pts, n_levels)
        coeffs = PencilCoefficients.from_chain(chain)
        dev, ddev = ctx.zero, ctx.zero
        for j in range(len(coeffs)):
            b = coeffs.b[j]
            dev = max(dev, abs(coeffs.a2[j] - 1), b)
            ddev = max(ddev, abs(coeffs.a2[j] - 1))
            report.rows.append({
                "R": R, "level": j, "d_j": b, "b_ratio": b * abs(coeffs.nodes[j]),
                "a_ratio": coeffs.a1[j] / coeffs.a2[j],
                "classical_b": cb[j] if j < len(cb) else ctx.zero,
                "classical_a": ca[j] if j < len(ca) else None,
            })
        report.j_deviation[R] = dev
        report.diag_deviation[R] = ddev
    return report


def _render(value, bits):
    """Turn report values into JSON-ready data with round-trip decimal strings."""
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise SerializationFailure("non-finite float in report")
        return repr(value)
    if hasattr(value, "_mpf_"):
        if value._mpf_ in (libmp.finf, libmp.fninf, libmp.fnan):
            raise SerializationFailure("non-finite number in report")
        return libmp.to_str(value._mpf_, libmp.repr_dps(bits))
    if hasattr(value, "_mpc_") or isinstance(value, complex):
        return [_render(value.real, bits), _render(value.imag, bits)]
    if isinstance(value, dict):
        return {str(k): _render(v, bits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_render(v, bits) for v in value]
    raise SerializationFailure(f"cannot serialize {type(value).__name__}")


def _flatten(row):
    out = {}
    for key, val in row.items():
        if isinstance(val, list):
            if len(val) == 2:
                out[f"{key}_re"], out[f"{key}_im"] = val
            else:
                out[key] = json.dumps(val)
        else:
            out[key] = "" if val is None else val
    return out


def emit_report(report, fmt: str = "json") -> bytes:
    """Serialize a report deterministically (sorted keys, exact decimal strings)."""
    if hasattr(report, "document"):
        doc = report.document()
    elif isinstance(report, dict):
        doc = report
    else:
        raise SerializationFailure(f"cannot serialize {type(report).__name__}")
    bits = int(doc.get("precision_bits") or 53)
    doc = _render(doc, bits)
    if fmt == "json":
        return (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode()
    if fmt == "csv":
        rows = [_flatten(r) for r in doc.get("rows", [])]
        cols = sorted({k for r in rows for k in r})
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow(r)
        return buf.getvalue().encode()
    raise SerializationFailure(f"unknown format {fmt!r}")


__all__ = [
    "ClassicalLimitReport", "ConvergenceReport", "InterpolationReport", "emit_report",
    "run_classical_limit", "run_convergence", "run_interpolation_check", "stieltjes_coefficients",
    "windowed_nonincreasing",
]
