"""Modified multipoint Schur algorithm.

One step peels off ``(a1, a2, b)`` at a node ``z`` via

    phi(lam) = -1 / (a2*lam - a1 + b^2 (lam - z)(lam - conj z) phi1(lam)),

and the iteration either descends lazily through a base evaluator
(measure pipeline) or propagates a finite value table (values-only pipeline).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .core import (DEFAULT_PRECISION, DiscreteMeasure, InterpolationProblem, Precision,
                   validate_points)
from .errors import (AsymmetricData, DegenerateTail, DepthExceedsSupport, NotHerglotzData,
                     PoleProximity)


@dataclass(frozen=True)
class SchurParameters:
    z: object
    a1: object
    a2: object
    b: object
    level: int

    @property
    def b2(self):
        return self.b * self.b

    @property
    def degenerate(self):
        return self.b == 0


@dataclass(frozen=True)
class SchurChain:
    """Coefficients of consecutive Schur steps.

    ``terminated_at`` is the level whose ``b`` vanished (the tail is then
    identically zero), or ``None`` while the chain is open.
    """

    steps: tuple
    tail: Callable | None
    prec: Precision
    terminated_at: int | None = None

    @property
    def termination(self):
        if self.terminated_at is None:
            return "open"
        return f"rational_terminated at level {self.terminated_at}"

    def __len__(self):
        return len(self.steps)


def _imag_residue_check(prec, value, scale, name):
    ctx = prec.ctx
    if abs(value.imag) > 1e2 * prec.eps * max(scale, 1):
        raise NotHerglotzData(f"{name} has imaginary residue {ctx.nstr(value.imag, 5)}")
    return value.real


def schur_step(phi_z, phi_zbar, z, prec: Precision = DEFAULT_PRECISION):
    """Return ``(a1, a2, b2)`` from the values of phi at ``z`` and ``conj z``.

    The pair must be conjugate-symmetric within ``32 * eps``; afterwards only
    ``phi_z`` is used.  ``b2 = a2 - 1`` may come out as roundoff-sized
    negative for exhausted data; callers decide about degeneration.
    """
    ctx = prec.ctx
    z, phi_z, phi_zbar = prec.mpc(z), prec.mpc(phi_z), prec.mpc(phi_zbar)
    if not z.imag > 0:
        raise ValueError("interpolation node must lie in the upper half plane")
    if phi_z == 0:
        raise NotHerglotzData("phi(z) vanishes")
    if abs(phi_zbar - ctx.conj(phi_z)) > 32 * prec.eps * abs(phi_z):
        raise AsymmetricData("phi(conj z) differs from conj phi(z)")
    v = -1 / phi_z
    vbar = ctx.conj(v)
    a2c = (v - vbar) / (z - ctx.conj(z))
    a1c = a2c * z - v
    a2 = _imag_residue_check(prec, a2c, abs(a2c), "a2")
    a1 = _imag_residue_check(prec, a1c, abs(a1c) + abs(a2c * z), "a1")
    if not a2 > 0:
        raise NotHerglotzData("a2 <= 0: Im(-1/phi(z)) is not positive")
    return a1, a2, a2 - 1


def schur_coeffs_via_integrals(measure: DiscreteMeasure, z):
    """``(a1, a2)`` from direct sums over the atoms of ``measure``."""
    prec = measure.prec
    ctx = prec.ctx
    z = prec.mpc(z)
    if not z.imag > 0:
        raise ValueError("interpolation node must lie in the upper half plane")
    inv_sq = [w / abs(t - z) ** 2 for t, w in measure.atoms]
    phi = ctx.fsum(w / (t - z) for t, w in measure.atoms)
    norm2 = abs(phi) ** 2
    a1 = ctx.fsum(t * q for t, q in zip(measure.positions, inv_sq)) / norm2
    a2 = ctx.fsum(inv_sq) / norm2
    return a1, a2


class SchurTail:
    """Lazy evaluator of the normalized tail ``phi1`` after one step."""

    def __init__(self, phi: Callable, params: SchurParameters, prec: Precision):
        if params.b2 <= prec.deg_tol * params.a2:
            raise DegenerateTail(f"b^2 vanishes at level {params.level}")
        self.phi = phi
        self.params = params
        self.prec = prec

    def __call__(self, lam):
        prec = self.prec
        ctx = prec.ctx
        lam = prec.mpc(lam)
        if lam.imag < 0:
            return ctx.conj(self(ctx.conj(lam)))
        p = self.params
        guard = prec.geo_tol * (1 + abs(p.z))
        if abs(lam - p.z) <= guard or abs(lam - ctx.conj(p.z)) <= guard:
            raise PoleProximity(f"tail of level {p.level} evaluated at its node")
        num = 1 / self.phi(lam) + p.a2 * lam - p.a1
        return -num / ((lam - p.z) * (lam - ctx.conj(p.z)) * p.b2)


def schur_tail(phi: Callable, params: SchurParameters,
               prec: Precision = DEFAULT_PRECISION) -> SchurTail:
    return SchurTail(phi, params, prec)


def _make_params(prec, z, a1, a2, b2, level):
    """Build parameters; ``None`` signals that the step is terminal."""
    ctx = prec.ctx
    if b2 <= prec.deg_tol * a2:
        if b2 < -1e3 * prec.eps * a2 and b2 < -prec.deg_tol * a2:
            raise NotHerglotzData(f"a2 < 1 at level {level}: data not of class R0")
        return SchurParameters(z, a1, a2, ctx.zero, level), True
    return SchurParameters(z, a1, a2, ctx.sqrt(b2), level), False


def guard_bits(depth: int) -> int:
    """Extra bits for a chain of ``depth`` steps.

    Nested tail evaluation sheds up to about ten bits per level on clustered
    nodes, so the recursion runs on a wider context and the coefficients are
    rounded back at the end.
    """
    return 32 + 16 * depth


def _round_step(p: SchurParameters, prec: Precision) -> SchurParameters:
    return SchurParameters(prec.mpc(p.z), prec.mpf(p.a1), prec.mpf(p.a2), prec.mpf(p.b), p.level)


def _finish(steps, tail, prec, terminated_at=None):
    return SchurChain(tuple(_round_step(p, prec) for p in steps), tail, prec, terminated_at)


def build_chain_from_measure(measure: DiscreteMeasure, points: Sequence, depth: int,
                             guard: int | None = None) -> SchurChain:
    """Run ``depth`` Schur steps on the Cauchy transform of ``measure``.

    Tails are nested closures; each node value is obtained by descending to
    the base measure.  The descent runs ``guard`` extra bits wide (default
    :func:`guard_bits`) and the returned coefficients are rounded to the
    measure's precision; the returned tail stays on the wide context.
    """
    prec = measure.prec
    pts = [prec.mpc(z) for z in points]
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if len(pts) < depth:
        raise ValueError(f"{depth} steps need {depth} points, got {len(pts)}")
    validate_points(pts, prec)
    if depth >= len(measure):
        warnings.warn(f"depth {depth} reaches the {len(measure)}-atom support",
                      DepthExceedsSupport, stacklevel=2)
    wide = prec.widened(guard_bits(depth) if guard is None else guard)
    ctx = wide.ctx
    tail: Callable = measure.with_precision(wide)
    steps = []
    for k in range(depth):
        z = wide.mpc(pts[k])
        phi_z = tail(z)
        a1, a2, b2 = schur_step(phi_z, tail(ctx.conj(z)), z, wide)
        params, terminal = _make_params(wide, z, a1, a2, b2, k)
        steps.append(params)
        if terminal:
            return _finish(steps, None, prec, terminated_at=k)
        tail = SchurTail(tail, params, wide)
    return _finish(steps, tail, prec)


@dataclass
class ValueTail:
    """Known values of the current tail at the not-yet-used nodes."""

    points: list
    values: list
    prec: Precision = field(default=DEFAULT_PRECISION)

    def __call__(self, lam):
        ctx = self.prec.ctx
        lam = self.prec.mpc(lam)
        for z, w in zip(self.points, self.values):
            if z == lam:
                return w
            if ctx.conj(z) == lam:
                return ctx.conj(w)
        raise PoleProximity("a value-table tail is only known at its remaining nodes")


def build_chain_from_values(problem: InterpolationProblem, depth: int,
                            guard: int | None = None) -> SchurChain:
    """Schur steps driven purely by the data ``{z_k, w_k}``.

    After each step the remaining values are pushed through the same linear
    fractional map; ``b^2 = a2 - 1`` makes any integral unnecessary.  The
    propagation runs ``guard`` bits wide like the measure pipeline, which
    cannot fix the conditioning of the data themselves: deep coefficients
    amplify the rounding of ``w_k``.
    """
    prec = problem.prec
    wide = prec.widened(guard_bits(depth) if guard is None else guard)
    ctx = wide.ctx
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if depth > len(problem):
        raise ValueError(f"depth {depth} exceeds the {len(problem)} data points")
    pts = [wide.mpc(z) for z in problem.points]
    vals = [wide.mpc(w) for w in problem.values]
    steps = []
    for k in range(depth):
        z, w = pts[k], vals[k]
        a1, a2, b2 = schur_step(w, ctx.conj(w), z, wide)
        params, terminal = _make_params(wide, z, a1, a2, b2, k)
        steps.append(params)
        if terminal:
            return _finish(steps, None, prec, terminated_at=k)
        for i in range(k + 1, len(pts)):
            lam = pts[i]
            num = 1 / vals[i] + a2 * lam - a1
            vals[i] = -num / ((lam - z) * (lam - ctx.conj(z)) * params.b2)
            if vals[i].imag < -prec.geo_tol * max(1, abs(vals[i])):
                raise NotHerglotzData(f"propagated value at node {i} left C+ at level {k}")
    rest = ValueTail(pts[depth:], vals[depth:], wide)
    return _finish(steps, rest, prec)


__all__ = [
    "SchurChain", "SchurParameters", "SchurTail", "ValueTail", "build_chain_from_measure",
    "build_chain_from_values", "guard_bits", "schur_coeffs_via_integrals", "schur_step", "schur_tail",
]
