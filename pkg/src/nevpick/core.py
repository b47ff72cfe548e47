"""Working precision, probability measures and Cauchy transforms.

All arithmetic runs on an :mod:`mpmath` context owned by a :class:`Precision`.
Contexts are private per significand width, so computations at different
precisions never share mutable state.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import mpmath

from .errors import PoleProximity, QuadratureFailure


@functools.lru_cache(maxsize=None)
def _context(bits: int) -> mpmath.ctx_mp.MPContext:
    ctx = mpmath.MPContext()
    ctx.prec = bits
    return ctx


@dataclass(frozen=True)
class Precision:
    """Working precision for one computation.

    ``deg_tol`` is relative (compared with ``b^2 / a2``); ``geo_tol`` defaults
    to ``1e3 * eps``.
    """

    significand_bits: int = 128
    deg_tol: float = 1e-30
    geo_tol: float | None = None

    def __post_init__(self):
        if int(self.significand_bits) != self.significand_bits or self.significand_bits < 53:
            raise ValueError("significand_bits must be an integer >= 53")
        if self.deg_tol <= 0:
            raise ValueError("deg_tol must be positive")
        if self.geo_tol is None:
            object.__setattr__(self, "geo_tol", float(1e3 * self.eps))
        elif self.geo_tol <= 0:
            raise ValueError("geo_tol must be positive")

    @property
    def ctx(self):
        return _context(int(self.significand_bits))

    @property
    def eps(self):
        """Unit roundoff ``2**-bits``."""
        return self.ctx.ldexp(1, -int(self.significand_bits))

    def widened(self, extra_bits: int) -> "Precision":
        """Same tolerances, ``extra_bits`` more significand bits."""
        return Precision(int(self.significand_bits) + extra_bits, self.deg_tol)

    def mpf(self, x):
        return to_real(self.ctx, x)

    def mpc(self, x):
        return to_complex(self.ctx, x)


DEFAULT_PRECISION = Precision()


def to_real(ctx, x):
    """Convert ints, floats, decimal strings, ``"p/q"`` strings and fractions."""
    if isinstance(x, Fraction):
        return ctx.mpf(x.numerator) / x.denominator
    if isinstance(x, str) and "/" in x:
        return to_real(ctx, Fraction(x))
    if isinstance(x, complex) or hasattr(x, "_mpc_"):
        raise TypeError(f"expected a real number, got {x!r}")
    return ctx.mpf(x)


def to_complex(ctx, x):
    if isinstance(x, (tuple, list)):
        re, im = x
        return ctx.mpc(to_real(ctx, re), to_real(ctx, im))
    if isinstance(x, (Fraction, str)):
        return ctx.mpc(to_real(ctx, x))
    return ctx.mpc(x)


class DiscreteMeasure:
    """Finitely supported probability measure on the real line.

    Atoms are stored sorted by position.  With ``normalize=True`` the weights
    are rescaled to sum to one at the working precision; otherwise the sum
    must already equal one within ``4 * eps``.
    """

    def __init__(self, atoms: Iterable[tuple], prec: Precision = DEFAULT_PRECISION,
                 normalize: bool = False):
        ctx = prec.ctx
        pairs = [(to_real(ctx, t), to_real(ctx, w)) for t, w in atoms]
        if not pairs:
            raise ValueError("a measure needs at least one atom")
        pairs.sort(key=lambda p: p[0])
        for (t0, _), (t1, _) in zip(pairs, pairs[1:]):
            if not t1 > t0:
                raise ValueError(f"atom positions must be distinct (duplicate at {t0})")
        if any(not w > 0 for _, w in pairs):
            raise ValueError("atom weights must be positive")
        total = ctx.fsum(w for _, w in pairs)
        if normalize:
            pairs = [(t, w / total) for t, w in pairs]
        elif abs(total - 1) > 4 * prec.eps:
            raise ValueError(f"weights sum to {ctx.nstr(total, 20)}, not 1")
        self.prec = prec
        self.positions = tuple(t for t, _ in pairs)
        self.weights = tuple(w for _, w in pairs)

    @property
    def atoms(self):
        return tuple(zip(self.positions, self.weights))

    def with_precision(self, prec: Precision) -> "DiscreteMeasure":
        """The same atoms on another context, weights renormalized there.

        The Schur step relies on unit mass (``b^2 = a2 - 1``), and deep levels
        amplify a mass defect as much as any other data error.
        """
        out = object.__new__(DiscreteMeasure)
        out.prec = prec
        out.positions = tuple(prec.mpf(t) for t in self.positions)
        ws = [prec.mpf(w) for w in self.weights]
        total = prec.ctx.fsum(ws)
        out.weights = tuple(w / total for w in ws)
        return out

    def __len__(self):
        return len(self.positions)

    def __call__(self, lam):
        return cauchy_transform(self, lam)

    def __repr__(self):
        return f"DiscreteMeasure({len(self)} atoms, {self.prec.significand_bits} bits)"


def cauchy_transform(measure: DiscreteMeasure, lam):
    """``sum w_k / (t_k - lam)``; values below the real axis are reflected."""
    prec = measure.prec
    ctx = prec.ctx
    lam = prec.mpc(lam)
    if lam.imag < 0:
        return ctx.conj(cauchy_transform(measure, ctx.conj(lam)))
    if lam.imag <= prec.geo_tol:
        for t in measure.positions:
            if abs(lam - t) <= prec.geo_tol * (1 + abs(t)):
                raise PoleProximity(f"lambda={ctx.nstr(lam, 10)} hits the atom at {ctx.nstr(t, 10)}")
    return ctx.fsum(w / (t - lam) for t, w in measure.atoms)


def moments(measure: DiscreteMeasure, n: int):
    if n < 0:
        raise ValueError("moment order must be nonnegative")
    return measure.prec.ctx.fsum(w * t**n for t, w in measure.atoms)


@dataclass(frozen=True)
class HerglotzAudit:
    min_imag: object
    symmetry_defect: object
    worst_point: object
    violation: bool


def herglotz_audit(f: Callable, grid: Sequence, prec: Precision = DEFAULT_PRECISION) -> HerglotzAudit:
    """Check ``Im f > 0`` on ``grid`` (upper half plane) and conjugate symmetry."""
    ctx = prec.ctx
    if not grid:
        raise ValueError("empty audit grid")
    min_im, worst, defect = None, None, ctx.zero
    for lam in grid:
        lam = prec.mpc(lam)
        if lam.imag <= prec.geo_tol:
            raise ValueError(f"audit point {ctx.nstr(lam, 10)} is not in the upper half plane")
        val = prec.mpc(f(lam))
        mirrored = prec.mpc(f(ctx.conj(lam)))
        defect = max(defect, abs(mirrored - ctx.conj(val)))
        if min_im is None or val.imag < min_im:
            min_im, worst = val.imag, lam
    return HerglotzAudit(min_im, defect, worst, violation=not min_im > 0)


@dataclass(frozen=True)
class InterpolationProblem:
    """Nevanlinna-Pick data: distinct nodes ``z_k`` and values ``w_k`` in C+."""

    points: tuple
    values: tuple
    prec: Precision = field(default=DEFAULT_PRECISION)

    def __post_init__(self):
        prec = self.prec
        pts = tuple(prec.mpc(z) for z in self.points)
        vals = tuple(prec.mpc(w) for w in self.values)
        if len(pts) != len(vals):
            raise ValueError("points and values differ in length")
        validate_points(pts, prec)
        for k, w in enumerate(vals):
            if not w.imag > 0:
                raise ValueError(f"value {k} is not in the upper half plane")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.points)


def validate_points(points: Sequence, prec: Precision):
    """Raise ``ValueError`` unless all points lie in C+ and are pairwise distinct."""
    for k, z in enumerate(points):
        if not z.imag > prec.geo_tol:
            raise ValueError(f"point {k} is not in the upper half plane")
        for i in range(k):
            if abs(z - points[i]) <= prec.geo_tol * (1 + abs(z)):
                raise ValueError(f"points {i} and {k} coincide")


def _legendre_rule(ctx, n, eps):
    nodes, weights = [], []
    for i in range(n):
        x = ctx.cos(ctx.pi * (i + ctx.mpf(3) / 4) / (n + ctx.mpf(1) / 2))
        for _ in range(200):
            p0, p1 = ctx.one, x
            for k in range(2, n + 1):
                p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
            dp = n * (x * p1 - p0) / (x * x - 1)
            dx = p1 / dp
            x -= dx
            if abs(dx) <= 4 * eps:
                break
        else:
            raise QuadratureFailure(f"Legendre node {i} of {n} did not converge")
        nodes.append(x)
        weights.append(2 / ((1 - x * x) * dp * dp))
    return nodes, weights


def gauss_discretize(density: str, interval, n: int,
                     prec: Precision = DEFAULT_PRECISION) -> DiscreteMeasure:
    """Gauss quadrature of a normalized density as an ``n``-atom measure.

    ``uniform`` uses Gauss-Legendre nodes, ``chebyshev`` the Gauss-Chebyshev
    rule for ``dt / (pi sqrt(1 - t^2))``.
    """
    ctx = prec.ctx
    lo, hi = (to_real(ctx, v) for v in interval)
    if not lo < hi:
        raise ValueError("interval must satisfy alpha < beta")
    if n < 1:
        raise ValueError("need at least one node")
    if density == "uniform":
        xs, ws = _legendre_rule(ctx, n, prec.eps)
    elif density == "chebyshev":
        xs = [ctx.cos((2 * k - 1) * ctx.pi / (2 * n)) for k in range(1, n + 1)]
        ws = [ctx.one] * n
    else:
        raise ValueError(f"unknown density {density!r}")
    mid, half = (lo + hi) / 2, (hi - lo) / 2
    atoms = [(mid + half * x, w) for x, w in zip(xs, ws)]
    for t, _ in atoms:
        if not lo < t < hi:
            raise QuadratureFailure("quadrature node left the interval")
    try:
        return DiscreteMeasure(atoms, prec, normalize=True)
    except ValueError as exc:
        raise QuadratureFailure(str(exc)) from exc


__all__ = [
    "DEFAULT_PRECISION", "DiscreteMeasure", "HerglotzAudit", "InterpolationProblem", "Precision", "cauchy_transform", "gauss_discretize",
    "herglotz_audit", "moments", "to_complex", "to_real", "validate_points",
]
