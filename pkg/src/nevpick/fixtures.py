"""Named experiment fixtures.

Acceptance numbers are pinned against these exact definitions; bump
``FIXTURE_VERSION`` whenever one of them changes.
"""

from __future__ import annotations

from .core import DEFAULT_PRECISION, DiscreteMeasure, Precision, gauss_discretize

FIXTURE_VERSION = "1"

# Evaluation grid in [-2,2] x [0.5,2]; avoids z_0 = i of the standard points.
GRID_RE = (-1.5, -0.5, 0.5, 1.5)
GRID_IM = (0.5, 0.875, 1.25, 1.625, 2.0)


def two_atom_measure(prec: Precision = DEFAULT_PRECISION) -> DiscreteMeasure:
    """``(delta_{-1} + delta_1) / 2``, whose transform is ``lam / (1 - lam^2)``."""
    return DiscreteMeasure([(-1, "1/2"), (1, "1/2")], prec)


def two_atom_points(prec: Precision = DEFAULT_PRECISION):
    return [prec.mpc(1j), prec.mpc(2j)]


def uniform_measure(prec: Precision = DEFAULT_PRECISION, nodes: int = 64) -> DiscreteMeasure:
    """Gauss-Legendre discretization of the uniform density on [-1, 1]."""
    return gauss_discretize("uniform", (-1, 1), nodes, prec)


def standard_points(count: int, prec: Precision = DEFAULT_PRECISION):
    """``z_k = k/(k+1) + i`` for ``k < count``."""
    ctx = prec.ctx
    return [ctx.mpc(ctx.mpf(k) / (k + 1), 1) for k in range(count)]


def standard_grid(prec: Precision = DEFAULT_PRECISION):
    """The 20-point evaluation grid, row-major in the imaginary part."""
    ctx = prec.ctx
    return [ctx.mpc(ctx.mpf(x), ctx.mpf(y)) for y in GRID_IM for x in GRID_RE]


POINT_RULES = {"standard": standard_points}

__all__ = [
    "FIXTURE_VERSION", "GRID_IM", "GRID_RE", "POINT_RULES", "standard_grid", "standard_points",
    "two_atom_measure", "two_atom_points", "uniform_measure",
]
