"""Weyl circles ``K_j(lam)`` and determinacy diagnostics.

``K_j(lam)`` is the image of the extended real line under

    tau -> -(Q_j - tau Q_{j-1}) / (P_j - tau P_{j-1}).

Geometry comes from the determinant formulas; the radius expression
``1 / (|lam - conj lam| * sum |hatP_k + b_{k-1} hatP_{k-1}|^2)`` is only
reported as ``paper_formula`` because it disagrees with exact small cases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DegenerateCircle, InsufficientDepth, PoleProximity
from .pencil import as_coefficients
from .recurrence import eval_pq, j_form, ostrogradsky_product, factor_terms, pq_values

METHODS = ("determinant", "three_point_fit", "paper_formula")


@dataclass(frozen=True)
class WeylDisk:
    lam: object
    j: int
    center: object
    radius: object
    method: str


def _check_lam(coeffs, lam):
    prec = coeffs.prec
    lam = prec.mpc(lam)
    if not lam.imag > prec.geo_tol:
        raise PoleProximity("Weyl circles are computed for lam in the upper half plane")
    return lam


def omega(coeffs, lam, tau, j: int):
    """``omega_j(lam, tau)``; ``tau=None`` or an infinite value means tau = infinity."""
    coeffs = as_coefficients(coeffs)
    if j < 1:
        raise ValueError("j must be at least 1")
    lam = _check_lam(coeffs, lam)
    P, Q = pq_values(coeffs, lam, j)
    if tau is None or (not isinstance(tau, complex) and math.isinf(float(tau))):
        return -Q[j - 1] / P[j - 1]
    tau = coeffs.prec.mpf(tau)
    return -(Q[j] - tau * Q[j - 1]) / (P[j] - tau * P[j - 1])


def _circle_through(prec, p1, p2, p3):
    ctx = prec.ctx
    a = p2 - p1
    b = p3 - p1
    cross = a.real * b.imag - a.imag * b.real
    scale = max(abs(a), abs(b)) ** 2
    if abs(cross) <= prec.geo_tol * scale:
        raise DegenerateCircle("fit points are collinear")
    # circumcenter relative to p1
    aa, bb = abs(a) ** 2, abs(b) ** 2
    cx = (b.imag * aa - a.imag * bb) / (2 * cross)
    cy = (a.real * bb - b.real * aa) / (2 * cross)
    rel = ctx.mpc(cx, cy)
    return p1 + rel, abs(rel)


def weyl_disk(coeffs, lam, j: int, method: str = "determinant") -> WeylDisk:
    coeffs = as_coefficients(coeffs)
    prec = coeffs.prec
    ctx = prec.ctx
    if j < 1:
        raise ValueError("j must be at least 1")
    lam = _check_lam(coeffs, lam)
    if method == "determinant":
        P, Q = pq_values(coeffs, lam, j)
        delta = P[j] * ctx.conj(P[j - 1]) - P[j - 1] * ctx.conj(P[j])
        center = -(Q[j] * ctx.conj(P[j - 1]) - Q[j - 1] * ctx.conj(P[j])) / delta
        radius = abs(ostrogradsky_product(coeffs, lam, j - 1)) / abs(delta)
    elif method == "three_point_fit":
        # the three images sit within a radius of each other; fit them wide
        wide = coeffs.widened(32 + 16 * j)
        pts = [omega(wide, lam, t, j) for t in (0, 1, None)]
        center, radius = _circle_through(wide.prec, *pts)
        center, radius = prec.mpc(center), prec.mpf(radius)
    elif method == "paper_formula":
        rec = eval_pq(coeffs, lam, j - 1)
        if len(rec.hatP) < j:
            raise InsufficientDepth("renormalized values undefined past a terminated level")
        terms = factor_terms(coeffs, rec.hatP, j - 1)
        P, Q = pq_values(coeffs, lam, j)
        delta = P[j] * ctx.conj(P[j - 1]) - P[j - 1] * ctx.conj(P[j])
        center = -(Q[j] * ctx.conj(P[j - 1]) - Q[j - 1] * ctx.conj(P[j])) / delta
        radius = 1 / (abs(lam - ctx.conj(lam)) * ctx.fsum(abs(t) ** 2 for t in terms))
    else:
        raise ValueError(f"unknown method {method!r}")
    return WeylDisk(lam, j, center, radius, method)


def quadratic_form(coeffs, lam, j: int, w):
    """``(J_[0,j](w pi + xi), w pi + xi) - (w - conj w)/(lam - conj lam)``."""
    coeffs = as_coefficients(coeffs)
    ctx = coeffs.prec.ctx
    rec = eval_pq(coeffs, lam, j)
    if len(rec.hatP) < j + 1:
        raise InsufficientDepth("renormalized values undefined past a terminated level")
    vec = [w * p + q for p, q in zip(rec.hatP, rec.hatQ)]
    form = ctx.re(j_form(coeffs, vec, vec, j))
    return form - ctx.re((w - ctx.conj(w)) / (rec.lam - ctx.conj(rec.lam)))


@dataclass(frozen=True)
class Membership:
    status: str
    margin: object
    form_margin: object
    agrees: bool


def _classify(value, tol):
    if value > tol:
        return "inside"
    if value < -tol:
        return "outside"
    return "boundary"


def disk_membership(w, coeffs, lam, j: int) -> Membership:
    """Locate ``w`` relative to the closed disk bounded by ``K_j(lam)``.

    ``margin`` is ``radius - |w - center|`` for the determinant disk;
    ``form_margin`` is minus the quadratic form over ``J_[0,j-1]``.  Both are
    positive inside, and the status comes from the quadratic form.
    """
    coeffs = as_coefficients(coeffs)
    prec = coeffs.prec
    w = prec.mpc(w)
    lam = _check_lam(coeffs, lam)
    form = -quadratic_form(coeffs, lam, j - 1, w)
    disk = weyl_disk(coeffs, lam, j)
    geo = disk.radius - abs(w - disk.center)
    status = _classify(form, prec.geo_tol * max(1, abs(w) ** 2))
    agrees = status == _classify(geo, prec.geo_tol * max(1, disk.radius, abs(w)))
    return Membership(status, geo, form, agrees)


@dataclass(frozen=True)
class TangencyReport:
    common_point: object
    center_distance: object
    radius_j: object
    radius_next: object
    on_circle_residuals: tuple
    relation: str


def tangency_report(coeffs, lam, j: int) -> TangencyReport:
    """Relative position of ``K_j`` and ``K_{j+1}`` and their shared point."""
    coeffs = as_coefficients(coeffs)
    prec = coeffs.prec
    lam = _check_lam(coeffs, lam)
    k1 = weyl_disk(coeffs, lam, j)
    k2 = weyl_disk(coeffs, lam, j + 1)
    common = omega(coeffs, lam, 0, j)
    res = (abs(abs(common - k1.center) - k1.radius), abs(abs(common - k2.center) - k2.radius))
    dist = abs(k1.center - k2.center)
    tol = prec.geo_tol * max(1, k1.radius)
    if abs(dist - (k1.radius + k2.radius)) <= tol:
        relation = "external"
    elif abs(dist - abs(k1.radius - k2.radius)) <= tol:
        relation = "internal"
    elif dist <= k1.radius - k2.radius + tol:
        relation = "nested"
    else:
        relation = "other"
    return TangencyReport(common, dist, k1.radius, k2.radius, res, relation)


def radius_identity_residual(coeffs, lam, j: int):
    """Relative defect of ``r_j |lam - conj lam| S_{j-1} = prod_{k<j-1} |lam - conj z_k| / |lam - z_k|``."""
    coeffs = as_coefficients(coeffs)
    ctx = coeffs.prec.ctx
    lam = _check_lam(coeffs, lam)
    r = weyl_disk(coeffs, lam, j).radius
    rec = eval_pq(coeffs, lam, j - 1)
    s = ctx.re(j_form(coeffs, rec.hatP, rec.hatP, j - 1))
    lhs = r * abs(lam - ctx.conj(lam)) * s
    rhs = ctx.one
    for k in range(j - 1):
        z = coeffs.nodes[k]
        rhs *= abs(lam - ctx.conj(z)) / abs(lam - z)
    return abs(lhs - rhs) / rhs


@dataclass(frozen=True)
class BlaschkeSum:
    partial: object
    block_sums: tuple
    divergence_trend: bool


def blaschke_sum(points: Sequence, N: int, prec=None, ratio: float = 0.75) -> BlaschkeSum:
    """Partial sum of ``Im z_k / |z_k + i|^2`` over ``k < N``.

    The trend compares the last two complete dyadic blocks
    ``[2^m - 1, 2^{m+1} - 1)``: divergence is reported when the last block
    keeps at least ``ratio`` of the previous one.
    """
    from .core import DEFAULT_PRECISION

    prec = prec or DEFAULT_PRECISION
    ctx = prec.ctx
    if N > len(points):
        raise ValueError(f"need {N} points, got {len(points)}")
    terms = []
    for z in points[:N]:
        z = prec.mpc(z)
        if not z.imag > 0:
            raise ValueError("points must lie in the upper half plane")
        terms.append(z.imag / abs(z + 1j) ** 2)
    blocks = []
    m = 0
    while 2 ** (m + 1) - 1 <= N:
        blocks.append(ctx.fsum(terms[2**m - 1:2 ** (m + 1) - 1]))
        m += 1
    trend = len(blocks) >= 2 and blocks[-1] >= ratio * blocks[-2]
    return BlaschkeSum(ctx.fsum(terms), tuple(blocks), bool(trend))


@dataclass(frozen=True)
class DeterminacyReport:
    lam: object
    partial_sums: tuple
    paper_sums: tuple
    boundary_terms: tuple
    radii: tuple
    blaschke_partial: tuple
    growth_exponent: float
    classification: str


@dataclass(frozen=True)
class DeterminacyThresholds:
    sum_threshold: float = 1e6
    radius_ratio: float = 1e-6
    circle_tolerance: float = 1e-3


def determinacy_indicator(coeffs, lam, N: int,
                          thresholds: DeterminacyThresholds | None = None) -> DeterminacyReport:
    """Finite-depth evidence for the limit-point / limit-circle alternative.

    ``S_n = (J_[0,n] pi, pi)``; ``paper_sums`` drops the boundary term
    ``b_n^2 |hatP_n|^2``.  ``growth_exponent`` is the least-squares slope of
    ``log S_n`` against ``log(n+1)``.  ``limit_circle_trend`` is reported
    when the last half of the sequence grows by less than
    ``circle_tolerance`` relative.
    """
    thresholds = thresholds or DeterminacyThresholds()
    coeffs = as_coefficients(coeffs)
    ctx = coeffs.prec.ctx
    lam = _check_lam(coeffs, lam)
    if N + 1 > len(coeffs):
        raise InsufficientDepth(f"N={N} needs {N + 1} levels")
    rec = eval_pq(coeffs, lam, N)
    if len(rec.hatP) < N + 1:
        raise InsufficientDepth("renormalized values undefined past a terminated level")
    sums, psums, bterms = [], [], []
    for n in range(N + 1):
        sums.append(ctx.re(j_form(coeffs, rec.hatP, rec.hatP, n)))
        terms = factor_terms(coeffs, rec.hatP, n)
        psums.append(ctx.fsum(abs(t) ** 2 for t in terms))
        bterms.append(coeffs.b[n] ** 2 * abs(rec.hatP[n]) ** 2)
    radii = tuple(weyl_disk(coeffs, lam, j).radius for j in range(1, N + 2))
    bl = []
    acc = ctx.zero
    for z in coeffs.nodes[:N + 1]:
        acc += z.imag / abs(z + 1j) ** 2
        bl.append(acc)

    xs = [math.log(n + 1) for n in range(N + 1)]
    ys = [float(ctx.log(s)) for s in sums]
    if N >= 1:
        xm, ym = sum(xs) / len(xs), sum(ys) / len(ys)
        sxx = sum((x - xm) ** 2 for x in xs)
        growth = sum((x - xm) * (y - ym) for x, y in zip(xs, ys)) / sxx
    else:
        growth = float("nan")

    if sums[-1] > thresholds.sum_threshold or radii[-1] < thresholds.radius_ratio * radii[0]:
        label = "limit_point_trend"
    elif N >= 2 and (sums[-1] - sums[N // 2]) <= thresholds.circle_tolerance * sums[-1]:
        label = "limit_circle_trend"
    else:
        label = "inconclusive"
    return DeterminacyReport(lam, tuple(sums), tuple(psums), tuple(bterms), radii,
                             tuple(bl), growth, label)


@dataclass(frozen=True)
class WeylSolutionResidual:
    residuals: tuple
    identity_rhs: tuple


def weyl_solution_residual(coeffs, lam, N: int, m_value) -> WeylSolutionResidual:
    """``D_n = (m - conj m)/(lam - conj lam) - (J_[0,n](m pi + xi), m pi + xi)`` for n <= N.

    ``identity_rhs[n]`` is the closed form
    ``|m P_n + Q_n|^2 / (Im lam prod_{k<n} b_k^2 |lam - z_k|^2) * Im[(m P_{n+1} + Q_{n+1}) / (m P_n + Q_n)]``,
    which equals ``-D_n``.
    """
    coeffs = as_coefficients(coeffs)
    prec = coeffs.prec
    ctx = prec.ctx
    lam = _check_lam(coeffs, lam)
    m = prec.mpc(m_value)
    P, Q = pq_values(coeffs, lam, N + 1)
    D, rhs = [], []
    norm = ctx.one
    for n in range(N + 1):
        D.append(-quadratic_form(coeffs, lam, n, m))
        a, b = m * P[n] + Q[n], m * P[n + 1] + Q[n + 1]
        rhs.append(abs(a) ** 2 / (lam.imag * norm) * ctx.im(b / a))
        norm *= coeffs.b[n] ** 2 * abs(lam - coeffs.nodes[n]) ** 2
    return WeylSolutionResidual(tuple(D), tuple(rhs))


__all__ = [
    "BlaschkeSum", "DeterminacyReport", "DeterminacyThresholds", "METHODS", "Membership",
    "TangencyReport", "WeylDisk", "WeylSolutionResidual", "blaschke_sum", "determinacy_indicator",
    "disk_membership", "omega", "quadratic_form", "radius_identity_residual", "tangency_report",
    "weyl_disk", "weyl_solution_residual",
]
