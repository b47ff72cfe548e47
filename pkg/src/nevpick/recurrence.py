"""Polynomials of the first and second kind and the Padé approximants they define.

Both kinds solve

    u_{k+1} = (a2_k lam - a1_k) u_k - b_{k-1}^2 (lam - z_{k-1})(lam - conj z_{k-1}) u_{k-1}

with ``P_0 = 1, P_1 = a2_0 lam - a1_0`` and ``Q_0 = 0, Q_1 = +1``.  The
``+1`` keeps ``-Q_{n+1}/P_{n+1}``, the continued fraction and the
Liouville-Ostrogradsky identity consistent with each other.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import DiscreteMeasure
from .errors import InsufficientDepth, PoleProximity
from .pencil import as_coefficients, assemble, mfun_via_matrix

ROUTES = ("ratio", "cfrac", "matrix")


@dataclass(frozen=True)
class EvalRecord:
    """Samples of ``P_k, Q_k`` (k <= j) and their renormalized versions at ``lam``.

    ``hatP``/``hatQ`` stop early when a vanishing ``b`` makes the
    renormalization undefined.  ``hat_defect`` is the largest relative gap
    between the division formula and the renormalized recurrence.
    """

    lam: object
    P: tuple
    Q: tuple
    hatP: tuple
    hatQ: tuple
    hat_defect: object

    @property
    def pi(self):
        return self.hatP

    @property
    def xi(self):
        return self.hatQ


def _node_guard(coeffs, lam, k):
    prec = coeffs.prec
    z = coeffs.nodes[k]
    delta = 1e3 * prec.eps * (1 + abs(z))
    if abs(lam - z) <= delta or abs(lam - prec.ctx.conj(z)) <= delta:
        raise PoleProximity(f"lambda coincides with node z_{k}")


def _weight(coeffs, k, lam):
    """``b_k^2 (lam - z_k)(lam - conj z_k)``."""
    z = coeffs.nodes[k]
    return coeffs.b[k] ** 2 * (lam - z) * (lam - coeffs.prec.ctx.conj(z))


def pq_values(coeffs, lam, j: int):
    """Forward recurrence only: ``(P_0..P_j, Q_0..Q_j)``."""
    coeffs = as_coefficients(coeffs)
    if j > len(coeffs):
        raise InsufficientDepth(f"P_{j} needs {j} levels, have {len(coeffs)}")
    ctx = coeffs.prec.ctx
    lam = coeffs.prec.mpc(lam)
    P = [ctx.mpc(1)]
    Q = [ctx.mpc(0)]
    if j >= 1:
        P.append(coeffs.a2[0] * lam - coeffs.a1[0])
        Q.append(ctx.mpc(1))
    for k in range(1, j):
        lin = coeffs.a2[k] * lam - coeffs.a1[k]
        w = _weight(coeffs, k - 1, lam)
        P.append(lin * P[k] - w * P[k - 1])
        Q.append(lin * Q[k] - w * Q[k - 1])
    return P, Q


def eval_pq(coeffs, lam, j: int, hats: bool = True) -> EvalRecord:
    coeffs = as_coefficients(coeffs)
    prec = coeffs.prec
    ctx = prec.ctx
    lam = prec.mpc(lam)
    P, Q = pq_values(coeffs, lam, j)
    if not hats:
        return EvalRecord(lam, tuple(P), tuple(Q), (), (), ctx.zero)
    # division formula; hat_k needs node k-1 and stops at a vanishing b
    hP, hQ = [P[0]], [Q[0]]
    denom = ctx.mpc(1)
    for k in range(1, j + 1):
        if coeffs.b[k - 1] == 0:
            break
        _node_guard(coeffs, lam, k - 1)
        denom *= coeffs.b[k - 1] * (coeffs.nodes[k - 1] - lam)
        hP.append(P[k] / denom)
        hQ.append(Q[k] / denom)

    # renormalized recurrence, seeded from the first two division values
    h_off, d = coeffs.h_off, coeffs.b
    rP, rQ = hP[:2], hQ[:2]
    for k in range(1, len(hP) - 1):
        back = ctx.conj(h_off[k - 1]) - lam * d[k - 1]
        mid = coeffs.a1[k] - lam * coeffs.a2[k]
        fwd = h_off[k] - lam * d[k]
        rP.append(-(back * rP[k - 1] + mid * rP[k]) / fwd)
        rQ.append(-(back * rQ[k - 1] + mid * rQ[k]) / fwd)

    defect = ctx.zero
    for u, v in zip(hP + hQ, rP + rQ):
        scale = max(abs(u), abs(v))
        if scale:
            defect = max(defect, abs(u - v) / scale)
    return EvalRecord(lam, tuple(P), tuple(Q), tuple(hP), tuple(hQ), defect)


def _cfrac_value(coeffs, lam, n):
    """Backward Riccati sweep ``m_[k,n] = -1 / (a2 lam - a1 + w_k m_[k+1,n])``."""
    m = coeffs.prec.ctx.mpc(0)
    for k in range(n, -1, -1):
        m = -1 / (coeffs.a2[k] * lam - coeffs.a1[k] + _weight(coeffs, k, lam) * m)
    return m


def pade_value(coeffs, lam, n: int, route: str = "ratio"):
    """``m_[0,n](lam) = -Q_{n+1}/P_{n+1}``, the (n+1)-th multipoint diagonal Padé approximant."""
    coeffs = as_coefficients(coeffs)
    prec = coeffs.prec
    lam = prec.mpc(lam)
    if abs(lam.imag) <= prec.geo_tol:
        raise PoleProximity("Padé value requested on the real axis")
    if len(coeffs) < n + 1:
        raise InsufficientDepth(f"m_[0,{n}] needs {n + 1} levels, have {len(coeffs)}")
    if route == "ratio":
        P, Q = pq_values(coeffs, lam, n + 1)
        return -Q[n + 1] / P[n + 1]
    if route == "cfrac":
        return _cfrac_value(coeffs, lam, n)
    if route == "matrix":
        return mfun_via_matrix(assemble(coeffs, n), n, lam)
    raise ValueError(f"unknown route {route!r}")


def route_spread(coeffs, lam, n: int):
    """Values of all three routes and their largest relative disagreement."""
    vals = {r: pade_value(coeffs, lam, n, r) for r in ROUTES}
    ref = vals["ratio"]
    spread = max(abs(v - ref) for v in vals.values()) / abs(ref)
    return vals, spread


def ostrogradsky_product(coeffs, lam, n: int):
    """``prod_{k<n} b_k^2 (lam - z_k)(lam - conj z_k)``."""
    coeffs = as_coefficients(coeffs)
    lam = coeffs.prec.mpc(lam)
    out = coeffs.prec.ctx.mpc(1)
    for k in range(n):
        out *= _weight(coeffs, k, lam)
    return out


def ostrogradsky_residual(coeffs, lam, n: int, guard: int | None = None):
    """Relative defect of ``Q_{n+1} P_n - Q_n P_{n+1} = prod_{k<n} b_k^2 (lam - z_k)(lam - conj z_k)``.

    Near clustered nodes the product is tiny while ``Q P`` is not, so the
    left side is formed on a context ``guard`` bits wider (default
    ``32 + 16 n``); the coefficients themselves are used unchanged.
    """
    coeffs = as_coefficients(coeffs)
    prec = coeffs.prec
    lam = prec.mpc(lam)
    wide = coeffs.widened(32 + 16 * n if guard is None else guard)
    P, Q = pq_values(wide, lam, n + 1)
    prod = ostrogradsky_product(wide, lam, n)
    left, right = Q[n + 1] * P[n], Q[n] * P[n + 1]
    # lam on a node: both sides vanish, measure against the terms instead
    scale = abs(prod) or max(abs(left) + abs(right), wide.prec.ctx.one)
    return prec.mpf(abs(left - right - prod) / scale)


def j_form(coeffs, x, y, j: int):
    """``(J_[0,j] x, y) = sum (J x)_k conj(y_k)`` straight from the pencil entries."""
    coeffs = as_coefficients(coeffs)
    ctx = coeffs.prec.ctx
    terms = []
    for k in range(j + 1):
        jx = coeffs.a2[k] * x[k]
        if k > 0:
            jx += coeffs.b[k - 1] * x[k - 1]
        if k < j:
            jx += coeffs.b[k] * x[k + 1]
        terms.append(jx * ctx.conj(y[k]))
    return ctx.fsum(terms)


def factor_terms(coeffs, hats, j: int):
    """``hat_k + b_{k-1} hat_{k-1}`` for k <= j (entries of ``L`` applied to the vector)."""
    coeffs = as_coefficients(coeffs)
    out = [hats[0]]
    for k in range(1, j + 1):
        out.append(hats[k] + coeffs.b[k - 1] * hats[k - 1])
    return out


def _cd_parts(coeffs, lam, zeta, j):
    coeffs = as_coefficients(coeffs)
    prec = coeffs.prec
    ctx = prec.ctx
    lam, zeta = prec.mpc(lam), prec.mpc(zeta)
    rl = eval_pq(coeffs, lam, j)
    rz = eval_pq(coeffs, zeta, j)
    if len(rl.hatP) < j + 1 or len(rz.hatP) < j + 1:
        raise InsufficientDepth("renormalized values undefined past a terminated level")
    cz = ctx.conj(zeta)
    Pl, _ = pq_values(coeffs, lam, j + 1)
    Pc, _ = pq_values(coeffs, cz, j + 1)
    lhs = (lam - cz) * j_form(coeffs, rl.hatP, rz.hatP, j)
    den = ctx.mpc(1)
    for k in range(j):
        z = coeffs.nodes[k]
        den *= coeffs.b[k] ** 2 * (lam - z) * (cz - ctx.conj(z))
    rhs = (Pl[j + 1] * Pc[j] - Pc[j + 1] * Pl[j]) / den
    return coeffs, rl, rz, lhs, rhs


def christoffel_darboux_residual(coeffs, lam, zeta, j: int):
    """Relative defect of the quadratic-form Christoffel-Darboux identity.

    ``(lam - conj zeta)(J_[0,j] pi(lam), pi(zeta))`` against
    ``[P_{j+1}(lam) P_j(conj zeta) - P_{j+1}(conj zeta) P_j(lam)] / prod_k b_k^2 (lam - z_k)(conj zeta - conj z_k)``.
    """
    _, _, _, lhs, rhs = _cd_parts(coeffs, lam, zeta, j)
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs))


@dataclass(frozen=True)
class CDComparison:
    """Quadratic form vs. the plain sum of squared ``L``-terms."""

    quadratic_form: object
    summed_form: object
    boundary_term: object
    rhs: object
    mismatch_factor: object


def christoffel_darboux_gap(coeffs, lam, zeta, j: int) -> CDComparison:
    """Compare the summed form with the quadratic form.

    They differ by ``(lam - conj zeta) b_j^2 hatP_j(lam) conj hatP_j(zeta)``,
    the last row of the rectangular ``L`` section.
    """
    coeffs, rl, rz, lhs, rhs = _cd_parts(coeffs, lam, zeta, j)
    ctx = coeffs.prec.ctx
    fl = factor_terms(coeffs, rl.hatP, j)
    fz = factor_terms(coeffs, rz.hatP, j)
    factor = rl.lam - ctx.conj(rz.lam)
    summed = factor * ctx.fsum(a * ctx.conj(b) for a, b in zip(fl, fz))
    boundary = factor * coeffs.b[j] ** 2 * rl.hatP[j] * ctx.conj(rz.hatP[j])
    return CDComparison(lhs, summed, boundary, rhs, rhs / summed)


@dataclass(frozen=True)
class OrthogonalityReport:
    gram: tuple
    gram_defect: object
    hatP1_integral: object
    hatP1_expected: object
    hatP1_uncorrected: object


def orthogonality_check(measure: DiscreteMeasure, coeffs, j: int) -> OrthogonalityReport:
    """Gram table of ``f_k = hatP_k + b_{k-1} hatP_{k-1}`` in ``L^2(sigma)``, k <= j.

    Also integrates ``hatP_1``.  Writing ``a2 t - a1 = -a2 (z_0 - t) - 1/phi(z_0)``
    gives ``(1 - a2_0) / b_0 = -b_0``; ``hatP1_uncorrected`` is the value
    ``1 - a2_0`` without the ``b_0`` division; the two agree only when ``b_0 = 1``.
    """
    coeffs = as_coefficients(coeffs)
    ctx = coeffs.prec.ctx
    if j >= len(measure):
        raise ValueError(f"only {len(measure)} functions can be orthonormal in L2(sigma)")
    samples = []
    for t in measure.positions:
        rec = eval_pq(coeffs, t, max(j, 1))
        if len(rec.hatP) < j + 1:
            raise InsufficientDepth("renormalized values undefined past a terminated level")
        samples.append((factor_terms(coeffs, rec.hatP, j), rec.hatP))
    ws = measure.weights
    gram = tuple(
        tuple(ctx.fsum(w * f[p] * ctx.conj(f[q]) for w, (f, _) in zip(ws, samples))
              for q in range(j + 1))
        for p in range(j + 1)
    )
    defect = max(abs(gram[p][q] - (1 if p == q else 0))
                 for p in range(j + 1) for q in range(j + 1))
    hat1 = None
    if j >= 1:
        hat1 = ctx.fsum(w * hp[1] for w, (_, hp) in zip(ws, samples))
    uncorrected = 1 - coeffs.a2[0]
    return OrthogonalityReport(gram, defect, hat1, uncorrected / coeffs.b[0], uncorrected)


__all__ = [
    "CDComparison", "EvalRecord", "OrthogonalityReport", "ROUTES",
    "christoffel_darboux_gap", "christoffel_darboux_residual", "eval_pq", "j_form",
    "orthogonality_check", "ostrogradsky_product", "ostrogradsky_residual", "pade_value",
    "factor_terms", "pq_values", "route_spread",
]
