"""One test per acceptance criterion; each prints a PASS/FAIL line in the summary.

Criteria that cannot be met as stated are strict xfails: the assertion keeps
the stated tolerance, the line reads FAIL, and an unexpected pass errors.
"""

import time

import pytest
from conftest import ACCEPTANCE_LINES, random_lambdas, rel

from nevpick import fixtures
from nevpick.core import InterpolationProblem, Precision
from nevpick.harness import run_convergence, run_interpolation_check, windowed_nonincreasing
from nevpick.pencil import (j_inverse_entry, leading_j_determinants, pencil_eigenvalues,
                            second_kind_zeros)
from nevpick.recurrence import (christoffel_darboux_residual, eval_pq, orthogonality_check,
                                ostrogradsky_residual, pade_value, pq_values, route_spread)
from nevpick.schur import build_chain_from_values
from nevpick.weyl import (blaschke_sum, omega, radius_identity_residual, tangency_report,
                          weyl_disk)

# oracle run on the standard fixture, frozen
PINNED_J_INVERSE_12 = "0.999999999991148687004573922102"
GOLDEN_SUP_N12 = "0.000022764816534232350529"


def record(num, ok, detail):
    line = f"criterion {num}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES[num] = line
    print(line)
    return ok


def test_criterion_1_two_atom_exactness(prec, two_atom):
    t0 = time.perf_counter()
    m, chain = two_atom
    tol = 1e2 * prec.eps
    ctx = prec.ctx
    worst = ctx.zero
    coeffs_ok = [(p.a1, p.a2, p.b) for p in chain.steps] == [(0, 2, 1), (0, 1, 0)] \
        and chain.terminated_at == 1
    for lam in random_lambdas(prec, 10, 101, im=(0.25, 2)):
        P, Q = pq_values(chain, lam, 2)
        expect_P = [1, 2 * lam, lam ** 2 - 1]
        expect_Q = [0, 1, lam]
        worst = max([worst] + [abs(a - b) / max(1, abs(b)) for a, b in zip(P, expect_P)]
                    + [abs(a - b) / max(1, abs(b)) for a, b in zip(Q, expect_Q)])
        phi = lam / (1 - lam ** 2)
        worst = max(worst, rel(pade_value(chain, lam, 1), phi))
    for j, (c, r) in ((1, (prec.mpc(0.125j), prec.mpf("1/8"))),
                      (2, (prec.mpc([0, "13/40"]), prec.mpf("3/40")))):
        d = weyl_disk(chain, 2j, j)
        worst = max(worst, abs(d.center - c), abs(d.radius - r))
    elapsed = time.perf_counter() - t0
    ok = coeffs_ok and worst <= tol and elapsed < 1
    record(1, ok, f"chain exact={coeffs_ok}, worst deviation {float(worst / prec.eps):.2f} eps "
                  f"(tol 1e2 eps), {elapsed:.2f}s (< 1s)")
    assert ok


def test_criterion_2_identity_suite(prec, uniform64):
    t0 = time.perf_counter()
    _, _, _, c, _ = uniform64
    lams = random_lambdas(prec, 100, 202, im=(0.25, 2))
    zetas = lams[1:] + lams[:1]
    ostro = cd = spread = hat = prec.ctx.zero
    for lam, zeta in zip(lams, zetas):
        rec = eval_pq(c, lam, 12)
        hat = max(hat, rec.hat_defect)
        for n in range(13):
            ostro = max(ostro, ostrogradsky_residual(c, lam, n))
            cd = max(cd, christoffel_darboux_residual(c, lam, zeta, n))
            spread = max(spread, route_spread(c, lam, n)[1])
    elapsed = time.perf_counter() - t0
    e = prec.eps
    ok = ostro <= 1e-25 and cd <= 1e-25 and spread <= 1e3 * e and hat <= 1e3 * e and elapsed < 30
    record(2, ok, f"ostrogradsky {float(ostro):.1e}, CD {float(cd):.1e} (tol 1e-25); "
                  f"routes {float(spread / e):.1f} eps, hats {float(hat / e):.1f} eps "
                  f"(tol 1e3 eps); {elapsed:.1f}s (< 30s)")
    assert ok


def test_criterion_3_positivity_bounds(prec, uniform64):
    _, _, _, c, pen = uniform64
    dets_ok = all(d > 0 for d in leading_j_determinants(pen))
    vals = [j_inverse_entry(pen, n) for n in range(13)]
    trend_ok = all(0 < v <= 1 for v in vals) and all(b >= a for a, b in zip(vals, vals[1:])) \
        and vals[12] >= 0.9
    pinned_ok = rel(vals[12], prec.mpf(PINNED_J_INVERSE_12)) <= 1e-25
    bound_ok = herg_ok = True
    grid = fixtures.standard_grid(prec)
    for lam in grid + [prec.ctx.conj(g) for g in grid]:
        for n in range(13):
            v = pade_value(c, lam, n)
            bound_ok &= abs(v) <= 1 / abs(lam.imag)
            if lam.imag > 0:
                herg_ok &= v.imag > 0
    ok = dets_ok and trend_ok and pinned_ok and bound_ok and herg_ok
    record(3, ok, f"dets>0={dets_ok}, (J^-1 e0,e0) trend={trend_ok} final "
                  f"{prec.ctx.nstr(vals[12], 15)} pinned={pinned_ok}, |m|<=1/|Im|={bound_ok}, "
                  f"Im m>0={herg_ok}")
    assert ok


@pytest.mark.xfail(strict=True, reason="values-only coefficients are ill-conditioned in the "
                   "data on this fixture; see the decisions ledger")
def test_criterion_4_interpolation(prec, uniform64):
    m, pts, chain, _, _ = uniform64
    resid_ok = True
    for pipeline in ("measure", "values"):
        for n in range(8):
            for r in run_interpolation_check(m, pts, n, pipeline=pipeline).rows:
                w = m(r["z"])
                resid_ok &= r["residual"] <= 1e4 * prec.eps * max(1, abs(w))
    vchain = build_chain_from_values(InterpolationProblem(pts[:8], [m(z) for z in pts[:8]], prec), 8)
    gap = prec.ctx.zero
    for a, b in zip(vchain.steps, chain.steps):
        gap = max(gap, abs(a.a2 - b.a2) / b.a2, abs(a.b - b.b) / b.b,
                  abs(a.a1 - b.a1) / max(1, abs(b.a1)))
    ok = resid_ok and gap <= 1e3 * prec.eps
    record(4, ok, f"residuals within 1e4 eps={resid_ok}; pipeline coefficient gap "
                  f"{float(gap / prec.eps):.2e} eps (tol 1e3 eps)")
    assert ok


@pytest.mark.xfail(strict=True, reason="the error ratio between depths 4 and 12 is about 686 on "
                   "this fixture, short of 1e3; see the decisions ledger")
def test_criterion_5_convergence():
    p = Precision(256)
    m = fixtures.uniform_measure(p)
    pts = fixtures.standard_points(13, p)
    blaschke = blaschke_sum(pts, 13, p).divergence_trend
    rep = run_convergence(m, pts, 12, fixtures.standard_grid(p), "uniform64")
    ratio = rep.sup_errors[4] / rep.sup_errors[12]
    golden = rel(rep.sup_errors[12], p.mpf(GOLDEN_SUP_N12)) <= 1e-15
    windowed = windowed_nonincreasing(rep.sup_errors)
    ok = blaschke and ratio >= 1e3 and windowed and golden and rep.runtime < 60
    record(5, ok, f"ratio err(4)/err(12) = {float(ratio):.1f} (need >= 1e3), windowed "
                  f"nonincreasing={windowed}, golden={golden}, divergent Blaschke={blaschke}, "
                  f"{rep.runtime:.1f}s (< 60s)")
    assert ok


def test_criterion_6_weyl_geometry(prec, uniform64, two_atom):
    _, _, _, c, _ = uniform64
    e = prec.eps
    fit = common = ident = prec.ctx.zero
    for lam in random_lambdas(prec, 50, 606, im=(0.25, 2)):
        for j in range(1, 13):
            a = weyl_disk(c, lam, j)
            b = weyl_disk(c, lam, j, "three_point_fit")
            fit = max(fit, rel(a.radius, b.radius),
                      abs(a.center - b.center) / max(abs(a.center), a.radius))
            ident = max(ident, radius_identity_residual(c, lam, j + 1) if j < 12 else 0)
            if j < 12:
                assert omega(c, lam, None, j + 1) == omega(c, lam, 0, j)
                t = tangency_report(c, lam, j)
                common = max(common, max(t.on_circle_residuals) / max(1, abs(t.common_point)))
    _, chain = two_atom
    uncorrected = weyl_disk(chain, 2j, 1, "paper_formula").radius / weyl_disk(chain, 2j, 1).radius
    ok = fit <= 1e3 * e and common <= 1e2 * e and ident <= 1e3 * e and uncorrected == 2
    record(6, ok, f"fit vs determinant {float(fit / e):.1f} eps (tol 1e3), common point "
                  f"{float(common / e):.1f} eps (tol 1e2), radius identity {float(ident / e):.1f} "
                  f"eps (tol 1e3); uncorrected radius off by factor {float(uncorrected):g}, reported only")
    assert ok


def test_criterion_7_interlacing(prec, uniform64):
    _, _, _, _, pen = uniform64
    ok = True
    for n in range(11):
        lo, hi = pencil_eigenvalues(pen, n), pencil_eigenvalues(pen, n + 1)
        ok &= all(hi[i] < lo[i] < hi[i + 1] for i in range(n + 1))
        if n >= 1:
            q = second_kind_zeros(pen, n)
            ok &= all(lo[i] < q[i] < lo[i + 1] for i in range(n))
    record(7, ok, "eigenvalues of orders n, n+1 and zeros of Q_{n+1}, P_{n+1} strictly "
                  f"interlace for n <= 10: {ok}")
    assert ok


@pytest.mark.xfail(strict=True, reason="the integral of hatP_1 is (1 - a2_0)/b_0, which equals "
                   "1 - a2_0 only when b_0 = 1; see the decisions ledger")
def test_criterion_8_orthogonality(prec, two_atom, uniform64):
    m2, chain = two_atom
    m64, _, _, c, _ = uniform64
    tol = 1e3 * prec.eps
    rows = []
    for name, meas, coeffs, top in (("two-atom", m2, chain, 1), ("64-node", m64, c, 6)):
        rep = orthogonality_check(meas, coeffs, top)
        uncorrected = abs(rep.hatP1_integral - rep.hatP1_uncorrected)
        rows.append((name, rep.gram_defect, uncorrected,
                     abs(rep.hatP1_integral - rep.hatP1_expected)))
    gram_ok = all(g <= tol for _, g, _, _ in rows)
    uncorrected_ok = all(p <= tol for _, _, p, _ in rows)
    corrected_ok = all(q <= tol for _, _, _, q in rows)
    ok = gram_ok and uncorrected_ok
    detail = "; ".join(f"{n}: gram {float(g / prec.eps):.1f} eps, |int hatP1 - (1-a2)| "
                       f"{float(p):.3g}" for n, g, p, _ in rows)
    record(8, ok, f"{detail} (tol 1e3 eps); corrected (1-a2)/b0 holds={corrected_ok}")
    assert ok
