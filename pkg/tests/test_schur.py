import warnings
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nevpick import fixtures
from nevpick.core import DiscreteMeasure, InterpolationProblem, Precision
from nevpick.errors import (AsymmetricData, DegenerateTail, DepthExceedsSupport, NotHerglotzData,
                            PoleProximity)
from nevpick.schur import (SchurParameters, build_chain_from_measure, build_chain_from_values,
                           schur_coeffs_via_integrals, schur_step, schur_tail)


def test_schur_step_examples(prec):
    assert schur_step(0.5j, -0.5j, 1j, prec) == (0, 2, 1)
    a1, a2, b2 = schur_step(prec.mpc(Fraction(2, 3)) * 1j, prec.mpc(Fraction(-2, 3)) * 1j, 1j, prec)
    assert a1 == 0 and abs(a2 - 1.5) <= 4 * prec.eps and abs(b2 - 0.5) <= 4 * prec.eps
    assert schur_step(1j, -1j, 1j, prec) == (0, 1, 0)


def test_schur_step_errors(prec):
    with pytest.raises(AsymmetricData):
        schur_step(0.5j, 0.5j, 1j, prec)
    with pytest.raises(NotHerglotzData):
        schur_step(-0.5j, 0.5j, 1j, prec)
    with pytest.raises(NotHerglotzData):
        schur_step(0, 0, 1j, prec)
    with pytest.raises(ValueError):
        schur_step(0.5j, -0.5j, -1j, prec)


def test_schur_step_is_deterministic(prec):
    w = prec.mpc(0.3 + 0.7j)
    assert schur_step(w, prec.ctx.conj(w), 1 + 1j, prec) == schur_step(w, prec.ctx.conj(w), 1 + 1j, prec)


def test_coeffs_via_integrals_examples(prec, two_atom):
    m, _ = two_atom
    assert schur_coeffs_via_integrals(m, 1j) == (0, 2)
    assert schur_coeffs_via_integrals(DiscreteMeasure([(0, 1)], prec), 1j) == (0, 1)
    three = DiscreteMeasure([(-1, "1/3"), (0, "1/3"), (1, "1/3")], prec)
    a1, a2 = schur_coeffs_via_integrals(three, 1j)
    assert abs(a1) <= 4 * prec.eps and abs(a2 - 1.5) <= 8 * prec.eps


def test_tail_examples(prec, two_atom):
    m, _ = two_atom
    tail = schur_tail(m, SchurParameters(prec.mpc(1j), 0, 2, 1, 0), prec)
    assert abs(tail(2j) - prec.mpc(0.5j)) <= 8 * prec.eps
    for lam in (0.3 + 0.2j, -2 + 1j, 5j):
        assert abs(tail(lam) + 1 / prec.mpc(lam)) <= 16 * prec.eps
    with pytest.raises(PoleProximity):
        tail(1j)
    with pytest.raises(PoleProximity):
        tail(-1j)
    with pytest.raises(DegenerateTail):
        schur_tail(lambda lam: -1 / lam, SchurParameters(prec.mpc(1j), 0, 1, 0, 0), prec)


def test_chain_two_atom(two_atom):
    _, chain = two_atom
    assert [(p.a1, p.a2, p.b) for p in chain.steps] == [(0, 2, 1), (0, 1, 0)]
    assert chain.terminated_at == 1
    assert chain.termination == "rational_terminated at level 1"
    assert chain.steps[1].degenerate


def test_chain_point_mass(prec):
    with pytest.warns(DepthExceedsSupport):
        chain = build_chain_from_measure(DiscreteMeasure([(0, 1)], prec), [1 + 1j], 1)
    assert chain.terminated_at == 0


def test_chain_three_atom(prec):
    three = DiscreteMeasure([(-1, "1/3"), (0, "1/3"), (1, "1/3")], prec)
    with pytest.warns(DepthExceedsSupport):
        chain = build_chain_from_measure(three, [1j, 2j, 3j], 3)
    s0 = chain.steps[0]
    assert abs(s0.a1) <= 4 * prec.eps and abs(s0.a2 - 1.5) <= 8 * prec.eps
    assert abs(s0.b - prec.ctx.sqrt(0.5)) <= 8 * prec.eps
    assert chain.terminated_at is not None and chain.terminated_at <= 2


def test_chain_input_checks(prec, two_atom):
    m, _ = two_atom
    with pytest.raises(ValueError):
        build_chain_from_measure(m, [1j, 1j], 2)
    with pytest.raises(ValueError):
        build_chain_from_measure(m, [1j], 2)
    with pytest.raises(ValueError):
        build_chain_from_measure(m, [1j], 0)


def test_values_pipeline_examples(prec):
    problem = InterpolationProblem([1j, 2j], [0.5j, prec.mpc(Fraction(2, 5)) * 1j], prec)
    chain = build_chain_from_values(problem, 1)
    assert (chain.steps[0].a1, chain.steps[0].a2, chain.steps[0].b) == (0, 2, 1)
    assert abs(chain.tail(2j) - prec.mpc(0.5j)) <= 8 * prec.eps
    chain = build_chain_from_values(problem, 2)
    assert chain.terminated_at == 1
    assert abs(chain.steps[1].a2 - 1) <= 8 * prec.eps
    three = InterpolationProblem([1j], [prec.mpc(Fraction(2, 3)) * 1j], prec)
    s0 = build_chain_from_values(three, 1).steps[0]
    assert abs(s0.a2 - 1.5) <= 8 * prec.eps and abs(s0.b - prec.ctx.sqrt(0.5)) <= 8 * prec.eps


def test_values_pipeline_rejects_non_herglotz(prec):
    # Im(-1/w) below 1 at the first node means a2 < 1: not of class R0
    problem = InterpolationProblem([1j, 2j], [2j, 0.1j], prec)
    with pytest.raises(NotHerglotzData):
        build_chain_from_values(problem, 2)
    with pytest.raises(ValueError):
        build_chain_from_values(problem, 3)


def test_coefficients_match_wide_reference(uniform64):
    """Guarded recursion reproduces a 512-bit run on the same atoms to working accuracy."""
    m, pts, chain, _, _ = uniform64
    wide = Precision(512)
    ref = build_chain_from_measure(m.with_precision(wide), [wide.mpc(z) for z in pts], 13)
    eps = m.prec.eps
    for a, b in zip(chain.steps, ref.steps):
        assert abs(a.a2 - b.a2) <= 16 * eps * b.a2
        assert abs(a.a1 - b.a1) <= 16 * eps * max(1, abs(b.a1))
        assert abs(a.b - b.b) <= 16 * eps * b.b


def test_pipelines_agree_on_shallow_uniform_chain(uniform64):
    m, pts, chain, _, _ = uniform64
    problem = InterpolationProblem(pts[:3], [m(z) for z in pts[:3]], m.prec)
    vchain = build_chain_from_values(problem, 3)
    eps = m.prec.eps
    for a, b in zip(vchain.steps, chain.steps):
        assert abs(a.a2 - b.a2) <= 1e3 * eps * b.a2
        assert abs(a.a1 - b.a1) <= 1e3 * eps * max(1, abs(b.a1))


def test_deep_coefficients_amplify_data_rounding(uniform64):
    """Rounding the data to 128 bits already moves level 7 by far more than 1e3 eps.

    Both runs below use 512-bit arithmetic, so the gap is conditioning of the
    data-to-coefficient map on these clustered nodes, not roundoff.
    """
    m, pts, _, _, _ = uniform64
    wide = Precision(512)
    mw = m.with_precision(wide)
    zs = [wide.mpc(z) for z in pts[:8]]
    exact = [mw(z) for z in zs]
    rounded = [wide.mpc(m.prec.mpc(w)) for w in exact]
    a = build_chain_from_values(InterpolationProblem(zs, exact, wide), 8)
    b = build_chain_from_values(InterpolationProblem(zs, rounded, wide), 8)
    gap = abs(a.steps[7].a2 - b.steps[7].a2) / a.steps[7].a2
    assert gap > 1e6 * m.prec.eps


def test_step_invariants_on_uniform_chain(uniform64):
    m, pts, chain, _, _ = uniform64
    eps = m.prec.eps
    assert chain.terminated_at is None and len(chain) == 13
    assert [p.level for p in chain.steps] == list(range(13))
    for p in chain.steps:
        assert p.a2 > 1
        assert abs(p.b ** 2 - (p.a2 - 1)) <= 16 * eps * p.a2
    a1, a2 = schur_coeffs_via_integrals(m, pts[0])
    assert abs(a1 - chain.steps[0].a1) <= 1e2 * eps * max(1, abs(a1))
    assert abs(a2 - chain.steps[0].a2) <= 1e2 * eps * a2


def test_open_chain_tail_is_herglotz(uniform64):
    m, pts, _, _, _ = uniform64
    chain = build_chain_from_measure(m, pts, 6)
    assert chain.tail(pts[6]).imag > 0


measures = st.lists(st.tuples(st.integers(-30, 30), st.integers(1, 9)),
                    min_size=3, max_size=7, unique_by=lambda a: a[0])


@settings(max_examples=25, deadline=None)
@given(measures, st.integers(0, 1000))
def test_random_measure_chains(raw, seed):
    prec = Precision(128)
    m = DiscreteMeasure([(Fraction(t, 10), w) for t, w in raw], prec, normalize=True)
    pts = [prec.ctx.mpc(((seed * (k + 3)) % 17) / 8 - 1, 0.5 + k / 4) for k in range(len(m))]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        chain = build_chain_from_measure(m, pts, len(m))
    # an n-atom measure exhausts by level n - 1
    assert chain.terminated_at is not None and chain.terminated_at <= len(m) - 1
    for p in chain.steps[:-1]:
        assert p.a2 > 1
        assert abs(p.b ** 2 - (p.a2 - 1)) <= 16 * prec.eps * p.a2
    first = chain.steps[0]
    a1, a2 = schur_coeffs_via_integrals(m, pts[0])
    assert abs(a2 - first.a2) <= 1e2 * prec.eps * a2
    assert abs(a1 - first.a1) <= 1e2 * prec.eps * max(1, abs(a1), a2 * abs(pts[0]))
    depth = min(2, len(chain))
    vals = build_chain_from_values(InterpolationProblem(pts, [m(z) for z in pts], prec), depth)
    # the level-1 tail divides the rounded data by b_0^2, which sets the conditioning
    cond = max(1, 1 / first.b ** 2)
    for a, b in zip(vals.steps, chain.steps):
        assert abs(a.a2 - b.a2) <= 1e3 * prec.eps * b.a2 * (cond if b.level else 1)


def test_fixture_grid_avoids_nodes(prec):
    grid = fixtures.standard_grid(prec)
    assert len(grid) == 20
    for lam in grid:
        assert -2 <= lam.real <= 2 and 0.5 <= lam.imag <= 2
        for z in fixtures.standard_points(13, prec):
            assert abs(lam - z) > prec.geo_tol
