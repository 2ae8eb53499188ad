"""Exact Prokhorov solver, brute-force oracle, couplings and rescaling."""

import numpy as np
import pytest

import convdist as cd
from convdist.errors import BudgetExceededError, RejectedInputError

from conftest import random_finite_1d, random_lattice_1d


def _point(x):
    return cd.FiniteMeasure(np.array([[float(x)]]), np.array([1.0]))


# ---------------------------------------------------------------------------
# exact solver basics
# ---------------------------------------------------------------------------

def test_identity_distance_zero_with_identity_plan():
    f, _ = cd.to_finite(cd.power(cd.uniform3(), 3), 0.0)
    res = cd.prokhorov_exact(f, f)
    assert res.epsilon == 0.0
    rows, cols = res.plan.marginals()
    np.testing.assert_allclose(rows, f.masses, atol=1e-12)
    np.testing.assert_allclose(cols, f.masses, atol=1e-12)
    exceed, ok = cd.coupling_check(res.plan, 0.0)
    assert exceed == 0.0 and ok


def test_point_mass_distances():
    assert cd.prokhorov_exact(_point(0), _point(0.3)).epsilon == pytest.approx(0.3, abs=1e-15)
    assert cd.prokhorov_exact(_point(0), _point(5)).epsilon == 1.0
    # the degenerate plan pairs the two atoms deterministically
    res = cd.prokhorov_exact(_point(0), _point(0.3))
    np.testing.assert_allclose(res.plan.joint, [[1.0]], atol=0)


def test_accepts_lattice_inputs():
    res = cd.prokhorov_exact(cd.point_mass(0.0), cd.point_mass(0.3))
    assert res.epsilon == pytest.approx(0.3, abs=1e-15)


def test_budget_error_names_budget():
    f, _ = cd.to_finite(cd.power(cd.uniform3(), 10), 0.0)
    with pytest.raises(BudgetExceededError, match="budget 5"):
        cd.prokhorov_exact(f, f, point_budget=5)


def test_deficiency_curve_shape():
    f, _ = cd.to_finite(cd.power(cd.rademacher(), 6), 0.0)
    g, _ = cd.to_finite(cd.power(cd.rademacher(), 7), 0.0)
    res = cd.prokhorov_exact(f, g)
    radii = [r for r, _ in res.deficiency_curve]
    defs = [d for _, d in res.deficiency_curve]
    assert radii == sorted(radii)
    assert all(a >= b - 1e-15 for a, b in zip(defs, defs[1:]))  # nonincreasing
    assert res.epsilon == pytest.approx(
        min(1.0, min(max(r, d) for r, d in res.deficiency_curve)), abs=0
    )


# ---------------------------------------------------------------------------
# brute-force oracle
# ---------------------------------------------------------------------------

def test_bruteforce_point_masses():
    for a, b in ((0.0, 0.3), (0.0, 5.0), (1.0, 1.0), (-0.5, 0.25)):
        want = min(1.0, abs(b - a))
        assert cd.prokhorov_bruteforce(_point(a), _point(b)) == pytest.approx(want, abs=1e-15)


def test_bruteforce_identity():
    f = random_finite_1d(np.random.default_rng(1))
    assert cd.prokhorov_bruteforce(f, f) == 0.0


def test_bruteforce_size_guard():
    f, _ = cd.to_finite(cd.power(cd.uniform3(), 5), 0.0)
    with pytest.raises(RejectedInputError):
        cd.prokhorov_bruteforce(f, f)


def test_exact_matches_bruteforce_dyadic_pairs():
    rng = np.random.default_rng(42)
    for _ in range(150):
        f = random_finite_1d(rng)
        g = random_finite_1d(rng)
        exact = cd.prokhorov_exact(f, g, include_plan=False).epsilon
        brute = cd.prokhorov_bruteforce(f, g)
        assert exact == pytest.approx(brute, abs=1e-10)


def test_exact_matches_bruteforce_general_float_masses_2d():
    rng = np.random.default_rng(43)
    for _ in range(60):
        pts_f = rng.normal(size=(int(rng.integers(1, 5)), 2))
        pts_g = rng.normal(size=(int(rng.integers(1, 5)), 2))
        wf = rng.random(len(pts_f)); wf /= wf.sum()
        wg = rng.random(len(pts_g)); wg /= wg.sum()
        f = cd.FiniteMeasure(pts_f, wf)
        g = cd.FiniteMeasure(pts_g, wg)
        exact = cd.prokhorov_exact(f, g, include_plan=False).epsilon
        brute = cd.prokhorov_bruteforce(f, g)
        assert exact == pytest.approx(brute, abs=1e-10)


# ---------------------------------------------------------------------------
# metric properties
# ---------------------------------------------------------------------------

def test_symmetry_and_triangle_inequality():
    rng = np.random.default_rng(44)
    for _ in range(40):
        f = random_finite_1d(rng, dyadic=False)
        g = random_finite_1d(rng, dyadic=False)
        h = random_finite_1d(rng, dyadic=False)
        dfg = cd.prokhorov_exact(f, g, include_plan=False).epsilon
        dgf = cd.prokhorov_exact(g, f, include_plan=False).epsilon
        assert dfg == pytest.approx(dgf, abs=1e-10)
        dfh = cd.prokhorov_exact(f, h, include_plan=False).epsilon
        dgh = cd.prokhorov_exact(g, h, include_plan=False).epsilon
        assert dfh <= dfg + dgh + 1e-10


def test_dominated_by_total_variation():
    rng = np.random.default_rng(45)
    for _ in range(30):
        f = random_finite_1d(rng)
        g = random_finite_1d(rng)
        eps = cd.prokhorov_exact(f, g, include_plan=False).epsilon
        assert eps <= cd.total_variation(f, g).value + 1e-12


def test_convolution_smoothing():
    rng = np.random.default_rng(46)
    for _ in range(25):
        f = random_lattice_1d(rng, max_cells=4)
        g = random_lattice_1d(rng, max_cells=4)
        h = random_lattice_1d(rng, max_cells=4)
        before = cd.prokhorov_exact(f, g, include_plan=False).epsilon
        after = cd.prokhorov_exact(
            cd.convolve(f, h), cd.convolve(g, h), include_plan=False
        ).epsilon
        assert after <= before + 1e-10


# ---------------------------------------------------------------------------
# couplings
# ---------------------------------------------------------------------------

def test_solver_plans_pass_their_own_check():
    rng = np.random.default_rng(47)
    for _ in range(30):
        f = random_finite_1d(rng)
        g = random_finite_1d(rng)
        res = cd.prokhorov_exact(f, g)
        exceed, ok = cd.coupling_check(res.plan, res.epsilon)
        assert ok, (exceed, res.epsilon)
        rows, cols = res.plan.marginals()
        assert np.max(np.abs(rows - f.masses)) < 1e-10
        assert np.max(np.abs(cols - g.masses)) < 1e-10


def test_independent_product_plan_boundary():
    pts = np.array([[-1.0], [1.0]])
    plan = cd.CouplingPlan(row_points=pts, col_points=pts, joint=np.full((2, 2), 0.25))
    exceed, ok = cd.coupling_check(plan, 0.5)
    assert exceed == pytest.approx(0.5, abs=1e-15)
    assert ok  # boundary case: exceedance equals the level


def test_naive_shift_coupling_bounded_support():
    plan = cd.naive_shift_coupling(cd.rademacher(), 6)
    fn = cd.power(cd.rademacher(), 6)
    fn1 = cd.power(cd.rademacher(), 7)
    rows, cols = plan.marginals()
    _, wf = fn.support()
    _, wg = fn1.support()
    assert np.max(np.abs(rows - wf)) < 1e-12
    assert np.max(np.abs(cols - wg)) < 1e-12
    exceed, _ = cd.coupling_check(plan, 1.0)  # support radius of the base
    assert exceed == pytest.approx(0.0, abs=1e-15)


# ---------------------------------------------------------------------------
# rescaling transfer
# ---------------------------------------------------------------------------

def test_scaling_transfer_equal_scales():
    rng = np.random.default_rng(48)
    f = random_finite_1d(rng)
    g = random_finite_1d(rng)
    lhs, rhs = cd.scaling_transfer(f, g, 2.0, 2.0)
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_scaling_transfer_contraction_and_general():
    rng = np.random.default_rng(49)
    for _ in range(20):
        f = random_finite_1d(rng)
        g = random_finite_1d(rng)
        lhs, rhs = cd.scaling_transfer(f, g, 1.0, 4.0)  # extra shrinking
        assert lhs <= rhs + 1e-10
        lhs, rhs = cd.scaling_transfer(f, g, 4.0, 1.0)
        assert lhs <= rhs + 1e-10


def test_scaling_transfer_rejects_bad_scales():
    f = random_finite_1d(np.random.default_rng(50))
    with pytest.raises(RejectedInputError):
        cd.scaling_transfer(f, f, 0.0, 1.0)
