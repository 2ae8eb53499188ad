"""Acceptance suite: every quantitative exit criterion at its stated tolerance.

Each test prints one PASS/FAIL line (run with ``pytest -s`` to see them all).
Rate criteria are property-based (plateau/band) because the constants in the
underlying statements are existential; identities and bounds are checked at
fixed tolerances.
"""

import math
import time

import numpy as np
import pytest

import convdist as cd
from convdist.binomial_gaussian import BinomialSpec
from convdist.experiments import (
    QUANTILE_BOUND_CONSTANT,
    exp_prokhorov_rate,
    exp_skip_two,
    exp_theorem1,
)

from conftest import align_lattice_pair, random_finite_1d, random_lattice_1d

P_GRID = [round(0.05 * k, 2) for k in range(1, 20)]  # 0.05 .. 0.95


def _verdict(name: str, ok: bool, detail: str = "") -> None:
    line = f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f"  [{detail}]"
    print(line)


def _pow2(lo, hi):
    out = []
    n = lo
    while n <= hi:
        out.append(n)
        n *= 2
    return out


def test_01_binomial_three_way_identity():
    t0 = time.perf_counter()
    worst = 0.0
    for p in P_GRID:
        for n in range(1, 2001):
            trio = cd.binom_tv_identity(BinomialSpec(n, p))
            worst = max(
                worst,
                abs(trio.tv - trio.kolmogorov),
                abs(trio.tv - trio.p_times_mode),
            )
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and elapsed < 60.0
    _verdict("01 binomial identity", ok, f"worst spread {worst:.2e}, {elapsed:.1f}s")
    assert worst <= 1e-12
    assert elapsed < 60.0


def test_02_bernstein_tail_bound():
    violations = 0
    for p in P_GRID:
        for n in range(1, 2001):
            tb = cd.bernstein_bound(BinomialSpec(n, p))
            if tb.exact_tail > tb.bound:
                violations += 1
    _verdict("02 Bernstein bound", violations == 0, f"{violations} violations")
    assert violations == 0


def test_03_prokhorov_oracle_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    n_pairs = 1000
    for _ in range(n_pairs):
        f = random_finite_1d(rng)  # at most 5 atoms on {0, 0.25, ..., 2}, dyadic
        g = random_finite_1d(rng)
        exact = cd.prokhorov_exact(f, g, include_plan=False).epsilon
        brute = cd.prokhorov_bruteforce(f, g)
        worst = max(worst, abs(exact - brute))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and elapsed < 120.0
    _verdict(
        "03 flow vs subset oracle", ok,
        f"{n_pairs} pairs, worst gap {worst:.2e}, {elapsed:.1f}s",
    )
    assert worst <= 1e-10
    assert elapsed < 120.0


def test_04_point_mass_prokhorov_rate():
    worst = 0.0
    for a in (0.5, 1.0, 3.0):
        base = cd.point_mass(a)
        for n in range(1, 257):
            fn = cd.rescale(cd.power(base, n), n)
            fn1 = cd.rescale(cd.power(base, n + 1), n)
            fa, _ = cd.to_finite(fn, 0.0)
            ga, _ = cd.to_finite(fn1, 0.0)
            eps = cd.prokhorov_exact(fa, ga, include_plan=False).epsilon
            worst = max(worst, abs(eps - min(1.0, a / math.sqrt(n))))
    _verdict("04 point-mass distance", worst <= 1e-12, f"worst gap {worst:.2e}")
    assert worst <= 1e-12


def test_05_consecutive_power_rate_plateau():
    grid = _pow2(16, 4096)
    all_ok = True
    details = []
    for name in ("rademacher", "uniform3", "bernoulli(0.5)"):
        from convdist.experiments import builtin_measure

        rep = exp_theorem1(builtin_measure(name), grid, measure_id=name)
        all_ok &= rep.all_passed
        details.append(f"{name} scaled[-1]={rep.rows[-1].scaled:.4f}")
    trivial = exp_theorem1(cd.point_mass(1.0), grid, measure_id="point(1)")
    dichotomy = all(r.raw == 1.0 for r in trivial.rows) and trivial.all_passed
    all_ok &= dichotomy
    _verdict("05 sqrt(n) plateau + dichotomy", all_ok, "; ".join(details))
    assert all_ok


def test_06_rescaled_rate_band():
    grid = list(range(8, 65, 2))  # all even n in 8..64
    rep = exp_prokhorov_rate(cd.rademacher(), grid, measure_id="rademacher")
    scaled = [r.scaled for r in rep.rows]
    lo, hi = min(scaled), max(scaled)
    ok = rep.all_passed and hi / lo <= 4.0
    _verdict("06 rescaled band", ok, f"band [{lo:.4f}, {hi:.4f}], ratio {hi/lo:.3f}")
    assert rep.all_passed
    assert hi / lo <= 4.0


def test_07_skip_two_rate_plateau():
    grid = _pow2(16, 1024)
    ok = True
    details = []
    for name, f in (("rademacher", cd.rademacher()), ("uniform3", cd.uniform3())):
        rep = exp_skip_two(f, grid, measure_id=name)
        ok &= rep.all_passed
        details.append(f"{name} n*raw[-1]={rep.rows[-1].scaled:.4f}")
    _verdict("07 skip-two plateau", ok, "; ".join(details))
    assert ok


def test_08_quantile_bound_sweep():
    assert QUANTILE_BOUND_CONSTANT == pytest.approx(4.132847, abs=5e-7)
    c0 = QUANTILE_BOUND_CONSTANT
    cases = [
        ("rademacher", cd.rademacher(), 0.5),
        ("uniform3", cd.uniform3(), 0.5),
        ("bernoulli(0.5)", cd.bernoulli(0.5), 0.5),
        ("quarter-quantile", cd.LatticeMeasure((2.0,), (-1.0,), np.array([0.25, 0.75])), 0.25),
    ]
    violations = 0
    for name, base, q in cases:
        fn = base
        for n in range(1, 1001):
            fn1 = cd.convolve(fn, base)
            value = cd.kolmogorov(fn, fn1).value
            bound = c0 / math.sqrt(n * min(q, 1.0 - q))
            if value > bound:
                violations += 1
            if q == 0.5 and value > c0 * math.sqrt(2.0) / math.sqrt(n):
                violations += 1  # median variant
            fn = fn1
    _verdict("08 quantile bound", violations == 0, f"{violations} violations, c0={c0:.6f}")
    assert violations == 0


def test_09_convolution_smoothing():
    rng = np.random.default_rng(99)
    bad = 0
    for _ in range(500):
        f = random_lattice_1d(rng, max_cells=6)
        g = random_lattice_1d(rng, max_cells=6)
        h = random_lattice_1d(rng, max_cells=6)
        fh = cd.convolve(f, h)
        gh = cd.convolve(g, h)
        if cd.convex_1d(fh, gh).value > cd.convex_1d(f, g).value + 1e-10:
            bad += 1
        before = cd.prokhorov_exact(f, g, include_plan=False).epsilon
        after = cd.prokhorov_exact(fh, gh, include_plan=False).epsilon
        if after > before + 1e-10:
            bad += 1
    _verdict("09 smoothing", bad == 0, f"{bad} violations over 500 triples")
    assert bad == 0


def test_10_coupling_witnesses():
    rng = np.random.default_rng(7)
    checked = 0
    worst_marginal = 0.0
    bad = 0

    def _inspect(f, g):
        nonlocal checked, worst_marginal, bad
        res = cd.prokhorov_exact(f, g, include_plan=True)
        exceed, ok = cd.coupling_check(res.plan, res.epsilon)
        if not ok:
            bad += 1
        rows, cols = res.plan.marginals()
        fm = f if isinstance(f, cd.FiniteMeasure) else cd.to_finite(f, 0.0)[0]
        gm = g if isinstance(g, cd.FiniteMeasure) else cd.to_finite(g, 0.0)[0]
        worst_marginal = max(
            worst_marginal,
            float(np.max(np.abs(rows - fm.masses))),
            float(np.max(np.abs(cols - gm.masses))),
        )
        checked += 1

    for _ in range(60):
        _inspect(random_finite_1d(rng), random_finite_1d(rng))
    for a in (0.5, 3.0):
        _inspect(cd.point_mass(0.0), cd.point_mass(a))
    for n in (8, 16, 32):
        fn = cd.rescale(cd.power(cd.rademacher(), n), n)
        fn1 = cd.rescale(cd.power(cd.rademacher(), n + 1), n)
        _inspect(cd.to_finite(fn, 0.0)[0], cd.to_finite(fn1, 0.0)[0])

    ok = bad == 0 and worst_marginal <= 1e-10
    _verdict(
        "10 coupling witnesses", ok,
        f"{checked} plans, worst marginal error {worst_marginal:.2e}",
    )
    assert bad == 0
    assert worst_marginal <= 1e-10


def test_11_gaussian_bound_specialization():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(200):
        d = int(rng.integers(1, 3))
        a = rng.normal(size=(d, d))
        cov = a @ a.T + 0.4 * np.eye(d)
        mean = rng.normal(size=d)
        n = int(rng.integers(1, 100))
        special = cd.gaussian_conv_tv_bound(cd.GaussianParams(mean, cov), n)
        general = cd.gaussian_tv_lemma1(
            cd.GaussianParams(n * mean, n * cov),
            cd.GaussianParams((n + 1) * mean, (n + 1) * cov),
        )
        worst = max(worst, abs(special - general))
    _verdict("11 Gaussian specialization", worst <= 1e-12, f"worst gap {worst:.2e}")
    assert worst <= 1e-12


def test_12_decomposition_path_replication():
    base = cd.LatticeMeasure((1.0,), (-1.0,), np.array([0.3, 0.3, 0.3, 0, 0, 0, 0.1]))
    dec = cd.decompose(base, 2.0)
    worst_rebuild = 0.0
    worst_excess = 0.0
    for n in range(1, 31):
        rebuilt, _ = cd.reconstruct_power(dec, n)
        direct = cd.power(base, n)
        a, b = align_lattice_pair(rebuilt, direct)
        worst_rebuild = max(worst_rebuild, float(np.max(np.abs(a - b))))

        gn, _ = cd.interpolant(dec, n)
        fn1 = cd.power(base, n + 1)
        piece = cd.convex_1d(gn, fn1).value
        bound = 2.0 * cd.binom_tv_identity(BinomialSpec(n, dec.p)).tv
        worst_excess = max(worst_excess, piece - bound)
    ok = worst_rebuild <= 1e-9 and worst_excess <= 1e-10
    _verdict(
        "12 decomposition path", ok,
        f"rebuild error {worst_rebuild:.2e}, bound excess {worst_excess:.2e}",
    )
    assert worst_rebuild <= 1e-9
    assert worst_excess <= 1e-10
