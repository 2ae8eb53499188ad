"""Experiment runner reproducing the quantitative claims at desk scale.

Each experiment returns an :class:`ExperimentReport` whose rows carry the raw
distance, a rate-scaled column, an optional bound column and a pass flag that
is recomputable from the raw values and the declared tolerance.  Rate claims
with existential constants are checked through a plateau criterion (the
scaled sequence must stay within a fixed factor of its value at the smallest
n of at least 16) instead of asserting any specific constant.
"""

from __future__ import annotations

import math
import re
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .binomial_gaussian import (
    BinomialSpec,
    bernstein_bound,
    binom_tv_identity,
    gaussian_conv_tv_bound,
    gaussian_tv_lemma1,
)
from .errors import BudgetExceededError, RejectedInputError
from .measures import (
    DEFAULT_CELL_BUDGET,
    GaussianParams,
    LatticeMeasure,
    Measure,
    bernoulli,
    convolve,
    decompose,
    interpolant,
    moments,
    point_mass,
    power,
    rademacher,
    rademacher2d,
    rescale,
    to_finite,
    uniform3,
)
from .metrics import convex_1d, convex_2d_lower, kolmogorov
from .prokhorov import (
    DEFAULT_POINT_BUDGET,
    coupling_check,
    naive_shift_coupling,
    prokhorov_exact,
)

# Constant in the quantile-based Kolmogorov bound: (1 + 2 sqrt(2 pi)) / e^(3/8).
QUANTILE_BOUND_CONSTANT = (1.0 + 2.0 * math.sqrt(2.0 * math.pi)) / math.exp(0.375)

PLATEAU_FACTOR = 3.0
PLATEAU_REFERENCE_N = 16
TRIANGLE_SLACK = 1e-10
PRUNE_DEFAULT = 1e-12


@dataclass(frozen=True)
class ExperimentRow:
    n: int
    raw: float
    scaled: float
    bound: Optional[float]
    passed: bool
    extras: Optional[dict] = None
    note: str = ""


@dataclass
class ExperimentReport:
    experiment: str
    measure_id: str
    rows: list[ExperimentRow]
    metadata: dict = field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def to_csv(self) -> str:
        lines = ["experiment,id,n,raw,scaled,bound,pass"]
        for r in self.rows:
            bound = "" if r.bound is None else repr(float(r.bound))
            lines.append(
                f"{self.experiment},{self.measure_id},{r.n},"
                f"{repr(float(r.raw))},{repr(float(r.scaled))},{bound},"
                f"{'true' if r.passed else 'false'}"
            )
        return "\n".join(lines) + "\n"

    def to_doc(self) -> dict:
        def _num(x: float) -> Optional[float]:
            return None if x is None or (isinstance(x, float) and math.isnan(x)) else float(x)

        return {
            "experiment": self.experiment,
            "id": self.measure_id,
            "rows": [
                {
                    "n": r.n,
                    "raw": _num(r.raw),
                    "scaled": _num(r.scaled),
                    "bound": _num(r.bound),
                    "pass": r.passed,
                    "extras": r.extras,
                    "note": r.note,
                }
                for r in self.rows
            ],
            "metadata": self.metadata,
            "all_passed": self.all_passed,
        }


# ---------------------------------------------------------------------------
# Built-in measures and descriptors
# ---------------------------------------------------------------------------

_DESCRIPTOR_RE = re.compile(r"^([a-z0-9_]+)(?:\(([^)]*)\))?$")


def builtin_measure(descriptor: str) -> LatticeMeasure:
    """Parse a built-in measure descriptor.

    Supported: ``rademacher``, ``uniform3``, ``rademacher2d``,
    ``bernoulli(p)``, ``point(a)`` and ``point(x,y)``.
    """
    m = _DESCRIPTOR_RE.match(descriptor.strip().lower())
    if not m:
        raise RejectedInputError(f"cannot parse measure descriptor {descriptor!r}")
    name, args = m.group(1), m.group(2)
    params = [float(v) for v in args.split(",")] if args else []
    if name == "rademacher" and not params:
        return rademacher()
    if name == "uniform3" and not params:
        return uniform3()
    if name == "rademacher2d" and not params:
        return rademacher2d()
    if name == "bernoulli" and len(params) == 1:
        return bernoulli(params[0])
    if name == "point" and len(params) in (1, 2):
        return point_mass(params if len(params) == 2 else params[0])
    raise RejectedInputError(f"unknown built-in measure {descriptor!r}")


def is_trivial(m: Measure) -> bool:
    """True when the support lies on an affine hyperplane missing the origin
    (a nonzero point in 1D; a line avoiding the origin in 2D)."""
    pts, _ = m.support() if isinstance(m, LatticeMeasure) else (m.points, m.masses)
    if pts.shape[1] == 1:
        xs = np.unique(pts[:, 0])
        return len(xs) == 1 and abs(float(xs[0])) > 1e-12
    base = pts[0]
    rel = pts - base
    norms = np.linalg.norm(rel, axis=1)
    if np.all(norms <= 1e-12):
        return float(np.linalg.norm(base)) > 1e-12
    direction = rel[int(np.argmax(norms))]
    cross = rel[:, 0] * direction[1] - rel[:, 1] * direction[0]
    if np.any(np.abs(cross) > 1e-12):
        return False  # support spans the plane
    origin_cross = base[0] * direction[1] - base[1] * direction[0]
    return abs(float(origin_cross)) > 1e-12


def is_symmetric_1d(m: Measure, tol: float = 1e-12) -> bool:
    """Mass comparison under reflection about zero."""
    pts, w = m.support()
    if pts.shape[1] != 1:
        raise RejectedInputError("symmetry check is one-dimensional")
    xs = pts[:, 0]
    order = np.argsort(xs)
    xs, w = xs[order], w[order]
    if not np.allclose(xs, -xs[::-1], atol=1e-9, rtol=0):
        return False
    return bool(np.max(np.abs(w - w[::-1])) <= tol)


def _plateau_flags(ns: Sequence[int], scaled: Sequence[float]) -> list[bool]:
    ref_idx = next((i for i, n in enumerate(ns) if n >= PLATEAU_REFERENCE_N), 0)
    ref = scaled[ref_idx]
    flags = []
    for s in scaled:
        ok = math.isfinite(s) and math.isfinite(ref) and s <= PLATEAU_FACTOR * ref + 1e-12
        flags.append(bool(ok))
    return flags


def _pair_of_powers(
    f: LatticeMeasure, n: int, cell_budget: int
) -> tuple[LatticeMeasure, LatticeMeasure]:
    fn = power(f, n, cell_budget=cell_budget)
    return fn, convolve(fn, f, cell_budget=cell_budget)


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------

def exp_theorem1(
    f: LatticeMeasure,
    n_grid: Sequence[int],
    *,
    measure_id: str = "measure",
    samples: int = 64,
    seed: int = 0,
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> ExperimentReport:
    """Convex-set distance between consecutive powers, scaled by sqrt(n).

    Nontrivial measures must satisfy the plateau criterion; for trivial ones
    the raw distance is identically one (the dichotomy) and rows pass when
    that holds exactly.
    """
    start = time.perf_counter()
    trivial = is_trivial(f)
    raws: list[float] = []
    witnesses: list[Optional[dict]] = []
    notes: list[str] = []
    for n in n_grid:
        try:
            fn, fn1 = _pair_of_powers(f, n, cell_budget)
            if f.dim == 1:
                rep = convex_1d(fn, fn1)
            else:
                rep = convex_2d_lower(fn, fn1, samples=samples, seed=seed)
            raws.append(rep.value)
            witnesses.append(rep.witness)
            notes.append("")
        except BudgetExceededError as exc:
            raws.append(math.nan)
            witnesses.append(None)
            notes.append(str(exc))
    scaled = [math.sqrt(n) * r for n, r in zip(n_grid, raws)]
    if trivial:
        flags = [math.isfinite(r) and abs(r - 1.0) <= 1e-12 for r in raws]
    else:
        flags = _plateau_flags(list(n_grid), scaled)
    rows = [
        ExperimentRow(
            n=n, raw=r, scaled=s, bound=None, passed=p,
            extras=None if w is None else {"witness": w}, note=note,
        )
        for n, r, s, p, w, note in zip(n_grid, raws, scaled, flags, witnesses, notes)
    ]
    meta = _metadata(start, seed=seed, cell_budget=cell_budget, samples=samples)
    meta["trivial"] = trivial
    meta["criterion"] = "raw == 1 exactly" if trivial else _plateau_text()
    return ExperimentReport("theorem1", measure_id, rows, meta)


def exp_prokhorov_rate(
    f: LatticeMeasure,
    n_grid: Sequence[int],
    *,
    measure_id: str = "measure",
    cell_budget: int = DEFAULT_CELL_BUDGET,
    point_budget: int = DEFAULT_POINT_BUDGET,
    prune: float = PRUNE_DEFAULT,
) -> ExperimentReport:
    """Prokhorov distance between rescaled consecutive powers, scaled by
    sqrt(n); pass requires the plateau criterion, tightened to a two-sided
    band for symmetric two-point bases (whose scaled sequence must also stay
    bounded away from zero)."""
    start = time.perf_counter()
    raws: list[float] = []
    notes: list[str] = []
    extras: list[dict] = []
    for n in n_grid:
        try:
            fn, fn1 = _pair_of_powers(f, n, cell_budget)
            a, da = to_finite(rescale(fn, n), prune)
            b, db = to_finite(rescale(fn1, n), prune)
            res = prokhorov_exact(a, b, point_budget=point_budget, include_plan=False)
            raws.append(res.epsilon)
            crossing = min(res.deficiency_curve, key=lambda rd: max(rd[0], rd[1]))
            extras.append(
                {
                    "pruned_mass": da + db,
                    "crossing_radius": crossing[0],
                    "crossing_deficiency": crossing[1],
                }
            )
            notes.append("")
        except BudgetExceededError as exc:
            raws.append(math.nan)
            extras.append({})
            notes.append(str(exc))
    scaled = [math.sqrt(n) * r for n, r in zip(n_grid, raws)]
    flags = _plateau_flags(list(n_grid), scaled)
    # The matching lower bound is recorded as a claim only for symmetric
    # two-point bases, where the scaled sequence provably stays bounded away
    # from zero; other bases may genuinely decay faster.
    two_point = f.dim == 1 and len(f.support()[1]) == 2 and is_symmetric_1d(f)
    criterion = _plateau_text()
    if two_point:
        ref_idx = next((i for i, n in enumerate(n_grid) if n >= PLATEAU_REFERENCE_N), 0)
        ref = scaled[ref_idx]
        flags = [
            u and math.isfinite(s) and s >= ref / PLATEAU_FACTOR - 1e-12
            for u, s in zip(flags, scaled)
        ]
        criterion += " and (two-point symmetric base) scaled >= reference / 3"
    rows = [
        ExperimentRow(n=n, raw=r, scaled=s, bound=None, passed=p, extras=e, note=note)
        for n, r, s, p, e, note in zip(n_grid, raws, scaled, flags, extras, notes)
    ]
    meta = _metadata(
        start, cell_budget=cell_budget, point_budget=point_budget, prune=prune
    )
    finite = [s for s in scaled if math.isfinite(s)]
    if finite:
        meta["scaled_band"] = [min(finite), max(finite)]
    meta["criterion"] = criterion
    return ExperimentReport("prokhorov-rate", measure_id, rows, meta)


def exp_skip_two(
    f: LatticeMeasure,
    n_grid: Sequence[int],
    *,
    measure_id: str = "measure",
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> ExperimentReport:
    """Kolmogorov distance between the n-th and (n+2)-nd powers of a
    symmetric measure, scaled by n (not sqrt(n))."""
    start = time.perf_counter()
    if f.dim != 1 or not is_symmetric_1d(f):
        raise RejectedInputError(
            "the skip-two experiment needs a 1D measure symmetric about 0"
        )
    f2 = power(f, 2, cell_budget=cell_budget)
    raws: list[float] = []
    witnesses: list[Optional[dict]] = []
    notes: list[str] = []
    for n in n_grid:
        try:
            fn = power(f, n, cell_budget=cell_budget)
            fn2 = convolve(fn, f2, cell_budget=cell_budget)
            rep = kolmogorov(fn, fn2)
            raws.append(rep.value)
            witnesses.append(rep.witness)
            notes.append("")
        except BudgetExceededError as exc:
            raws.append(math.nan)
            witnesses.append(None)
            notes.append(str(exc))
    scaled = [n * r for n, r in zip(n_grid, raws)]
    flags = _plateau_flags(list(n_grid), scaled)
    rows = [
        ExperimentRow(
            n=n, raw=r, scaled=s, bound=None, passed=p,
            extras=None if w is None else {"witness": w}, note=note,
        )
        for n, r, s, p, w, note in zip(n_grid, raws, scaled, flags, witnesses, notes)
    ]
    meta = _metadata(start, cell_budget=cell_budget)
    meta["criterion"] = _plateau_text(scale="n")
    return ExperimentReport("skip-two", measure_id, rows, meta)


def exp_quantile_bound(
    f: LatticeMeasure,
    q: float,
    n_grid: Sequence[int],
    *,
    measure_id: str = "measure",
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> ExperimentReport:
    """Kolmogorov distance between consecutive powers against the bound
    c0 / sqrt(n * min(q, 1-q)) when zero is a q-quantile of the base."""
    start = time.perf_counter()
    if f.dim != 1:
        raise RejectedInputError("the quantile-bound experiment is one-dimensional")
    if not 0.0 < q < 1.0:
        raise RejectedInputError(f"the quantile level must lie in (0, 1), got {q}")
    pts, w = f.support()
    xs = pts[:, 0]
    below = float(w[xs < -1e-12].sum())
    above = float(w[xs > 1e-12].sum())
    if below > q + 1e-12:
        raise RejectedInputError(
            f"0 is not a {q}-quantile: mass below 0 is {below} > q = {q}"
        )
    if above > 1.0 - q + 1e-12:
        raise RejectedInputError(
            f"0 is not a {q}-quantile: mass above 0 is {above} > 1 - q = {1.0 - q}"
        )
    c0 = QUANTILE_BOUND_CONSTANT
    raws: list[float] = []
    bounds: list[float] = []
    witnesses: list[Optional[dict]] = []
    notes: list[str] = []
    for n in n_grid:
        try:
            fn, fn1 = _pair_of_powers(f, n, cell_budget)
            rep = kolmogorov(fn, fn1)
            raws.append(rep.value)
            witnesses.append(rep.witness)
            if q == 0.5:
                bounds.append(c0 * math.sqrt(2.0) / math.sqrt(n))
            else:
                bounds.append(c0 / math.sqrt(n * min(q, 1.0 - q)))
            notes.append("")
        except BudgetExceededError as exc:
            raws.append(math.nan)
            bounds.append(math.nan)
            witnesses.append(None)
            notes.append(str(exc))
    scaled = [math.sqrt(n) * r for n, r in zip(n_grid, raws)]
    flags = [math.isfinite(r) and r <= b for r, b in zip(raws, bounds)]
    rows = [
        ExperimentRow(
            n=n, raw=r, scaled=s, bound=b, passed=p,
            extras=None if w is None else {"witness": w}, note=note,
        )
        for n, r, s, b, p, w, note in zip(n_grid, raws, scaled, bounds, flags, witnesses, notes)
    ]
    meta = _metadata(start, cell_budget=cell_budget)
    meta["q"] = q
    meta["bound_constant"] = c0
    meta["criterion"] = "raw <= bound (median form c0*sqrt(2)/sqrt(n) at q = 1/2)"
    return ExperimentReport("quantile-bound", measure_id, rows, meta)


def exp_decomposition_path(
    f: LatticeMeasure,
    radius: float,
    n_grid: Sequence[int],
    *,
    measure_id: str = "measure",
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> ExperimentReport:
    """Triangle route through the binomial-mixture interpolant.

    Per n the report carries the direct interval distance between consecutive
    powers, both triangle pieces through the interpolant, and the
    binomial-difference bound on the second piece.
    """
    start = time.perf_counter()
    if f.dim != 1:
        raise RejectedInputError(
            "the decomposition experiment uses exact interval distances and is 1D only"
        )
    dec = decompose(f, radius)
    rows: list[ExperimentRow] = []
    for n in n_grid:
        try:
            gn, dropped = interpolant(dec, n, cell_budget=cell_budget)
            fn, fn1 = _pair_of_powers(f, n, cell_budget)
            piece_left = convex_1d(fn, gn).value
            piece_right = convex_1d(gn, fn1).value
            direct = convex_1d(fn, fn1).value
            if dec.p > 0:
                btv = binom_tv_identity(BinomialSpec(n, dec.p)).tv
            else:
                btv = 0.0
            bound = 2.0 * btv
            ok = (
                direct <= piece_left + piece_right + TRIANGLE_SLACK
                and piece_right <= bound + TRIANGLE_SLACK
            )
            rows.append(
                ExperimentRow(
                    n=n,
                    raw=direct,
                    scaled=math.sqrt(n) * direct,
                    bound=bound,
                    passed=bool(ok),
                    extras={
                        "piece_left": piece_left,
                        "piece_right": piece_right,
                        "triangle_sum": piece_left + piece_right,
                        "dropped_mass": dropped,
                    },
                )
            )
        except BudgetExceededError as exc:
            rows.append(
                ExperimentRow(
                    n=n, raw=math.nan, scaled=math.nan, bound=None,
                    passed=False, note=str(exc),
                )
            )
    meta = _metadata(start, cell_budget=cell_budget)
    meta.update(
        {
            "radius": radius,
            "p": dec.p,
            "core_cov_min_eig": dec.core_cov_min_eig,
            "criterion": "direct <= pieces + 1e-10 and right piece <= 2*binomial TV + 1e-10",
        }
    )
    return ExperimentReport("decomposition", measure_id, rows, meta)


def exp_coupling_demo(
    f: LatticeMeasure,
    n: int,
    *,
    measure_id: str = "measure",
    cell_budget: int = DEFAULT_CELL_BUDGET,
    point_budget: int = DEFAULT_POINT_BUDGET,
    prune: float = PRUNE_DEFAULT,
) -> ExperimentReport:
    """Builds the optimal coupling of unscaled consecutive powers at the exact
    distance and verifies its exceedance; also checks the shift coupling of
    partial sums, whose exceedance vanishes at the support radius for
    bounded bases."""
    start = time.perf_counter()
    fn, fn1 = _pair_of_powers(f, n, cell_budget)
    a, _ = to_finite(fn, prune)
    b, _ = to_finite(fn1, prune)
    res = prokhorov_exact(a, b, point_budget=point_budget, include_plan=True)
    exceed, ok = coupling_check(res.plan, res.epsilon)

    naive = naive_shift_coupling(f, n)
    pts, _ = f.support()
    support_radius = float(np.linalg.norm(pts, axis=1).max())
    naive_exceed, _ = coupling_check(naive, support_radius)
    naive_ok = naive_exceed <= 1e-12

    row = ExperimentRow(
        n=n,
        raw=res.epsilon,
        scaled=exceed,
        bound=res.epsilon,
        passed=bool(ok and naive_ok),
        extras={
            "exceed_mass": exceed,
            "naive_exceed_at_support_radius": naive_exceed,
            "support_radius": support_radius,
        },
    )
    meta = _metadata(start, cell_budget=cell_budget, point_budget=point_budget, prune=prune)
    meta["criterion"] = "exceedance <= epsilon + 1e-10; shift-coupling exceedance 0"
    meta["note"] = (
        "the shift coupling of partial sums only works for bounded bases; "
        "all measures here are bounded, so the unbounded failure mode is "
        "recorded as a remark, not asserted"
    )
    return ExperimentReport("coupling", measure_id, rows=[row], metadata=meta)


def exp_binom_tv(p: float, n_grid: Sequence[int]) -> ExperimentReport:
    """Three-way identity between consecutive binomials: total variation,
    Kolmogorov and p times the modal probability."""
    start = time.perf_counter()
    rows = []
    sup_scaled = 0.0
    for n in n_grid:
        trio = binom_tv_identity(BinomialSpec(int(n), p))
        spread = max(
            abs(trio.tv - trio.kolmogorov), abs(trio.tv - trio.p_times_mode)
        )
        scaled = math.sqrt(n) * trio.tv
        sup_scaled = max(sup_scaled, scaled)
        rows.append(
            ExperimentRow(
                n=int(n),
                raw=trio.tv,
                scaled=scaled,
                bound=trio.p_times_mode,
                passed=bool(spread <= 1e-12),
                extras={"kolmogorov": trio.kolmogorov, "spread": spread},
            )
        )
    meta = _metadata(start)
    meta.update(
        {
            "p": p,
            "criterion": "three-way equality within 1e-12",
            "sup_scaled_tv": sup_scaled,
            "local_limit_constant": math.sqrt(p / (2.0 * math.pi * (1.0 - p))),
        }
    )
    return ExperimentReport("binom-tv", f"bernoulli({p})", rows, meta)


def exp_bernstein(p: float, n_grid: Sequence[int]) -> ExperimentReport:
    """Exact binomial upper tail against the exponential bound."""
    start = time.perf_counter()
    rows = []
    for n in n_grid:
        tb = bernstein_bound(BinomialSpec(int(n), p))
        rows.append(
            ExperimentRow(
                n=int(n),
                raw=tb.exact_tail,
                scaled=tb.exact_tail / tb.bound if tb.bound > 0 else math.inf,
                bound=tb.bound,
                passed=bool(tb.exact_tail <= tb.bound),
            )
        )
    meta = _metadata(start)
    meta["p"] = p
    meta["criterion"] = "exact tail <= exp(-n p (1-p) / 4)"
    return ExperimentReport("bernstein", f"bernoulli({p})", rows, meta)


def exp_gaussian_bound(
    f: LatticeMeasure,
    n_grid: Sequence[int],
    *,
    measure_id: str = "measure",
) -> ExperimentReport:
    """Successive-sums total-variation bound for the Gaussian matched to the
    measure's moments, checked against the general two-Gaussian formula."""
    start = time.perf_counter()
    mean, cov, _ = moments(f)
    base = GaussianParams(mean, cov)
    rows = []
    prev = math.inf
    for n in n_grid:
        n = int(n)
        raw = gaussian_conv_tv_bound(base, n)
        general = gaussian_tv_lemma1(
            GaussianParams(n * mean, n * cov),
            GaussianParams((n + 1) * mean, (n + 1) * cov),
        )
        ok = abs(raw - general) <= 1e-12 and raw <= prev + 1e-12
        prev = raw
        rows.append(
            ExperimentRow(
                n=n, raw=raw, scaled=n * raw, bound=general, passed=bool(ok)
            )
        )
    meta = _metadata(start)
    meta["criterion"] = "specialization matches the general formula within 1e-12 and is nonincreasing"
    return ExperimentReport("gaussian-bound", measure_id, rows, meta)


# ---------------------------------------------------------------------------
# Dispatcher
# ---------------------------------------------------------------------------

def _metadata(start: float, **kw) -> dict:
    meta = {k: v for k, v in kw.items() if v is not None}
    meta["wall_clock_seconds"] = round(time.perf_counter() - start, 6)
    return meta


def _plateau_text(scale: str = "sqrt(n)") -> str:
    return (
        f"{scale} * raw stays within {PLATEAU_FACTOR}x its value at the "
        f"smallest n >= {PLATEAU_REFERENCE_N}"
    )


def _pow2_grid(lo: int, hi: int) -> list[int]:
    out = []
    n = lo
    while n <= hi:
        out.append(n)
        n *= 2
    return out


DEFAULT_GRIDS: dict[str, list[int]] = {
    "theorem1": _pow2_grid(16, 1024),
    "prokhorov-rate": list(range(8, 65, 8)),
    "skip-two": _pow2_grid(16, 1024),
    "quantile-bound": _pow2_grid(16, 1024),
    "decomposition": _pow2_grid(2, 32),
    "coupling": [8],
    "binom-tv": _pow2_grid(1, 1024),
    "bernstein": _pow2_grid(1, 1024),
    "gaussian-bound": _pow2_grid(1, 1024),
}

EXPERIMENT_NAMES = tuple(DEFAULT_GRIDS)


def run_experiment(
    name: str,
    *,
    measure: Optional[Measure] = None,
    measure_id: str = "measure",
    n_grid: Optional[Sequence[int]] = None,
    p: Optional[float] = None,
    q: Optional[float] = None,
    radius: Optional[float] = None,
    samples: int = 64,
    seed: int = 0,
    cell_budget: int = DEFAULT_CELL_BUDGET,
    point_budget: int = DEFAULT_POINT_BUDGET,
) -> ExperimentReport:
    """Single entry point used by the HTTP service and the CLI."""
    if name not in DEFAULT_GRIDS:
        raise RejectedInputError(
            f"unknown experiment {name!r}; choose one of {sorted(DEFAULT_GRIDS)}"
        )
    grid = sorted(set(n_grid)) if n_grid else DEFAULT_GRIDS[name]
    if not grid or any(n < 1 for n in grid):
        raise RejectedInputError("the n grid must contain positive integers")

    if name == "binom-tv":
        if p is None:
            raise RejectedInputError("binom-tv needs the parameter p")
        return exp_binom_tv(p, grid)
    if name == "bernstein":
        if p is None:
            raise RejectedInputError("bernstein needs the parameter p")
        return exp_bernstein(p, grid)

    if measure is None:
        raise RejectedInputError(f"experiment {name!r} needs a measure")
    if not isinstance(measure, LatticeMeasure):
        raise RejectedInputError(f"experiment {name!r} needs a lattice measure")

    if name == "theorem1":
        return exp_theorem1(
            measure, grid, measure_id=measure_id, samples=samples, seed=seed,
            cell_budget=cell_budget,
        )
    if name == "prokhorov-rate":
        return exp_prokhorov_rate(
            measure, grid, measure_id=measure_id,
            cell_budget=cell_budget, point_budget=point_budget,
        )
    if name == "skip-two":
        return exp_skip_two(measure, grid, measure_id=measure_id, cell_budget=cell_budget)
    if name == "quantile-bound":
        if q is None:
            raise RejectedInputError("quantile-bound needs the level q")
        return exp_quantile_bound(
            measure, q, grid, measure_id=measure_id, cell_budget=cell_budget
        )
    if name == "decomposition":
        if radius is None:
            raise RejectedInputError("decomposition needs the truncation radius")
        return exp_decomposition_path(
            measure, radius, grid, measure_id=measure_id, cell_budget=cell_budget
        )
    if name == "coupling":
        return exp_coupling_demo(
            measure, grid[0], measure_id=measure_id,
            cell_budget=cell_budget, point_budget=point_budget,
        )
    if name == "gaussian-bound":
        return exp_gaussian_bound(measure, grid, measure_id=measure_id)
    raise AssertionError(f"unhandled experiment {name}")
