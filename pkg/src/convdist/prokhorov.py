"""Exact Prokhorov distance between finite discrete measures.

The distance is found by scanning the finitely many critical neighborhood
radii (zero plus all pairwise support distances, closed-ball convention).
At each radius the smallest mass that cannot be coupled within the radius --
the deficiency -- is the value of a bipartite max-flow problem; the distance
is the min-max crossing of radius and deficiency.  Flows run on exact
integers obtained by writing the (dyadic) double-precision masses over a
common denominator, so feasibility decisions never flip on rounding noise.
A subset-enumeration oracle provides an independent check for small
supports, and the optimal flow doubles as an explicit coupling whose
off-diagonal mass certifies the distance.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import BudgetExceededError, RejectedInputError
from .measures import FiniteMeasure, LatticeMeasure, Measure, to_finite

DEFAULT_POINT_BUDGET = 4000
COUPLING_SLACK = 1e-10


@dataclass(frozen=True)
class CouplingPlan:
    """Joint mass matrix over support(F) x support(G)."""

    row_points: np.ndarray
    col_points: np.ndarray
    joint: np.ndarray

    def __post_init__(self):
        joint = np.asarray(self.joint, dtype=np.float64)
        if joint.shape != (len(self.row_points), len(self.col_points)):
            raise RejectedInputError("joint matrix shape does not match the point sets")
        if np.any(joint < 0):
            raise RejectedInputError("joint masses must be nonnegative")
        object.__setattr__(self, "row_points", np.asarray(self.row_points, dtype=np.float64))
        object.__setattr__(self, "col_points", np.asarray(self.col_points, dtype=np.float64))
        object.__setattr__(self, "joint", joint)

    def marginals(self) -> tuple[np.ndarray, np.ndarray]:
        return self.joint.sum(axis=1), self.joint.sum(axis=0)

    def to_doc(self) -> dict:
        return {
            "row_points": self.row_points.tolist(),
            "col_points": self.col_points.tolist(),
            "joint": self.joint.tolist(),
        }


@dataclass(frozen=True)
class ProkhorovResult:
    """Distance value, deficiency curve and the achieving coupling."""

    epsilon: float
    deficiency_curve: list[tuple[float, float]]
    plan: Optional[CouplingPlan]

    def to_doc(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "deficiency_curve": [[r, d] for r, d in self.deficiency_curve],
            "plan": self.plan.to_doc() if self.plan is not None else None,
        }


class _Dinic:
    """Max flow with exact integer capacities; supports adding edges between
    solves, so the deficiency curve is computed incrementally."""

    def __init__(self, n: int):
        self.n = n
        self.to: list[int] = []
        self.cap: list[int] = []
        self.adj: list[list[int]] = [[] for _ in range(n)]
        self.level: list[int] = [0] * n
        self.it: list[int] = [0] * n

    def add_edge(self, u: int, v: int, cap: int) -> int:
        eid = len(self.to)
        self.adj[u].append(eid)
        self.to.append(v)
        self.cap.append(cap)
        self.adj[v].append(eid + 1)
        self.to.append(u)
        self.cap.append(0)
        return eid

    def _bfs(self, s: int, t: int) -> bool:
        level = [-1] * self.n
        level[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for eid in self.adj[u]:
                v = self.to[eid]
                if self.cap[eid] > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    queue.append(v)
        self.level = level
        return level[t] >= 0

    def _augment(self, s: int, t: int) -> int:
        path: list[int] = []
        u = s
        while True:
            if u == t:
                bottleneck = min(self.cap[e] for e in path)
                for e in path:
                    self.cap[e] -= bottleneck
                    self.cap[e ^ 1] += bottleneck
                return bottleneck
            advanced = False
            while self.it[u] < len(self.adj[u]):
                e = self.adj[u][self.it[u]]
                v = self.to[e]
                if self.cap[e] > 0 and self.level[v] == self.level[u] + 1:
                    path.append(e)
                    u = v
                    advanced = True
                    break
                self.it[u] += 1
            if not advanced:
                if u == s:
                    return 0
                e = path.pop()
                u = self.to[e ^ 1]
                self.it[u] += 1

    def max_flow(self, s: int, t: int) -> int:
        total = 0
        while self._bfs(s, t):
            self.it = [0] * self.n
            while True:
                pushed = self._augment(s, t)
                if pushed == 0:
                    break
                total += pushed
        return total


def _as_finite(m: Measure) -> FiniteMeasure:
    if isinstance(m, FiniteMeasure):
        return m
    if isinstance(m, LatticeMeasure):
        return to_finite(m, 0.0)[0]
    raise RejectedInputError(f"unsupported measure type {type(m).__name__}")


def _integer_masses(wf: np.ndarray, wg: np.ndarray) -> tuple[list[int], list[int], int]:
    """Write both mass vectors exactly over one common integer denominator.

    Doubles are dyadic rationals, so this is always exact; after dividing by
    the exact total each side sums to the denominator precisely.
    """
    frf = [Fraction(float(x)) for x in wf]
    frg = [Fraction(float(x)) for x in wg]
    sf = sum(frf)
    sg = sum(frg)
    qf = [x / sf for x in frf]
    qg = [x / sg for x in frg]
    den = 1
    for q in qf:
        den = math.lcm(den, q.denominator)
    for q in qg:
        den = math.lcm(den, q.denominator)
    capf = [int(q * den) for q in qf]
    capg = [int(q * den) for q in qg]
    return capf, capg, den


def _distance_matrix(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.linalg.norm(x[:, None, :] - y[None, :, :], axis=2)


def prokhorov_exact(
    f: Measure,
    g: Measure,
    *,
    point_budget: int = DEFAULT_POINT_BUDGET,
    include_plan: bool = True,
) -> ProkhorovResult:
    """Exact Prokhorov distance under the closed-ball edge convention.

    For every candidate radius (zero and each distinct pairwise distance) the
    deficiency is one minus the maximal bipartite flow over edges of length
    at most the radius; the distance is the minimum over radii of
    max(radius, deficiency), capped at one.
    """
    fm = _as_finite(f)
    gm = _as_finite(g)
    m, k = len(fm.masses), len(gm.masses)
    if m > point_budget or k > point_budget:
        raise BudgetExceededError(
            f"support sizes {m} and {k} exceed the point budget {point_budget} per side"
        )
    if fm.dim != gm.dim:
        raise RejectedInputError("measures live in different dimensions")
    dist = _distance_matrix(fm.points, gm.points)
    radii = np.unique(np.concatenate(([0.0], dist.ravel())))
    capf, capg, den = _integer_masses(fm.masses, gm.masses)

    source, sink = 0, 1
    dinic = _Dinic(2 + m + k)
    for i in range(m):
        dinic.add_edge(source, 2 + i, capf[i])
    for j in range(k):
        dinic.add_edge(2 + m + j, sink, capg[j])

    flat = dist.ravel()
    order = np.argsort(flat, kind="stable")
    ptr = 0
    flow = 0
    curve: list[tuple[float, float]] = []
    for r in radii:
        while ptr < len(order) and flat[order[ptr]] <= r:
            idx = int(order[ptr])
            i, j = divmod(idx, k)
            dinic.add_edge(2 + i, 2 + m + j, capf[i])
            ptr += 1
        flow += dinic.max_flow(source, sink)
        deficiency = float(Fraction(den - flow, den))
        curve.append((float(r), deficiency))

    costs = [max(r, d) for r, d in curve]
    best = int(np.argmin(costs))
    epsilon = min(costs[best], 1.0)
    plan = None
    if include_plan:
        plan = _plan_at_radius(fm, gm, dist, curve[best][0], capf, capg, den)
    return ProkhorovResult(epsilon=float(epsilon), deficiency_curve=curve, plan=plan)


def _plan_at_radius(
    fm: FiniteMeasure,
    gm: FiniteMeasure,
    dist: np.ndarray,
    radius: float,
    capf: list[int],
    capg: list[int],
    den: int,
) -> CouplingPlan:
    m, k = dist.shape
    dinic = _Dinic(2 + m + k)
    for i in range(m):
        dinic.add_edge(0, 2 + i, capf[i])
    for j in range(k):
        dinic.add_edge(2 + m + j, 1, capg[j])
    mids = []
    ii, jj = np.nonzero(dist <= radius)
    for i, j in zip(ii.tolist(), jj.tolist()):
        mids.append((i, j, dinic.add_edge(2 + i, 2 + m + j, capf[i])))
    dinic.max_flow(0, 1)
    joint = np.zeros((m, k))
    for i, j, eid in mids:
        pushed = dinic.cap[eid ^ 1]  # reverse capacity holds the pushed flow
        if pushed:
            joint[i, j] = pushed / den
    # Pair up any uncoupled mass so the marginals reconstruct both measures;
    # the completed mass is exactly the deficiency, which the chosen radius
    # already accounts for.
    resid_rows = np.maximum(fm.masses - joint.sum(axis=1), 0.0)
    resid_cols = np.maximum(gm.masses - joint.sum(axis=0), 0.0)
    rsum = float(resid_rows.sum())
    csum = float(resid_cols.sum())
    if rsum > 0 and csum > 0:
        joint = joint + np.outer(resid_rows, resid_cols) / ((rsum + csum) / 2.0)
    return CouplingPlan(row_points=fm.points, col_points=gm.points, joint=joint)


def prokhorov_bruteforce(f: Measure, g: Measure) -> float:
    """Subset-enumeration oracle for the Prokhorov distance.

    Checks both neighborhood inequalities over every subset of each support
    (subsets of the supports suffice for discrete measures) at each critical
    radius and returns the min-max crossing.
    """
    fm = _as_finite(f)
    gm = _as_finite(g)
    m, k = len(fm.masses), len(gm.masses)
    if m + k > 16:
        raise RejectedInputError(
            f"the brute-force oracle allows at most 16 support points total, got {m + k}"
        )
    dist = _distance_matrix(fm.points, gm.points)
    radii = np.unique(np.concatenate(([0.0], dist.ravel())))
    wf, wg = fm.masses, gm.masses

    fsub = _subset_sums(wf)
    gsub = _subset_sums(wg)

    best = math.inf
    for r in radii:
        near = dist <= r
        # bitmask over F-indices within r of each G-atom, and vice versa
        f_near_g = [int(sum(1 << i for i in range(m) if near[i, j])) for j in range(k)]
        g_near_f = [int(sum(1 << j for j in range(k) if near[i, j])) for i in range(m)]
        viol = 0.0
        for mask in range(1, 1 << m):
            covered = sum(wg[j] for j in range(k) if mask & f_near_g[j])
            viol = max(viol, fsub[mask] - covered)
        for mask in range(1, 1 << k):
            covered = sum(wf[i] for i in range(m) if mask & g_near_f[i])
            viol = max(viol, gsub[mask] - covered)
        best = min(best, max(float(r), viol))
    return min(best, 1.0)


def _subset_sums(w: np.ndarray) -> list[float]:
    n = len(w)
    sums = [0.0] * (1 << n)
    for mask in range(1, 1 << n):
        low = mask & -mask
        sums[mask] = sums[mask ^ low] + float(w[low.bit_length() - 1])
    return sums


def coupling_check(plan: CouplingPlan, epsilon: float) -> tuple[float, bool]:
    """Total joint mass at pair distance above epsilon, and whether it stays
    within epsilon (plus slack)."""
    dist = _distance_matrix(plan.row_points, plan.col_points)
    exceed = float(plan.joint[dist > epsilon].sum())
    return exceed, exceed <= epsilon + COUPLING_SLACK


def scaling_transfer(
    f: Measure,
    g: Measure,
    a: float,
    b: float,
    *,
    point_budget: int = DEFAULT_POINT_BUDGET,
) -> tuple[float, float]:
    """Both sides of the rescaling inequality for the Prokhorov distance.

    Returns ``(lhs, rhs)`` where lhs is the distance between the pair scaled
    by 1/sqrt(b) and rhs is max(sqrt(a/b), 1) times the distance between the
    pair scaled by 1/sqrt(a); callers assert lhs <= rhs + tolerance.
    """
    if a <= 0 or b <= 0:
        raise RejectedInputError(f"scale parameters must be positive, got {a}, {b}")
    fm = _as_finite(f)
    gm = _as_finite(g)

    def scaled(mm: FiniteMeasure, t: float) -> FiniteMeasure:
        return FiniteMeasure(mm.points / math.sqrt(t), mm.masses)

    lhs = prokhorov_exact(
        scaled(fm, b), scaled(gm, b), point_budget=point_budget, include_plan=False
    ).epsilon
    base = prokhorov_exact(
        scaled(fm, a), scaled(gm, a), point_budget=point_budget, include_plan=False
    ).epsilon
    rhs = max(math.sqrt(a / b), 1.0) * base
    return lhs, rhs


def naive_shift_coupling(base: LatticeMeasure, n: int) -> CouplingPlan:
    """The coupling that realizes consecutive partial sums on one probability
    space: joint mass at (x, x + t) is (n-th power at x) times (base at t).

    For bounded-support bases every coupled pair differs by at most the
    largest support norm, so the exceedance at that radius is zero.
    """
    from .measures import convolve, power

    fn = power(base, n)
    fn1 = convolve(fn, base)
    fn_idx = np.argwhere(fn.masses > 0)
    base_idx = np.argwhere(base.masses > 0)
    out_idx = np.argwhere(fn1.masses > 0)
    col_of = {tuple(ix): j for j, ix in enumerate(map(tuple, out_idx))}
    wx = fn.masses[tuple(fn_idx.T)]
    wt = base.masses[tuple(base_idx.T)]
    step = np.asarray(fn.step)
    rows = np.asarray(fn.offset) + fn_idx * step
    cols = np.asarray(fn1.offset) + out_idx * step
    joint = np.zeros((len(fn_idx), len(out_idx)))
    for i in range(len(fn_idx)):
        for b in range(len(base_idx)):
            j = col_of[tuple(fn_idx[i] + base_idx[b])]
            joint[i, j] += wx[i] * wt[b]
    return CouplingPlan(row_points=rows, col_points=cols, joint=joint)
