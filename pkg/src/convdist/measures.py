"""Discrete probability measures on regular grids and finite point sets.

Two carriers are supported:

* ``LatticeMeasure`` -- a dense mass array over a uniform grid in dimension
  1 or 2.  This is the carrier for base distributions, their convolution
  powers and truncation splits.
* ``FiniteMeasure`` -- a weighted point set in R^d, the input format of the
  neighborhood/flow machinery.

All operations are pure functions of immutable inputs, so values can be
shared freely across threads.  Internal scratch buffers are per call.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
from scipy import signal

from .errors import BudgetExceededError, MassConservationError, RejectedInputError

# Tolerances and budgets.  MASS_TOL is the normalization tolerance enforced at
# construction time; CONV_MASS_TOL the allowed drift of a single convolution;
# FFT_CLAMP_LIMIT the largest total negative mass the FFT path may clamp away.
MASS_TOL = 1e-12
CONV_MASS_TOL = 1e-10
FFT_CLAMP_LIMIT = 1e-8
LOAD_MASS_TOL = 1e-9
DEFAULT_CELL_BUDGET = 1_000_000
DEFAULT_WEIGHT_CUTOFF = 1e-15
GRID_ALIGN_TOL = 1e-9

# Direct convolution is used while size(f) * size(g) stays below this cost;
# larger products go through the FFT path.
_DIRECT_COST_LIMIT = 1 << 18


def _as_tuple(value, dim: Optional[int] = None) -> tuple[float, ...]:
    if np.isscalar(value):
        out = (float(value),)
    else:
        out = tuple(float(v) for v in value)
    if dim is not None and len(out) != dim:
        raise RejectedInputError(f"expected a length-{dim} vector, got {value!r}")
    return out


@dataclass(frozen=True)
class LatticeMeasure:
    """Probability mass function on a uniform grid in dimension 1 or 2.

    ``masses[i]`` (or ``masses[i, j]``) is the mass at coordinate
    ``offset + index * step`` (per axis).  Masses are nonnegative and sum to
    one within ``MASS_TOL`` unless ``check_mass=False`` was passed (used for
    sub-probability mixtures that report their dropped mass separately).
    """

    step: tuple[float, ...]
    offset: tuple[float, ...]
    masses: np.ndarray
    check_mass: bool = True

    def __post_init__(self):
        step = _as_tuple(self.step)
        dim = len(step)
        if dim not in (1, 2):
            raise RejectedInputError(f"only dimensions 1 and 2 are supported, got {dim}")
        offset = _as_tuple(self.offset, dim)
        if any(h <= 0 for h in step):
            raise RejectedInputError(f"grid step must be positive, got {step}")
        masses = np.ascontiguousarray(self.masses, dtype=np.float64)
        if masses.ndim != dim:
            raise RejectedInputError(
                f"masses array must have {dim} axes, got {masses.ndim}"
            )
        if masses.size == 0:
            raise RejectedInputError("masses array is empty")
        if np.any(masses < 0):
            raise RejectedInputError("masses must be nonnegative")
        total = float(masses.sum())
        if self.check_mass and abs(total - 1.0) > MASS_TOL:
            raise RejectedInputError(
                f"total mass {total!r} deviates from 1 by more than {MASS_TOL}"
            )
        masses.setflags(write=False)
        object.__setattr__(self, "step", step)
        object.__setattr__(self, "offset", offset)
        object.__setattr__(self, "masses", masses)

    @property
    def dim(self) -> int:
        return len(self.step)

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    def axis_coords(self, axis: int) -> np.ndarray:
        """Grid coordinates along one axis."""
        n = self.masses.shape[axis]
        return self.offset[axis] + self.step[axis] * np.arange(n)

    def support(self) -> tuple[np.ndarray, np.ndarray]:
        """Coordinates and masses of all cells with positive mass.

        Returns ``(points, masses)`` with ``points`` of shape ``(m, dim)``.
        """
        idx = np.nonzero(self.masses > 0)
        cols = [self.offset[ax] + self.step[ax] * idx[ax] for ax in range(self.dim)]
        pts = np.stack(cols, axis=1).astype(np.float64)
        return pts, self.masses[idx].astype(np.float64)


@dataclass(frozen=True)
class FiniteMeasure:
    """Weighted point set in R^d with pairwise-distinct points."""

    points: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=np.float64))
        w = np.asarray(self.masses, dtype=np.float64).ravel()
        if pts.ndim != 2 or pts.shape[0] != w.shape[0]:
            raise RejectedInputError("points and masses must have matching lengths")
        if pts.shape[0] == 0:
            raise RejectedInputError("a finite measure needs at least one point")
        if np.any(w < 0):
            raise RejectedInputError("masses must be nonnegative")
        total = float(w.sum())
        if abs(total - 1.0) > MASS_TOL:
            raise RejectedInputError(
                f"total mass {total!r} deviates from 1 by more than {MASS_TOL}"
            )
        if np.unique(pts, axis=0).shape[0] != pts.shape[0]:
            raise RejectedInputError("points must be pairwise distinct")
        pts.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "masses", w)

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    def support(self) -> tuple[np.ndarray, np.ndarray]:
        keep = self.masses > 0
        return self.points[keep], self.masses[keep]


@dataclass(frozen=True)
class GaussianParams:
    """Mean vector and symmetric positive-semidefinite covariance matrix."""

    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64).ravel()
        cov = np.atleast_2d(np.asarray(self.covariance, dtype=np.float64))
        d = mean.shape[0]
        if cov.shape != (d, d):
            raise RejectedInputError(
                f"covariance must be {d}x{d} to match the mean, got {cov.shape}"
            )
        if np.max(np.abs(cov - cov.T), initial=0.0) > 1e-12:
            raise RejectedInputError("covariance must be symmetric within 1e-12")
        cov = (cov + cov.T) / 2.0
        eigs = np.linalg.eigvalsh(cov)
        if eigs.min() < -1e-12:
            raise RejectedInputError(
                f"covariance has eigenvalue {eigs.min():.3e} below -1e-12"
            )
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)

    @property
    def dim(self) -> int:
        return int(self.mean.shape[0])

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.covariance).min())


@dataclass(frozen=True)
class Decomposition:
    """Truncation split of a measure into a bounded core and a tail.

    The original measure equals ``(1 - p) * core + p * tail`` mass by mass;
    the core is supported inside the closed origin-centered ball of radius
    ``radius`` and the tail (when ``p > 0``) entirely outside it.
    ``core_cov_min_eig`` reports the smallest eigenvalue of the core's
    covariance so callers can judge whether the chosen radius makes the core
    nondegenerate.
    """

    p: float
    core: LatticeMeasure
    tail: Optional[LatticeMeasure]
    radius: float
    core_cov_min_eig: float


Measure = Union[LatticeMeasure, FiniteMeasure]


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------

def point_mass(a, step=1.0) -> LatticeMeasure:
    """Unit mass at the point ``a`` (scalar for 1D, pair for 2D)."""
    coords = _as_tuple(a)
    dim = len(coords)
    steps = _as_tuple(step) if not np.isscalar(step) else (float(step),) * dim
    masses = np.ones((1,) * dim)
    return LatticeMeasure(steps, coords, masses)


def rademacher() -> LatticeMeasure:
    """Equal masses 1/2 at -1 and +1."""
    return LatticeMeasure((2.0,), (-1.0,), np.array([0.5, 0.5]))


def uniform3() -> LatticeMeasure:
    """Uniform distribution on {-1, 0, 1}."""
    w = np.full(3, 1.0 / 3.0)
    return LatticeMeasure((1.0,), (-1.0,), w / w.sum())


def bernoulli(p: float) -> LatticeMeasure:
    """Masses 1-p at 0 and p at 1."""
    if not 0.0 < p < 1.0:
        raise RejectedInputError(f"bernoulli parameter must lie in (0, 1), got {p}")
    return LatticeMeasure((1.0,), (0.0,), np.array([1.0 - p, p]))


def rademacher2d() -> LatticeMeasure:
    """Product of two independent Rademacher coordinates."""
    return LatticeMeasure((2.0, 2.0), (-1.0, -1.0), np.full((2, 2), 0.25))


def identity_element(like: LatticeMeasure) -> LatticeMeasure:
    """Unit mass at the origin, on the grid of ``like`` (the convolution unit)."""
    dim = like.dim
    return LatticeMeasure(like.step, (0.0,) * dim, np.ones((1,) * dim))


# ---------------------------------------------------------------------------
# Convolution and powers
# ---------------------------------------------------------------------------

def _check_convolvable(f: LatticeMeasure, g: LatticeMeasure) -> None:
    if f.dim != g.dim:
        raise RejectedInputError(f"dimension mismatch: {f.dim} vs {g.dim}")
    if f.step != g.step:
        raise RejectedInputError(f"grid steps differ: {f.step} vs {g.step}")


def convolve(
    f: LatticeMeasure,
    g: LatticeMeasure,
    *,
    method: str = "auto",
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> LatticeMeasure:
    """Convolution of two lattice measures on a common grid.

    The result lives on the same grid with offsets added.  Small products are
    convolved by direct summation; large ones via FFT, where negative
    floating-point ringing is clamped to zero (hard failure if the clamped
    mass exceeds ``FFT_CLAMP_LIMIT``) and the result renormalized.
    """
    _check_convolvable(f, g)
    out_shape = tuple(a + b - 1 for a, b in zip(f.masses.shape, g.masses.shape))
    cells = math.prod(out_shape)
    if cells > cell_budget:
        raise BudgetExceededError(
            f"convolution output needs {cells} cells, over the cell budget {cell_budget}"
        )
    if method == "auto":
        method = "direct" if f.masses.size * g.masses.size <= _DIRECT_COST_LIMIT else "fft"
    if method == "direct":
        out = signal.convolve(f.masses, g.masses, mode="full", method="direct")
        out = np.maximum(out, 0.0)
    elif method == "fft":
        out = signal.fftconvolve(f.masses, g.masses, mode="full")
        clamped = float(-out[out < 0].sum()) if np.any(out < 0) else 0.0
        if clamped > FFT_CLAMP_LIMIT:
            raise MassConservationError(
                f"FFT convolution clamped {clamped:.3e} of negative mass "
                f"(limit {FFT_CLAMP_LIMIT})"
            )
        out = np.maximum(out, 0.0)
    else:
        raise RejectedInputError(f"unknown convolution method {method!r}")
    total = float(out.sum())
    if abs(total - 1.0) > CONV_MASS_TOL:
        raise MassConservationError(
            f"convolution drifted total mass to {total!r} (tolerance {CONV_MASS_TOL})"
        )
    out /= total
    offset = tuple(a + b for a, b in zip(f.offset, g.offset))
    return LatticeMeasure(f.step, offset, out)


def power(
    f: LatticeMeasure, n: int, *, cell_budget: int = DEFAULT_CELL_BUDGET
) -> LatticeMeasure:
    """n-fold convolution of ``f`` with itself, by binary exponentiation.

    ``power(f, 0)`` is the unit mass at the origin on ``f``'s grid.
    """
    if n != int(n) or n < 0:
        raise RejectedInputError(f"power exponent must be a nonnegative integer, got {n}")
    n = int(n)
    if n == 0:
        return identity_element(f)
    result: Optional[LatticeMeasure] = None
    base = f
    k = n
    while k:
        if k & 1:
            result = base if result is None else convolve(result, base, cell_budget=cell_budget)
        k >>= 1
        if k:
            base = convolve(base, base, cell_budget=cell_budget)
    assert result is not None
    return result


def rescale(f: LatticeMeasure, n: int) -> LatticeMeasure:
    """Distribution of X / sqrt(n): step and offset divided by sqrt(n)."""
    if n != int(n) or n < 1:
        raise RejectedInputError(f"rescale factor must be a positive integer, got {n}")
    r = math.sqrt(n)
    return LatticeMeasure(
        tuple(h / r for h in f.step), tuple(o / r for o in f.offset), f.masses
    )


def shift(f: LatticeMeasure, a) -> LatticeMeasure:
    """Translate the measure by the vector ``a`` (same as convolving with E_a)."""
    vec = _as_tuple(a, f.dim)
    return LatticeMeasure(f.step, tuple(o + v for o, v in zip(f.offset, vec)), f.masses)


# ---------------------------------------------------------------------------
# Truncation split and binomial mixtures
# ---------------------------------------------------------------------------

def _cell_norms(f: LatticeMeasure) -> np.ndarray:
    if f.dim == 1:
        return np.abs(f.axis_coords(0))
    cx = f.axis_coords(0)
    cy = f.axis_coords(1)
    return np.hypot(cx[:, None], cy[None, :])


def _trimmed(step, offset, masses) -> LatticeMeasure:
    """Normalized measure with all-zero border slices removed."""
    arr = np.asarray(masses, dtype=np.float64)
    nz = np.nonzero(arr > 0)
    lo = [int(ix.min()) for ix in nz]
    hi = [int(ix.max()) + 1 for ix in nz]
    sl = tuple(slice(a, b) for a, b in zip(lo, hi))
    out = arr[sl].copy()
    out /= out.sum()
    new_offset = tuple(o + h * a for o, h, a in zip(offset, step, lo))
    return LatticeMeasure(step, new_offset, out)


def decompose(f: LatticeMeasure, radius: float) -> Decomposition:
    """Split ``f`` into its restriction to the closed ball of the given radius
    about the origin (renormalized core) and the restriction to the complement
    (renormalized tail), with ``p`` the tail mass."""
    if radius <= 0:
        raise RejectedInputError(f"truncation radius must be positive, got {radius}")
    norms = _cell_norms(f)
    inside = norms <= radius
    total = f.total_mass
    mass_in = float(f.masses[inside].sum())
    if mass_in <= 0:
        raise RejectedInputError(
            f"no mass inside the ball of radius {radius}; the core is undefined"
        )
    p = float(f.masses[~inside].sum() / total)
    core = _trimmed(f.step, f.offset, np.where(inside, f.masses, 0.0))
    tail = None
    if p > 0:
        tail = _trimmed(f.step, f.offset, np.where(inside, 0.0, f.masses))
    mean, cov, _ = moments(core)
    min_eig = float(np.linalg.eigvalsh(cov).min())
    return Decomposition(p=p, core=core, tail=tail, radius=float(radius), core_cov_min_eig=min_eig)


def _mix(terms: Sequence[tuple[float, LatticeMeasure]]) -> LatticeMeasure:
    """Weighted sum of measures sharing a grid (offsets integer-aligned)."""
    step = terms[0][1].step
    for _, t in terms:
        if t.step != step:
            raise RejectedInputError("mixture terms must share one grid step")
    offs = np.array([t.offset for _, t in terms], dtype=np.float64)
    base = offs.min(axis=0)
    steparr = np.asarray(step)
    shifts = []
    for _, t in terms:
        rel = (np.asarray(t.offset) - base) / steparr
        idx = np.rint(rel).astype(int)
        if np.max(np.abs(rel - idx), initial=0.0) > GRID_ALIGN_TOL:
            raise RejectedInputError("mixture term offsets are not grid-aligned")
        shifts.append(idx)
    shapes = np.array([t.masses.shape for _, t in terms])
    extent = tuple((np.array(shifts) + shapes).max(axis=0))
    out = np.zeros(extent)
    for (w, t), sh in zip(terms, shifts):
        sl = tuple(slice(int(s), int(s) + m) for s, m in zip(sh, t.masses.shape))
        out[sl] += w * t.masses
    return LatticeMeasure(step, tuple(base), out, check_mass=False)


def _binomial_mixture(
    dec: Decomposition,
    n: int,
    extra: int,
    weight_cutoff: float,
    cell_budget: int,
) -> tuple[LatticeMeasure, float]:
    from .binomial_gaussian import binomial_weights

    if n != int(n) or n < 1:
        raise RejectedInputError(f"mixture order must be a positive integer, got {n}")
    n = int(n)
    if dec.p > 0 and dec.tail is None:
        raise RejectedInputError("a split with p > 0 needs a tail measure")
    weights = binomial_weights(n, dec.p)
    keep = np.nonzero(weights >= weight_cutoff)[0]
    dropped = float(weights.sum() - weights[keep].sum())
    max_k = int(keep.max())
    core_pows: dict[int, LatticeMeasure] = {0: identity_element(dec.core)}
    for j in range(1, n + extra + 1):
        core_pows[j] = convolve(core_pows[j - 1], dec.core, cell_budget=cell_budget)
    tail_pows: dict[int, LatticeMeasure] = {0: identity_element(dec.core)}
    for j in range(1, max_k + 1):
        tail_pows[j] = convolve(tail_pows[j - 1], dec.tail, cell_budget=cell_budget)
    terms = []
    for k in keep:
        k = int(k)
        piece = convolve(tail_pows[k], core_pows[n + extra - k], cell_budget=cell_budget)
        terms.append((float(weights[k]), piece))
    return _mix(terms), dropped


def interpolant(
    dec: Decomposition,
    n: int,
    *,
    weight_cutoff: float = DEFAULT_WEIGHT_CUTOFF,
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> tuple[LatticeMeasure, float]:
    """The in-between mixture sum_k b_k(n, p) tail^k core^(n+1-k).

    Terms with binomial weight below ``weight_cutoff`` are dropped; the second
    return value reports the dropped mass (the result's total mass is one
    minus that amount).
    """
    return _binomial_mixture(dec, n, 1, weight_cutoff, cell_budget)


def reconstruct_power(
    dec: Decomposition,
    n: int,
    *,
    weight_cutoff: float = DEFAULT_WEIGHT_CUTOFF,
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> tuple[LatticeMeasure, float]:
    """The mixture sum_k b_k(n, p) tail^k core^(n-k), which reproduces the
    n-th convolution power of the original measure."""
    return _binomial_mixture(dec, n, 0, weight_cutoff, cell_budget)


# ---------------------------------------------------------------------------
# Moments and conversions
# ---------------------------------------------------------------------------

def moments(m: Measure) -> tuple[np.ndarray, np.ndarray, float]:
    """Exact mean vector, covariance matrix and third absolute moment."""
    pts, w = m.support()
    total = w.sum()
    w = w / total
    mean = w @ pts
    centered = pts - mean
    cov = (w[:, None] * centered).T @ centered
    cov = (cov + cov.T) / 2.0
    third = float(w @ np.linalg.norm(pts, axis=1) ** 3)
    return mean, cov, third


def to_finite(f: LatticeMeasure, prune: float = 0.0) -> tuple[FiniteMeasure, float]:
    """Convert a lattice measure to a weighted point set.

    Cells with mass at most ``prune`` are dropped and the remainder is
    renormalized; the dropped mass is reported alongside the result.
    """
    if not 0.0 <= prune <= 1e-6:
        raise RejectedInputError(f"prune threshold must lie in [0, 1e-6], got {prune}")
    pts, w = f.support()
    keep = w > prune
    kept = float(w[keep].sum())
    dropped = float(f.total_mass - kept)
    if not np.any(keep):
        raise RejectedInputError("pruning removed all mass")
    return FiniteMeasure(pts[keep], w[keep] / kept), dropped


# ---------------------------------------------------------------------------
# JSON document format
# ---------------------------------------------------------------------------

def measure_to_doc(m: Measure) -> dict:
    """Serialize a measure to its JSON document form."""
    if isinstance(m, LatticeMeasure):
        masses = m.masses.tolist()
        return {
            "dim": m.dim,
            "step": list(m.step),
            "offset": list(m.offset),
            "masses": masses,
        }
    if isinstance(m, FiniteMeasure):
        return {"points": m.points.tolist(), "masses": m.masses.tolist()}
    raise RejectedInputError(f"cannot serialize {type(m).__name__}")


def measure_from_doc(doc: dict) -> Measure:
    """Parse and validate the JSON document form of a measure.

    Masses must sum to one within ``LOAD_MASS_TOL``; they are renormalized
    exactly on load.
    """
    if not isinstance(doc, dict):
        raise RejectedInputError("measure document must be a JSON object")
    if "points" in doc:
        pts = np.atleast_2d(np.asarray(doc["points"], dtype=np.float64))
        w = np.asarray(doc["masses"], dtype=np.float64).ravel()
        _validate_load_mass(w)
        return FiniteMeasure(pts, w / w.sum())
    if "dim" not in doc:
        raise RejectedInputError("measure document needs either 'points' or 'dim'")
    dim = int(doc["dim"])
    if dim not in (1, 2):
        raise RejectedInputError(f"dim must be 1 or 2, got {dim}")
    masses = np.asarray(doc["masses"], dtype=np.float64)
    if dim == 1:
        masses = masses.ravel()
    elif masses.ndim != 2:
        raise RejectedInputError("a 2D measure needs a nested masses array")
    _validate_load_mass(masses)
    step = _as_tuple(doc["step"], dim)
    offset = _as_tuple(doc["offset"], dim)
    return LatticeMeasure(step, offset, masses / masses.sum())


def _validate_load_mass(masses: np.ndarray) -> None:
    if np.any(masses < 0):
        raise RejectedInputError("masses must be nonnegative")
    total = float(masses.sum())
    if abs(total - 1.0) > LOAD_MASS_TOL:
        raise RejectedInputError(
            f"masses sum to {total!r}, outside 1 +/- {LOAD_MASS_TOL}"
        )


def load_measure_file(path: Union[str, Path]) -> Measure:
    with open(path, "r", encoding="utf-8") as fh:
        return measure_from_doc(json.load(fh))
