"""Binomial-family identities and Gaussian total-variation bounds.

The binomial pmf is evaluated through a log-space recurrence anchored at the
mode, which keeps the relative error near the bulk at a few ulps even for
very large parameters.  The Gaussian side provides the closed-form
total-variation bound between two nondegenerate normals and its
successive-sums specialization, plus an exact Kolmogorov comparison between a
1D lattice power and the moment-matched normal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import special

from .errors import RejectedInputError
from .measures import GaussianParams, LatticeMeasure, moments, power

MAX_BINOMIAL_N = 10_000_000


@dataclass(frozen=True)
class BinomialSpec:
    """Parameters (n, p) of a binomial distribution with 0 < p < 1."""

    n: int
    p: float

    def __post_init__(self):
        if self.n != int(self.n) or self.n < 1:
            raise RejectedInputError(f"n must be a positive integer, got {self.n}")
        if not 0.0 < self.p < 1.0:
            raise RejectedInputError(f"p must lie in (0, 1), got {self.p}")
        object.__setattr__(self, "n", int(self.n))


class TvIdentity(NamedTuple):
    tv: float
    kolmogorov: float
    p_times_mode: float


class TailBound(NamedTuple):
    exact_tail: float
    bound: float


def binomial_weights(n: int, p: float) -> np.ndarray:
    """Normalized binomial pmf over k = 0..n, stable for large n.

    Accepts the degenerate edges p = 0 and p = 1 (point masses), which arise
    from truncation splits of bounded-support measures.
    """
    if n != int(n) or n < 0:
        raise RejectedInputError(f"n must be a nonnegative integer, got {n}")
    n = int(n)
    w = np.zeros(n + 1)
    if p == 0.0:
        w[0] = 1.0
        return w
    if p == 1.0:
        w[n] = 1.0
        return w
    if not 0.0 < p < 1.0:
        raise RejectedInputError(f"p must lie in [0, 1], got {p}")
    if n == 0:
        return np.ones(1)
    k = np.arange(1, n + 1, dtype=np.float64)
    # log b_k - log b_{k-1} = log((n-k+1)/k) + log(p/(1-p))
    log_ratio = np.log((n - k + 1.0) / k) + (math.log(p) - math.log1p(-p))
    logs = np.concatenate(([0.0], np.cumsum(log_ratio)))
    logs -= logs.max()  # anchor at the mode
    w = np.exp(logs)
    w /= w.sum()
    return w


def binom_pmf(spec: BinomialSpec) -> LatticeMeasure:
    """The binomial distribution as a lattice measure on {0, 1, ..., n}."""
    if spec.n > MAX_BINOMIAL_N:
        raise RejectedInputError(
            f"n = {spec.n} exceeds the overflow guard {MAX_BINOMIAL_N}"
        )
    return LatticeMeasure((1.0,), (0.0,), binomial_weights(spec.n, spec.p))


def binom_tv_identity(spec: BinomialSpec) -> TvIdentity:
    """Three routes to the distance between consecutive binomials.

    Returns the half-L1 total variation, the CDF-sweep Kolmogorov distance
    and p times the largest pmf value, each computed independently.  For
    consecutive binomials all three coincide.
    """
    n, p = spec.n, spec.p
    bn = binomial_weights(n, p)
    bn1 = binomial_weights(n + 1, p)
    diff = np.concatenate((bn, [0.0])) - bn1
    tv = 0.5 * float(np.abs(diff).sum())
    kol = float(np.abs(np.cumsum(diff)).max())
    ptm = p * float(bn.max())
    return TvIdentity(tv=tv, kolmogorov=kol, p_times_mode=ptm)


def successive_ratios(spec: BinomialSpec) -> np.ndarray:
    """Pointwise pmf ratios b_k(n+1, p) / b_k(n, p) for k = 0..n."""
    n, p = spec.n, spec.p
    k = np.arange(n + 1, dtype=np.float64)
    return (n + 1.0) * (1.0 - p) / (n + 1.0 - k)


def ratio_monotone(spec: BinomialSpec) -> bool:
    """True iff the successive pmf ratios increase strictly in k and cross
    one exactly once (counting the vacuous crossing at k = n + 1)."""
    r = successive_ratios(spec)
    if not np.all(np.diff(r) > 0):
        return False
    above = np.concatenate((r > 1.0, [True]))  # ratio at k = n+1 is formally infinite
    crossings = int(np.sum(~above[:-1] & above[1:]))
    if above[0]:
        crossings += 1
    return crossings == 1


def bernstein_bound(spec: BinomialSpec) -> TailBound:
    """Exact upper-tail mass P{X - np >= np(1-p)} and its exponential bound."""
    n, p = spec.n, spec.p
    w = binomial_weights(n, p)
    threshold = n * p * (2.0 - p)
    kmin = math.ceil(threshold - 1e-9)
    exact = float(w[kmin:].sum()) if kmin <= n else 0.0
    bound = math.exp(-n * p * (1.0 - p) / 4.0)
    return TailBound(exact_tail=exact, bound=bound)


# ---------------------------------------------------------------------------
# Gaussian bounds
# ---------------------------------------------------------------------------

_SINGULAR_FLOOR = 1e-12


def _inv_sqrt(cov: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(cov)
    if vals.min() <= _SINGULAR_FLOOR:
        raise RejectedInputError(
            f"covariance is singular (smallest eigenvalue {vals.min():.3e})"
        )
    return (vecs * (vals**-0.5)) @ vecs.T


def gaussian_tv_lemma1(phi1: GaussianParams, phi2: GaussianParams) -> float:
    """Total-variation bound between two nondegenerate Gaussians:
    (||S1^{-1/2} S2 S1^{-1/2} - I||_F + ||S2^{-1/2} (b1 - b2)||) / 2."""
    if phi1.dim != phi2.dim:
        raise RejectedInputError("Gaussian parameters have mismatched dimensions")
    a1 = _inv_sqrt(phi1.covariance)
    a2 = _inv_sqrt(phi2.covariance)
    d = phi1.dim
    m = a1 @ phi2.covariance @ a1 - np.eye(d)
    term1 = float(np.linalg.norm(m, "fro"))
    term2 = float(np.linalg.norm(a2 @ (phi1.mean - phi2.mean)))
    return (term1 + term2) / 2.0


def gaussian_conv_tv_bound(base: GaussianParams, n: int) -> float:
    """Bound on the total variation between the n-th and (n+1)-st convolution
    powers of a Gaussian: (sqrt(d)/n + ||S^{-1/2} b|| / sqrt(n+1)) / 2."""
    if n != int(n) or n < 1:
        raise RejectedInputError(f"n must be a positive integer, got {n}")
    a = _inv_sqrt(base.covariance)
    d = base.dim
    return (math.sqrt(d) / n + float(np.linalg.norm(a @ base.mean)) / math.sqrt(n + 1)) / 2.0


def gaussian_kolmogorov_1d(f: LatticeMeasure, n: int) -> float:
    """Exact sup-distance between the CDF of the n-th power of a 1D lattice
    measure and the normal CDF with matching mean and variance."""
    if f.dim != 1:
        raise RejectedInputError("the Gaussian comparison is one-dimensional")
    if n != int(n) or n < 1:
        raise RejectedInputError(f"n must be a positive integer, got {n}")
    mean, cov, _ = moments(f)
    var = float(cov[0, 0])
    if var <= 0:
        raise RejectedInputError("the base measure is degenerate (zero variance)")
    fn = power(f, int(n))
    pts, w = fn.support()
    xs = pts[:, 0]
    cum = np.cumsum(w)
    sigma = math.sqrt(n * var)
    mu = n * float(mean[0])
    normal_cdf = 0.5 * special.erfc((mu - xs) / (sigma * math.sqrt(2.0)))
    left = np.concatenate(([0.0], cum[:-1]))
    gaps = np.maximum(np.abs(cum - normal_cdf), np.abs(left - normal_cdf))
    return float(gaps.max())
