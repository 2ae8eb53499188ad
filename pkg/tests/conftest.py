"""Shared helpers: random measure generators and independent mini-oracles."""

from __future__ import annotations

import numpy as np
import pytest

import convdist as cd


def random_lattice_1d(rng, max_cells=6, step=1.0, dyadic=False):
    """Random 1D lattice measure on an integer-offset grid."""
    n_cells = int(rng.integers(1, max_cells + 1))
    if dyadic:
        units = 64
        w = rng.integers(0, 10, size=n_cells).astype(float)
        if w.sum() == 0:
            w[int(rng.integers(0, n_cells))] = 1.0
        iw = np.floor(w / w.sum() * units).astype(int)
        iw[int(np.argmax(iw))] += units - iw.sum()
        w = iw / units
    else:
        w = rng.random(n_cells)
        w[rng.random(n_cells) < 0.25] = 0.0
        if w.sum() == 0:
            w[0] = 1.0
        w /= w.sum()
    offset = float(rng.integers(-3, 4)) * step
    return cd.LatticeMeasure((step,), (offset,), w)


def random_finite_1d(rng, max_atoms=5, grid=None, dyadic=True):
    """Random finite measure with atoms on a small 1D grid."""
    if grid is None:
        grid = np.arange(0.0, 2.25, 0.25)
    n_atoms = int(rng.integers(1, max_atoms + 1))
    atoms = rng.choice(len(grid), size=n_atoms, replace=False)
    pts = np.asarray(grid)[atoms].reshape(-1, 1)
    if dyadic:
        units = 64
        iw = rng.integers(1, 12, size=n_atoms)
        iw = np.floor(iw / iw.sum() * units).astype(int)
        iw = np.maximum(iw, 0)
        iw[int(np.argmax(iw))] += units - iw.sum()
        w = iw / units
    else:
        w = rng.random(n_atoms)
        w /= w.sum()
    return cd.FiniteMeasure(pts, w)


def align_lattice_pair(f: cd.LatticeMeasure, g: cd.LatticeMeasure):
    """Embed two same-step lattice measures into one array pair (test oracle)."""
    assert f.step == g.step
    step = np.asarray(f.step)
    base = np.minimum(f.offset, g.offset)
    out = []
    shifts = []
    for m in (f, g):
        rel = (np.asarray(m.offset) - base) / step
        idx = np.rint(rel).astype(int)
        assert np.max(np.abs(rel - idx)) < 1e-9
        shifts.append(idx)
    shape = tuple(
        max(s[ax] + m.masses.shape[ax] for s, m in zip(shifts, (f, g)))
        for ax in range(f.dim)
    )
    for m, s in zip((f, g), shifts):
        arr = np.zeros(shape)
        sl = tuple(slice(int(a), int(a) + k) for a, k in zip(s, m.masses.shape))
        arr[sl] = m.masses
        out.append(arr)
    return out[0], out[1]


def brute_interval_distance(f, g):
    """Independent O(atoms^2) enumeration of the interval-distance optimum."""
    atoms = {}
    for m, sign in ((f, +1), (g, -1)):
        pts, w = m.support()
        for x, mass in zip(pts[:, 0], w):
            atoms[round(float(x), 9)] = atoms.get(round(float(x), 9), 0.0) + sign * mass
    xs = sorted(atoms)
    d = [atoms[x] for x in xs]
    best = 0.0
    for i in range(len(d)):
        run = 0.0
        for j in range(i, len(d)):
            run += d[j]
            best = max(best, abs(run))
    return best


def brute_cdf_distance(f, g):
    """Independent CDF sweep: evaluate both CDFs at every atom by summation."""
    pf, wf = f.support()
    pg, wg = g.support()
    xs = sorted(set(np.round(pf[:, 0], 9)) | set(np.round(pg[:, 0], 9)))
    best = 0.0
    for x in xs:
        cf = float(wf[np.round(pf[:, 0], 9) <= x].sum())
        cg = float(wg[np.round(pg[:, 0], 9) <= x].sum())
        best = max(best, abs(cf - cg))
    return best


@pytest.fixture(scope="session")
def service_client():
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DeprecationWarning)
        from fastapi.testclient import TestClient

    from convdist.service import create_app

    with TestClient(create_app()) as client:
        yield client
