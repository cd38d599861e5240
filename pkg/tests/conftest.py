"""Shared fixtures and helpers for the test suite."""

import numpy as np
import pytest

import abcshadow as a

import oracles


@pytest.fixture
def unit_window():
    return a.Window((0.0, 0.0), (1.0, 1.0))


@pytest.fixture
def gaussian():
    return a.GaussianModel(1000)


# observed statistics of the two-parameter Gaussian experiment
T_OBS_GAUSSIAN = (1765.45, 12145.83)
GAUSSIAN_PRIOR = ((-100.0, 0.0), (100.0, 200.0))

# true posterior of that experiment, by 2-D grid quadrature of the analytic
# density (tests/oracles.py, 2401^2 grid; quantile drift under refinement
# < 6e-6). Order: q5, q25, q50, q75, q95, then the mean.
QUAD_Q1 = (1.6088, 1.7012, 1.7654, 1.8297, 1.9221)
QUAD_MEAN1 = 1.7654
QUAD_Q2 = (8.4260, 8.7938, 9.0622, 9.3417, 9.7642)
QUAD_MEAN2 = 9.0744


def random_pattern(window, n, seed, marked=False):
    gen = a.RngState(seed, 0).generator()
    pts = gen.uniform(window.lower, window.upper, size=(n, window.dim))
    marks = gen.uniform(0.0, np.pi, n) if marked else None
    return a.PointPattern(pts, window, marks)


def run_toy_chain_chisquare(seed, n_blocks=10_000, block=100, burn_blocks=100):
    """Detailed-balance check: capped Strauss toy vs exact enumeration.

    With the interaction range above the window diameter every pair
    interacts, so the stationary law over sorted 3x3 cell-occupancy classes
    is exactly enumerable. Runs block*(n_blocks + burn_blocks) MH steps,
    records one state per block, and returns (chi2, p, dof).
    """
    from scipy import stats as sps

    win = a.Window((0.0, 0.0), (1.0, 1.0))
    toy = a.StraussModel(r=2.0, window=win)
    theta = (np.log(2.0), np.log(0.8))
    cfg = a.PPSamplerConfig(sweeps=block, max_points=3)
    law = oracles.enumerate_capped_strauss_classes(theta[0], theta[1], 9, 3)

    def occupancy(pat):
        if len(pat) == 0:
            return ()
        cells = np.minimum((np.asarray(pat.points) * 3).astype(int), 2)
        counts = np.bincount(cells[:, 0] * 3 + cells[:, 1], minlength=9)
        return tuple(sorted((int(c) for c in counts if c > 0), reverse=True))

    gen = a.RngState(seed, 0).generator()
    pat = a.PointPattern.empty(win)
    counts: dict = {}
    for i in range(n_blocks + burn_blocks):
        pat = a.pp_mh_simulate(toy, theta, config=cfg, init=pat, rng=gen)
        if i >= burn_blocks:
            key = occupancy(pat)
            counts[key] = counts.get(key, 0) + 1
    observed = np.array([counts.get(k, 0) for k in law])
    expected = np.array([p * n_blocks for p in law.values()])
    chi2, p = sps.chisquare(observed, expected)
    return float(chi2), float(p), len(law) - 1


def shadow_gap_curve(deltas, seed, n_pairs=100, n_cells=32):
    """Worst |numeric ideal alpha - shadow alpha| over seeded proposal pairs.

    One value per box width.  The relative offset of psi inside the box is
    drawn once per pair and scaled with the width, so shrinking the box moves
    every proposal toward its own theta and the curve isolates the width
    effect.  The auxiliary statistic is an exact Gaussian draw at theta.
    """
    model = a.GaussianModel(1000)
    gen = a.as_generator(a.RngState(seed, 0))
    th = np.column_stack([gen.uniform(1.5, 2.5, n_pairs),
                          gen.uniform(8.0, 10.0, n_pairs)])
    offsets = gen.uniform(-0.5, 0.5, (n_pairs, 2))
    t_aux = [a.sufficient_statistics(
        model, a.sample_gaussian_exact(model, th[i], gen))
        for i in range(n_pairs)]
    gaps = []
    for d in deltas:
        width = (d, d)
        worst = 0.0
        for i in range(n_pairs):
            psi = th[i] + offsets[i] * d
            ideal = a.ideal_acceptance_numeric(
                model, T_OBS_GAUSSIAN, t_aux[i], th[i], psi, width,
                n_cells=n_cells)
            shadow = a.shadow_acceptance(
                model, T_OBS_GAUSSIAN, t_aux[i], th[i], psi)
            worst = max(worst, abs(ideal - shadow))
        gaps.append(worst)
    return gaps
