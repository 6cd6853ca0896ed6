"""Initial conditions: one smooth profile and a seeded low-regularity family.

Both constructors return states normalized to unit L2 norm.  The rough
family draws a complex uniform vector, damps mode k by |k|^{-theta}
(mean mode zeroed), which yields data of Sobolev smoothness ~theta.
The generator is numpy's PCG64 so runs are reproducible from the seed;
the same seed is shared by every method within one experiment.
"""

import numpy as np

from .errors import ConfigurationError
from .spectral import Grid, SpectralState, l2_norm, to_frequency


def smooth_data(grid: Grid) -> SpectralState:
    """cos(x) / (2 + sin(x)), sampled at the nodes and L2-normalized."""
    x = grid.nodes
    state = to_frequency(np.cos(x) / (2.0 + np.sin(x)), grid)
    return state * (1.0 / l2_norm(state))


def rough_data(grid: Grid, theta: float, seed: int) -> SpectralState:
    """Random coefficients damped by |k|^{-theta}, L2-normalized.

    theta must exceed 1/2 so the profile lies in L2 as the resolution
    grows.  Pure function of (grid, theta, seed).
    """
    if theta <= 0.5:
        raise ConfigurationError(f"theta must be > 1/2, got {theta}")
    rng = np.random.Generator(np.random.PCG64(seed))
    u = rng.random(grid.K) + 1j * rng.random(grid.K)
    k = grid.modes
    mask = np.zeros(grid.K)
    mask[k != 0] = np.abs(k[k != 0]).astype(np.float64) ** (-theta)
    state = SpectralState(u * mask, grid)
    return state * (1.0 / l2_norm(state))
