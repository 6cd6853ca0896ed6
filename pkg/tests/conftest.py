import numpy as np
import pytest

from nlsr import NonlinearityParams, SpectralState, l2_norm, make_grid


@pytest.fixture
def grid():
    return make_grid(128)


@pytest.fixture
def params():
    return NonlinearityParams(lam=1.0, p=1)


@pytest.fixture
def rng():
    return np.random.default_rng(424242)


def random_state(grid, rng, decay=3.0, normalize=True):
    """Random field with |k|^-decay spectrum (H^{decay - 1/2 - eps} regularity)."""
    c = rng.standard_normal(grid.K) + 1j * rng.standard_normal(grid.K)
    c *= (1.0 + np.abs(grid.modes)) ** (-decay)
    st = SpectralState(c, grid)
    if normalize:
        st = st * (1.0 / l2_norm(st))
    return st
