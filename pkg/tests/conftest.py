import numpy as np
import pytest

from ios_noma import ArrayGeometry, SystemParams


@pytest.fixture
def half_wave_geometry():
    """Factory for the default half-wavelength rectangular layout."""
    def make(n_h=15, n_v=4, wavelength=0.1):
        return ArrayGeometry(n_h=n_h, n_v=n_v, elem_len_l=wavelength / 2,
                             elem_len_w=wavelength / 2, wavelength=wavelength)
    return make


@pytest.fixture
def noma_params():
    """Factory for the baseline two-user setup (splits 0.6/0.8, 0.8/0.6)."""
    def make(**kwargs):
        return SystemParams.from_db(**kwargs)
    return make


@pytest.fixture
def tboost_params():
    """Factory for the single-user setup serving T with everything."""
    def make(**kwargs):
        return SystemParams.from_db(q_t=1.0, q_r=0.0, alpha=1.0, beta=0.0, **kwargs)
    return make


@pytest.fixture
def rng():
    return np.random.default_rng(987654321)
