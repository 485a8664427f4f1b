import numpy as np
import pytest

from risbc.channel import ChannelSet


def crandn(rng, *shape):
    """i.i.d. CN(0,1) entries."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_channels(rng, n_users=2, n_t=4, n_r=2, n_ris=16,
                    direct_scale=1.0, ris_scale=None) -> ChannelSet:
    """Synthetic Gaussian channel set with both links at comparable power."""
    if ris_scale is None:
        ris_scale = 1.0 / np.sqrt(max(n_ris, 1))
    return ChannelSet(
        direct=[direct_scale * crandn(rng, n_r, n_t) for _ in range(n_users)],
        ris_user=[ris_scale * crandn(rng, n_r, n_ris) for _ in range(n_users)],
        bs_ris=crandn(rng, n_ris, n_t))


def random_psd(rng, n, trace=1.0):
    a = crandn(rng, n, n)
    s = a @ a.conj().T
    return s * (trace / np.real(np.trace(s)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
