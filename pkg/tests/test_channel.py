"""Binary symmetric channel with retention parameter rho.

Each bit flips independently with probability (1-rho)/2: rho=1 is a
clean channel, rho=0 erases all correlation.
"""

import numpy as np
import pytest

from prclab.bits import BitString
from prclab.channel import apply_noise, flip_probability, noisy_bits
from prclab._rng import generator


def test_flip_probability_endpoints():
    assert flip_probability(1.0) == 0.0
    assert flip_probability(0.0) == 0.5
    assert flip_probability(0.5) == 0.25
    with pytest.raises(ValueError):
        flip_probability(1.5)
    with pytest.raises(ValueError):
        flip_probability(-0.1)


def test_clean_channel_is_identity():
    x = BitString.random(500, generator(1))
    assert apply_noise(x, 1.0, 7) == x


def test_empty_input_rejected():
    with pytest.raises(ValueError):
        apply_noise(BitString(0, 0), 0.5, 0)


def test_noise_is_seed_deterministic():
    x = BitString.random(200, generator(2))
    assert apply_noise(x, 0.5, 3) == apply_noise(x, 0.5, 3)
    assert apply_noise(x, 0.5, 4) != apply_noise(x, 0.5, 3)


def test_flip_rate_matches_parameter():
    n = 100_000
    x = BitString.zeros(n)
    for rho in (0.0, 0.5, 0.9):
        p = flip_probability(rho)
        flips = apply_noise(x, rho, 11).popcount()
        sigma = np.sqrt(n * p * (1 - p))
        assert abs(flips - n * p) < 5 * sigma


def test_noisy_bits_matches_scalar_path():
    # array route and BitString route share one sampling scheme
    x = BitString.random(64, generator(3))
    out = apply_noise(x, 0.7, 9)
    arr = noisy_bits(x.to_bits(), 0.7, generator(9))
    assert BitString.from_bits(arr) == out


def test_noise_independent_across_positions():
    # flips at two fixed positions across many seeds are uncorrelated
    n_trials = 4000
    a = np.empty(n_trials)
    b = np.empty(n_trials)
    x = BitString.zeros(2)
    for i in range(n_trials):
        y = apply_noise(x, 0.0, 1000 + i)
        a[i], b[i] = y[0], y[1]
    corr = np.corrcoef(a, b)[0, 1]
    assert abs(corr) < 5 / np.sqrt(n_trials)
