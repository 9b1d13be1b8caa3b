"""Binary symmetric channel, correlation parameterization.

The channel with parameter rho keeps each bit with probability
(1+rho)/2 and flips it with probability (1-rho)/2. rho=1 is the
identity channel, rho=0 destroys all correlation with the input.
"""

import numpy as np

from . import _rng
from .bits import BitString

__all__ = ["flip_probability", "apply_noise", "noisy_bits"]


def flip_probability(rho):
    """Per-bit flip probability (1-rho)/2."""
    if not 0 <= rho <= 1:
        raise ValueError(f"rho must be in [0, 1], got {rho}")
    return (1 - rho) / 2


def apply_noise(x, rho, seed):
    """Pass x through the channel; deterministic given the seed."""
    if len(x) == 0:
        raise ValueError("input must be nonempty")
    rng = _rng.generator(seed)
    return BitString.from_bits(noisy_bits(x.to_bits(), rho, rng))


def noisy_bits(bits, rho, rng):
    """Array form: flip each entry of a uint8 0/1 array independently."""
    p = flip_probability(rho)
    if p == 0:
        return bits.copy()
    flips = rng.random(bits.shape) < p
    return bits ^ flips.astype(np.uint8)
