"""Seed plumbing.

Every experiment takes one explicit root seed. Children are derived by
splitting (SeedSequence.spawn), and sampling runs on a counter-based
generator (Philox), so trial layouts are reproducible and independent
of execution order.
"""

import numpy as np


def as_seed_sequence(seed):
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, (int, np.integer)):
        if seed < 0:
            raise ValueError("seed must be nonnegative")
        return np.random.SeedSequence(int(seed))
    raise TypeError(f"seed must be an int or SeedSequence, got {type(seed).__name__}")


def split(seed, k):
    """Derive k independent child seeds."""
    return as_seed_sequence(seed).spawn(k)


def generator(seed):
    return np.random.Generator(np.random.Philox(as_seed_sequence(seed)))


def oracle_keys(seed):
    """Two 64-bit key words for the keyed response generator."""
    state = as_seed_sequence(seed).generate_state(2, np.uint64)
    return int(state[0]), int(state[1])
