"""NumPy implementations of the hot kernels.

This is the reference backend: the compiled extension in ``_core.pyx``
must reproduce these outputs bit for bit (same uint64 wraparound, same
float operation order), so results never depend on which backend loaded.
"""

import numpy as np

_M64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

_C1 = np.uint64(0xBF58476D1CE4E5B9)
_C2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)


def _mix64_array(z):
    # splitmix64 finalizer, elementwise on uint64 arrays (wraps silently)
    z = z ^ (z >> _S30)
    z = z * _C1
    z = z ^ (z >> _S27)
    z = z * _C2
    return z ^ (z >> _S31)


def oracle_bits(key0, key1, bitlen, words):
    """Response bits for a batch of packed queries.

    words is a (N, W) uint64 array, word 0 holding the least significant
    64 bits of the query value; bitlen separates query namespaces so the
    same value at different lengths gets independent bits.
    """
    n_rows, n_words = words.shape
    s0 = _mix64_int(key0 ^ _mix64_int(key1 ^ (GOLDEN * (bitlen + 1) & _M64)))
    s = np.full(n_rows, s0, dtype=np.uint64)
    for k in range(n_words):
        tweak = np.uint64((k + 1) * GOLDEN & _M64)
        s = _mix64_array(s ^ words[:, k] ^ tweak)
    s = _mix64_array(s ^ np.uint64(key1))
    return (s & np.uint64(1)).astype(np.uint8)


def _mix64_int(z):
    z &= _M64
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _M64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _M64
    return z ^ (z >> 31)


def fwht_inplace(a):
    """Unnormalized Walsh-Hadamard butterflies, in place on float64[2^n]."""
    n = a.shape[0]
    h = 1
    while h < n:
        v = a.reshape(-1, 2 * h)
        x = v[:, :h].copy()
        y = v[:, h:].copy()
        v[:, :h] = x + y
        v[:, h:] = x - y
        h *= 2
