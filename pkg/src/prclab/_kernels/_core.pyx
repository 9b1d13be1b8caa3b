# Compiled twins of the kernels in pure.py. Same uint64 wraparound, same
# float operation order, so outputs are bit-identical to the fallback.

from libc.stdint cimport uint8_t, uint64_t

import numpy as np

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15U


cdef inline uint64_t mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9U
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBU
    return z ^ (z >> 31)


def oracle_bits(key0, key1, bitlen, words):
    """Response bits for a batch of packed queries; see pure.oracle_bits."""
    cdef uint64_t k0 = key0
    cdef uint64_t k1 = key1
    cdef uint64_t blen = bitlen
    cdef const uint64_t[:, ::1] w = np.ascontiguousarray(words, dtype=np.uint64)
    cdef Py_ssize_t n_rows = w.shape[0]
    cdef Py_ssize_t n_words = w.shape[1]
    out = np.empty(n_rows, dtype=np.uint8)
    cdef uint8_t[::1] o = out
    cdef uint64_t s0 = mix64(k0 ^ mix64(k1 ^ (GOLDEN * (blen + 1))))
    cdef uint64_t s
    cdef Py_ssize_t i, k
    with nogil:
        for i in range(n_rows):
            s = s0
            for k in range(n_words):
                s = mix64(s ^ w[i, k] ^ ((<uint64_t> (k + 1)) * GOLDEN))
            s = mix64(s ^ k1)
            o[i] = <uint8_t> (s & 1U)
    return out


def fwht_inplace(a):
    """Unnormalized Walsh-Hadamard butterflies, in place on float64[2^n]."""
    cdef double[::1] v = a
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t h = 1
    cdef Py_ssize_t i, j
    cdef double x, y
    with nogil:
        while h < n:
            i = 0
            while i < n:
                for j in range(i, i + h):
                    x = v[j]
                    y = v[j + h]
                    v[j] = x + y
                    v[j + h] = x - y
                i += 2 * h
            h *= 2
