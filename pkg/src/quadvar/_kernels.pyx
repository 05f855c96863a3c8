# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Must agree bit-for-bit with ``_kernels_py``."""
from libc.stdint cimport uint64_t, int64_t

import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef uint64_t GAMMA = 0x9E3779B97F4A7C15ULL
cdef uint64_t LOW27 = (1ULL << 27) - 1


cdef inline uint64_t _mix(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


def centered_uniform_sum(uint64_t seed, int64_t n):
    """Exact sum of ``n`` odd integers ``2*(x >> 11) + 1 - 2**53`` from the SplitMix64 stream.

    Each term divided by ``2**53`` is uniform on (-1, 1) and symmetric about zero.
    """
    if n < 0 or n >= (1LL << 36):
        raise ValueError(f"n must be in [0, 2**36), got {n}")
    cdef uint64_t state = seed
    cdef uint64_t u, hi = 0, lo = 0
    cdef int64_t k
    with nogil:
        for k in range(n):
            state += GAMMA
            u = ((_mix(state) >> 11) << 1) + 1
            hi += u >> 27
            lo += u & LOW27
    return (int(hi) << 27) + int(lo) - (int(n) << 53)


def splitmix_uniforms(uint64_t seed, int64_t n):
    """First ``n`` draws of the same stream as floats in (-1, 1)."""
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] view = out
    cdef uint64_t state = seed
    cdef int64_t k
    cdef double scale = 1.0 / 9007199254740992.0
    with nogil:
        for k in range(n):
            state += GAMMA
            view[k] = (<double>(<int64_t>(((_mix(state) >> 11) << 1) + 1) - 9007199254740992LL)) * scale
    return out
