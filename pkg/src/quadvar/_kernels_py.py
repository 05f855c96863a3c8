"""Numpy fallback for the compiled kernels; same stream, same results."""
import numpy as np

GAMMA = np.uint64(0x9E3779B97F4A7C15)
M1 = np.uint64(0xBF58476D1CE4E5B9)
M2 = np.uint64(0x94D049BB133111EB)
LOW27 = np.uint64((1 << 27) - 1)
CHUNK = 1 << 16


def _stream(seed: int, start: int, stop: int) -> np.ndarray:
    """Odd integers ``2*(x >> 11) + 1`` for stream indices ``start..stop-1`` (uint64)."""
    k = np.arange(start + 1, stop + 1, dtype=np.uint64)
    z = np.uint64(seed) + k * GAMMA
    z = (z ^ (z >> np.uint64(30))) * M1
    z = (z ^ (z >> np.uint64(27))) * M2
    z ^= z >> np.uint64(31)
    return ((z >> np.uint64(11)) << np.uint64(1)) + np.uint64(1)


def centered_uniform_sum(seed: int, n: int) -> int:
    if n < 0 or n >= 1 << 36:
        raise ValueError(f"n must be in [0, 2**36), got {n}")
    hi = lo = 0
    with np.errstate(over="ignore"):
        for start in range(0, n, CHUNK):
            u = _stream(seed, start, min(n, start + CHUNK))
            hi += int((u >> np.uint64(27)).sum(dtype=np.uint64))
            lo += int((u & LOW27).sum(dtype=np.uint64))
    return (hi << 27) + lo - (n << 53)


def splitmix_uniforms(seed: int, n: int) -> np.ndarray:
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    with np.errstate(over="ignore"):
        u = _stream(seed, 0, n)
    return (u.astype(np.int64) - (1 << 53)) * (1.0 / (1 << 53))
