"""Counter-based random streams: vectorized Philox4x32-10.

Every Monte Carlo sample owns an independent stream keyed by
(run seed, sample index); the j-th variate of a stream is a pure function of
(seed, index, j). Results are therefore bitwise independent of chunking,
scheduling and worker count. Implemented directly on uint64 numpy lanes
(32x32 products fit exactly), so drawing is an elementwise array operation.
"""

from __future__ import annotations

import numpy as np

_M64 = np.uint64(0xFFFFFFFFFFFFFFFF)
_MASK32 = np.uint64(0xFFFFFFFF)
_PHILOX_M0 = np.uint64(0xD2511F53)
_PHILOX_M1 = np.uint64(0xCD9E8D57)
_WEYL0 = np.uint64(0x9E3779B9)
_WEYL1 = np.uint64(0xBB67AE85)
_GOLDEN64 = np.uint64(0x9E3779B97F4A7C15)
_SHIFT32 = np.uint64(32)


def _splitmix64(x: np.ndarray) -> np.ndarray:
    z = (x + _GOLDEN64) & _M64
    z = ((z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)) & _M64
    z = ((z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)) & _M64
    return z ^ (z >> np.uint64(31))


def stream_keys(seed: int, indices: np.ndarray) -> np.ndarray:
    """64-bit Philox key per stream, derived from (seed, stream index)."""
    idx = np.asarray(indices, dtype=np.uint64)
    base = _splitmix64(np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF)], dtype=np.uint64))[0]
    return _splitmix64(base ^ ((idx + np.uint64(1)) * _GOLDEN64 & _M64))


def philox4x32(
    c0: np.ndarray, c1: np.ndarray, c2: np.ndarray, c3: np.ndarray,
    k0: np.ndarray, k1: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Ten Philox4x32 rounds; inputs/outputs are 32-bit values in uint64 lanes."""
    for _ in range(10):
        p0 = _PHILOX_M0 * c0
        p1 = _PHILOX_M1 * c2
        hi0, lo0 = p0 >> _SHIFT32, p0 & _MASK32
        hi1, lo1 = p1 >> _SHIFT32, p1 & _MASK32
        c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
        k0 = (k0 + _WEYL0) & _MASK32
        k1 = (k1 + _WEYL1) & _MASK32
    return c0, c1, c2, c3


def normal_pairs(keys: np.ndarray, counters: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Two standard normals per (stream, counter) via Box-Muller."""
    ctr = np.asarray(counters, dtype=np.uint64)
    k0 = keys & _MASK32
    k1 = keys >> _SHIFT32
    r0, r1, r2, r3 = philox4x32(
        ctr & _MASK32, ctr >> _SHIFT32,
        np.zeros_like(ctr), np.zeros_like(ctr),
        k0, k1,
    )
    u1 = (((r0 << _SHIFT32) | r1).astype(np.float64) + 0.5) * 2.0 ** -64
    u2 = (((r2 << _SHIFT32) | r3).astype(np.float64) + 0.5) * 2.0 ** -64
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = (2.0 * np.pi) * u2
    return radius * np.cos(angle), radius * np.sin(angle)


def normals(keys: np.ndarray, counters: np.ndarray) -> np.ndarray:
    """The counters-th standard normal of each stream.

    Consecutive counters share one Philox call per pair, so a stream's j-th
    draw is always the same number no matter how it is consumed.
    """
    ctr = np.asarray(counters, dtype=np.uint64)
    z0, z1 = normal_pairs(keys, ctr >> np.uint64(1))
    return np.where((ctr & np.uint64(1)).astype(bool), z1, z0)
