"""Counter-based splittable random numbers.

Every random draw is a pure function of (seed, replica, block, lane)
through a chain of 64-bit finalizing mixes, so any replica can generate
its own stream independently of how work is scheduled across chunks or
threads.  Identical keys give bit-identical streams on every platform.
"""

from __future__ import annotations

import numpy as np

__all__ = ["mix64", "counter_uniforms", "counter_steps"]

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_U53 = np.float64(1.0 / (1 << 53))


def mix64(x):
    """SplitMix64 finalizer, vectorized over uint64 arrays."""
    with np.errstate(over="ignore"):  # modular 2**64 wraparound is intended
        z = np.asarray(x, dtype=np.uint64) + _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
        return z ^ (z >> np.uint64(31))


def _key(seed: int, replica, block: int):
    h = mix64(np.uint64(seed & 0xFFFFFFFFFFFFFFFF))
    h = mix64(h ^ np.asarray(replica, dtype=np.uint64))
    return mix64(h ^ np.uint64(block))


def counter_uniforms(seed: int, replica, block: int, lanes: int) -> np.ndarray:
    """Uniform [0, 1) doubles for one (seed, replica, block) key.

    `replica` may be a scalar or an integer array; the result has shape
    (*replica.shape, lanes).
    """
    key = _key(seed, replica, block)
    lane_ids = np.arange(lanes, dtype=np.uint64)
    words = mix64(key[..., None] ^ lane_ids if np.ndim(key) else key ^ lane_ids)
    return (words >> np.uint64(11)).astype(np.float64) * _U53


def counter_steps(p: float, seed: int, replica, block: int, lanes: int) -> np.ndarray:
    """Walk increments: +1 with probability p, otherwise -1 (int8)."""
    u = counter_uniforms(seed, replica, block, lanes)
    return np.where(u < p, np.int8(1), np.int8(-1))
