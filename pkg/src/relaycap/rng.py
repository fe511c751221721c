"""Counter-based deterministic randomness.

Everything random in the simulator is a pure function of (seed, stream salts,
counter), so results never depend on call order or thread count. The core is
a splitmix64-style avalanche; normals come from the inverse CDF.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_U53 = float(1 << 53)


def mix64(x):
    """Splitmix64 finalizer, vectorized over uint64 arrays."""
    x = np.asarray(x, dtype=np.uint64)
    with np.errstate(over="ignore"):  # wraparound is the point
        x = x + _GAMMA
        x = (x ^ (x >> np.uint64(30))) * _M1
        x = (x ^ (x >> np.uint64(27))) * _M2
    return x ^ (x >> np.uint64(31))


def stream_key(seed: int, *salts: int) -> int:
    """Collapse a seed plus salt integers into one 64-bit stream key."""
    state = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
    for salt in salts:
        state = mix64(state ^ np.uint64(salt & 0xFFFFFFFFFFFFFFFF))[()]
    return int(state)


def uniforms(key: int, counters) -> np.ndarray:
    """Uniform(0,1) values for the given counters, open at both ends."""
    c = np.asarray(counters, dtype=np.uint64)
    bits = mix64(np.uint64(key) ^ mix64(c))
    u = (bits >> np.uint64(11)).astype(np.float64) / _U53
    return np.clip(u, 1.0 / _U53, 1.0 - 1.0 / _U53)


def normals(key: int, counters) -> np.ndarray:
    """Standard normal values for the given counters."""
    return ndtri(uniforms(key, counters))


def trial_seed(seed: int, index: int) -> int:
    """Per-trial seed derived from the experiment seed and trial index."""
    return stream_key(seed, 0x7472, index)
