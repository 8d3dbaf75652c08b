"""Counter-based SplitMix64 streams.

Every trial owns a fixed block of draws addressed by ``(trial, draw)``, so a
trial's randomness does not depend on how the run is chunked or on the order
trials are evaluated in.
"""
from __future__ import annotations

import numpy as np

GOLDEN_GAMMA = np.uint64(0x9E3779B97F4A7C15)
DRAWS_PER_TRIAL = 4
_MASK64 = (1 << 64) - 1


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def splitmix64(seed: int, positions) -> np.ndarray:
    """Outputs number ``positions`` (0-based) of the SplitMix64 sequence started at ``seed``."""
    pos = np.asarray(positions, dtype=np.uint64)
    state = np.uint64(seed & _MASK64)
    with np.errstate(over="ignore"):
        return _mix(state + (pos + np.uint64(1)) * GOLDEN_GAMMA)


def uniforms(seed: int, trials, draw: int) -> np.ndarray:
    """Doubles in [0, 1) for draw slot ``draw`` of each trial index."""
    if not 0 <= draw < DRAWS_PER_TRIAL:
        raise ValueError(f"draw slot must be in [0, {DRAWS_PER_TRIAL}), got {draw}")
    trials = np.asarray(trials, dtype=np.uint64)
    with np.errstate(over="ignore"):
        pos = trials * np.uint64(DRAWS_PER_TRIAL) + np.uint64(draw)
    bits = splitmix64(seed, pos)
    return (bits >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= _MASK64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed
