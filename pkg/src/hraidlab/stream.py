"""Deterministic counter-based uniform streams for reproducible trials.

Every Monte Carlo trial draws from its own stream, keyed by (seed, trial
index) through the SplitMix64 finalizer.  A draw is addressed purely by
(key, counter), so trials can run in any order, on any number of threads,
and in either the scalar or the vectorized engine with bit-identical
results.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB
_U64 = np.uint64


def mix64(z: int) -> int:
    """SplitMix64 finalizer: bijective avalanche mix of one 64-bit word."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MIX_A) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX_B) & _MASK64
    return z ^ (z >> 31)


def trial_key(seed: int, index: int) -> int:
    """64-bit stream key for trial ``index`` under ``seed``."""
    return mix64((mix64(seed) + index) & _MASK64)


def uniform_at(key: int, counter: int) -> float:
    """The ``counter``-th uniform in [0, 1) of the stream ``key``.

    Counters start at 1; the top 53 bits of the mixed word form the float.
    """
    z = mix64((key + counter * _GOLDEN) & _MASK64)
    return (z >> 11) * 2.0**-53


def _mix64_array(z: np.ndarray) -> np.ndarray:
    # unsigned arithmetic wraps modulo 2**64, matching mix64 above
    z = z ^ (z >> _U64(30))
    z = z * _U64(_MIX_A)
    z = z ^ (z >> _U64(27))
    z = z * _U64(_MIX_B)
    return z ^ (z >> _U64(31))


def trial_keys(seed: int, start: int, count: int) -> np.ndarray:
    """Vector of stream keys for trials start .. start+count-1."""
    base = _U64(mix64(seed))
    idx = np.arange(start, start + count, dtype=np.uint64)
    return _mix64_array(base + idx)


def uniforms_at(keys: np.ndarray, counter: int) -> np.ndarray:
    """Vectorized ``uniform_at`` over an array of stream keys."""
    offset = _U64((counter * _GOLDEN) & _MASK64)
    z = _mix64_array(keys + offset)
    return (z >> _U64(11)).astype(np.float64) * 2.0**-53


class TrialStream:
    """Stateful scalar view over one trial's uniforms."""

    __slots__ = ("key", "counter")

    def __init__(self, seed: int, index: int = 0) -> None:
        self.key = trial_key(seed, index)
        self.counter = 0

    def next_uniform(self) -> float:
        self.counter += 1
        return uniform_at(self.key, self.counter)
