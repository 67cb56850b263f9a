"""Counter-based per-replication random streams.

Every replication owns an independent stream derived from ``(seed, index)``:

    key(seed, i)  = mix64(mix64(seed) + GOLDEN * (i + 1))
    word(key, j)  = mix64(key + GOLDEN * (j + 1))
    uniform       = (word >> 11) * 2**-53            in [0, 1)

``mix64`` is the SplitMix64 finalizer and ``GOLDEN`` its increment, so a
stream is the SplitMix64 sequence seeded with its key. Because draw ``j`` is
a pure function of ``(key, j)``, replications can be evaluated in any order,
in any thread, or in lockstep across a vector of replications, and always
produce the same numbers. The compiled kernels implement the same rule.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_INV53 = 1.0 / 9007199254740992.0


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def stream_key(seed: int, index: int) -> int:
    return mix64(mix64(seed) + GOLDEN * (index + 1))


class ReplicationStream:
    """Scalar uniform source for one replication; ``random()`` like numpy's."""

    __slots__ = ("key", "counter")

    def __init__(self, seed: int, index: int = 0):
        self.key = stream_key(seed, index)
        self.counter = 0

    def random(self) -> float:
        self.counter += 1
        return (mix64(self.key + GOLDEN * self.counter) >> 11) * _INV53


# numpy versions, used by the vectorized fallback kernels

_G = np.uint64(GOLDEN)
_U30, _U27, _U31, _U11 = (np.uint64(s) for s in (30, 27, 31, 11))
_UM1, _UM2 = np.uint64(_M1), np.uint64(_M2)


def mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _U30)) * _UM1
    z = (z ^ (z >> _U27)) * _UM2
    return z ^ (z >> _U31)


def stream_keys(seed: int, start: int, count: int) -> np.ndarray:
    """Keys of replications ``start .. start+count-1``."""
    base = np.uint64(mix64(seed))
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    return mix64_array(base + _G * idx)


def uniforms(keys: np.ndarray, counters: np.ndarray) -> np.ndarray:
    """Draw number ``counters`` (1-based) from each stream, elementwise."""
    word = mix64_array(keys + _G * counters.astype(np.uint64, copy=False))
    return (word >> _U11).astype(np.float64) * _INV53
