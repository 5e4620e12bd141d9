"""Deterministic counter-based random streams.

Problem instances must be reproducible bit-for-bit from their ids alone,
independent of construction order, so instance randomness is derived from a
keyed 64-bit mixer rather than a stateful global generator.  The mixer is the
splitmix64 finalizer; draw ``k`` of a stream seeded with ``s`` is
``mix64(s + k)``.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1

_GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB


class DegenerateStreamError(RuntimeError):
    """Raised when a bounded redraw loop keeps producing unusable draws."""


def mix64(value: int) -> int:
    """64-bit finalizing mixer (splitmix64) on a Python integer."""
    z = (value + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * _MIX_A) & MASK64
    z = ((z ^ (z >> 27)) * _MIX_B) & MASK64
    return z ^ (z >> 31)


def _mix64_array(values: np.ndarray) -> np.ndarray:
    z = (values + np.uint64(_GOLDEN))
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX_A)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX_B)
    return z ^ (z >> np.uint64(31))


class Stream:
    """Counter-based stream of uniforms and Gaussians.

    Uniform doubles are the top 53 bits of a mixed counter divided by 2**53;
    Gaussians consume two uniforms each via the Box-Muller cosine branch.
    """

    def __init__(self, seed: int):
        self.seed = seed & MASK64
        self.counter = 0

    def raw(self, n: int) -> np.ndarray:
        """Next ``n`` mixed 64-bit words as a uint64 array."""
        counters = np.arange(self.counter, self.counter + n, dtype=np.uint64)
        self.counter += n
        return _mix64_array(counters + np.uint64(self.seed))

    def uniforms(self, n: int) -> np.ndarray:
        """``n`` uniform doubles in [0, 1)."""
        return (self.raw(n) >> np.uint64(11)).astype(np.float64) / float(1 << 53)

    def gaussians(self, n: int) -> np.ndarray:
        """``n`` standard Gaussian doubles."""
        u = self.uniforms(2 * n)
        radius = u[0::2]
        # log(0) guard; a zero uniform occurs with probability 2**-53
        radius = np.where(radius == 0.0, 2.0 ** -53, radius)
        return np.sqrt(-2.0 * np.log(radius)) * np.cos(2.0 * np.pi * u[1::2])

    def permutation(self, n: int) -> np.ndarray:
        """Fisher-Yates permutation of ``range(n)`` driven by the stream."""
        order = np.arange(n)
        u = self.uniforms(max(n - 1, 0))
        for i in range(n - 1, 0, -1):
            j = int(u[n - 1 - i] * (i + 1))
            order[i], order[j] = order[j], order[i]
        return order


def instance_stream(function_id: int, instance_id: int, stream_tag: int) -> Stream:
    """Stream keyed by (function, instance, tag).

    The seed expression keeps distinct (function, instance, tag) triples on
    distinct streams for all realistic ranges of the three integers.
    """
    if function_id < 1:
        raise ValueError(f"function_id must be >= 1, got {function_id}")
    if instance_id < 1:
        raise ValueError(f"instance_id must be >= 1, got {instance_id}")
    key = (function_id + 10_000 * instance_id + 1_000_000_007 * stream_tag) & MASK64
    return Stream(mix64(key))
