"""Deterministic counter-based random number generation.

All randomness in this package (instance generation, oracle noise, merit
sampling) flows through :class:`Rng` so that a 64-bit seed plus a stream id
fully determine every draw.  The generator is the splitmix64 construction:
draw ``i`` of a stream is ``mix64(key + (i + 1) * GAMMA)`` where ``mix64`` is
the splitmix64 finalizer, ``GAMMA`` is the golden-ratio increment, and the
stream key is derived as ``mix64(mix64(seed) + stream * GAMMA)``.  Being a
pure function of (seed, stream, counter), the state is trivial to reason
about and independent streams never collide.

Gaussian variates use the Box-Muller transform on counter-based uniforms.
"""

from __future__ import annotations

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U64_MASK = (1 << 64) - 1
_INV_2_53 = 2.0 ** -53


def _mix64(z: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer on uint64 arrays (wrapping arithmetic)."""
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def _mix64_int(z: int) -> int:
    # Python-int twin of _mix64 for scalar key derivation (no numpy scalar
    # overflow warnings).
    z &= _U64_MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _U64_MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _U64_MASK
    return z ^ (z >> 31)


class Rng:
    """Counter-based generator with explicit (seed, stream) identity."""

    def __init__(self, seed: int, stream: int = 0):
        base = _mix64_int(seed & _U64_MASK)
        key = (base + (stream & _U64_MASK) * 0x9E3779B97F4A7C15) & _U64_MASK
        self._key = np.uint64(_mix64_int(key))
        self._counter = 0
        self.seed = int(seed)
        self.stream = int(stream)

    @property
    def counter(self) -> int:
        """Number of 64-bit words drawn so far."""
        return self._counter

    def u64(self, count: int) -> np.ndarray:
        """Next ``count`` raw 64-bit words."""
        start = self._counter + 1
        idx = np.arange(start, start + count, dtype=np.uint64)
        self._counter += count
        return _mix64(self._key + idx * _GAMMA)

    def uniform(self, count: int) -> np.ndarray:
        """iid uniforms on [0, 1) with 53-bit resolution."""
        return (self.u64(count) >> np.uint64(11)).astype(np.float64) * _INV_2_53

    def _uniform_open(self, count: int) -> np.ndarray:
        # (0, 1]: safe argument for log in Box-Muller.
        shifted = (self.u64(count) >> np.uint64(11)).astype(np.float64) + 1.0
        return shifted * _INV_2_53

    def uniform_range(self, lo: float, hi: float, count: int) -> np.ndarray:
        return lo + (hi - lo) * self.uniform(count)

    def normal(self, count: int) -> np.ndarray:
        """iid standard normals via Box-Muller on counter-based uniforms."""
        pairs = (count + 1) // 2
        u1 = self._uniform_open(pairs)
        u2 = self.uniform(pairs)
        radius = np.sqrt(-2.0 * np.log(u1))
        angle = 2.0 * np.pi * u2
        z = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])
        return z[:count]
