"""Reproducible random streams.

A stream is a Philox4x64-10 counter-based generator whose 128-bit key is
``(splitmix64(master_seed), index)``.  The map from ``(master_seed, index)``
to the key is injective, so distinct indices never share a key, and the
stream contents depend on nothing but that pair.

Uniform variates are built from raw 64-bit words as
``((w >> 11) + 0.5) * 2**-53``, which lies strictly inside (0, 1).
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
_TWO_M53 = 2.0 ** -53


def splitmix64(x: int) -> int:
    """Stafford's mix13 finalizer as used by SplitMix64 (a bijection on 64 bits)."""
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class RngStream:
    """One independent random stream, owned by a single worker at a time."""

    def __init__(self, master_seed: int, stream_index: int):
        self.master_seed = int(master_seed) & MASK64
        self.stream_index = int(stream_index) & MASK64
        key = np.array([splitmix64(self.master_seed), self.stream_index], dtype=np.uint64)
        self._bitgen = np.random.Philox(key=key)

    def __repr__(self):
        return f"RngStream(master_seed={self.master_seed}, stream_index={self.stream_index})"

    @property
    def key(self) -> tuple[int, int]:
        return splitmix64(self.master_seed), self.stream_index

    def raw(self, n: int) -> np.ndarray:
        """Next ``n`` raw 64-bit words."""
        return self._bitgen.random_raw(n)

    def uniforms(self, n: int) -> np.ndarray:
        """Next ``n`` uniforms on the open interval (0, 1), one word each."""
        w = self.raw(n)
        return ((w >> np.uint64(11)).astype(np.float64) + 0.5) * _TWO_M53

    def child(self, j: int) -> "RngStream":
        """Deterministic sub-stream ``j`` of this stream."""
        return RngStream(splitmix64(self.master_seed ^ splitmix64(self.stream_index)), j)


def derive_stream(master_seed: int, index: int) -> RngStream:
    return RngStream(master_seed, index)
