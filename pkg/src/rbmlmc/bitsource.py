"""Seeded, counted streams of fair random bits and dyadic uniforms.

A BitSource is a counter-based generator keyed by (seed, stream_id): the
64-bit block at index i is a pure function of (seed, stream_id, i), so the
bit at any global position is reproducible independently of how draws are
chunked, and distinct stream_ids give independent-looking substreams.

Dyadic uniforms live on the grid of cell midpoints
{sum_i b_i 2^-i + 2^-(q+1) : b_i in {0,1}}, i.e. (numerator + 1/2) / 2^q
with numerator assembled most-significant-bit first from q fresh bits.
"""

from dataclasses import dataclass

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MASK = np.uint64(0xFFFFFFFFFFFFFFFF)


def _mix64(z):
    """splitmix64 finalizer, elementwise on uint64."""
    z = np.uint64(z) if np.isscalar(z) else z.astype(np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@dataclass(frozen=True)
class DyadicValue:
    """Midpoint numerator/2^q + 2^-(q+1) of a dyadic cell of width 2^-q."""

    q: int
    numerator: int

    def __post_init__(self):
        if self.q < 1:
            raise ValueError(f"q must be >= 1, got {self.q}")
        if not 0 <= self.numerator < 2 ** self.q:
            raise ValueError(
                f"numerator {self.numerator} out of range [0, 2^{self.q})")

    @property
    def value(self) -> float:
        return (self.numerator + 0.5) / 2.0 ** self.q


class BitSource:
    """Single-owner stream of ideal fair bits, counted per draw."""

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.stream_id = int(stream_id) & 0xFFFFFFFFFFFFFFFF
        self.bits_consumed = 0
        with np.errstate(over="ignore"):
            k = _mix64(np.uint64(self.seed))
            k = _mix64((k + _GOLDEN) ^ _mix64(np.uint64(self.stream_id) + _GOLDEN))
        self._key = k

    def split(self, stream_id: int) -> "BitSource":
        """Fresh source on a different substream of the same seed."""
        return BitSource(self.seed, stream_id)

    def _blocks(self, first: int, count: int) -> np.ndarray:
        idx = np.arange(first, first + count, dtype=np.uint64)
        with np.errstate(over="ignore"):
            return _mix64(self._key + (idx + np.uint64(1)) * _GOLDEN)

    def draw_bits(self, n: int) -> np.ndarray:
        """Next n bits as a uint8 array; advances bits_consumed by n."""
        if n < 0:
            raise ValueError("n must be non-negative")
        if n == 0:
            return np.zeros(0, dtype=np.uint8)
        p0 = self.bits_consumed
        b0 = p0 // 64
        b1 = (p0 + n - 1) // 64 + 1
        blocks = self._blocks(b0, b1 - b0)
        bits = np.unpackbits(blocks.astype(">u8").view(np.uint8))
        off = p0 - 64 * b0
        self.bits_consumed += n
        return bits[off:off + n]

    def draw_bit(self) -> int:
        """Next single bit in {0, 1}."""
        return int(self.draw_bits(1)[0])

    def draw_dyadic_numerators(self, q: int, shape) -> np.ndarray:
        """Array of independent q-bit numerators; consumes q*prod(shape) bits."""
        if q < 1:
            raise ValueError(f"q must be >= 1, got {q}")
        shape = (shape,) if np.isscalar(shape) else tuple(shape)
        total = int(np.prod(shape, dtype=np.int64)) if shape else 1
        bits = self.draw_bits(total * q).reshape(total, q).astype(np.int64)
        weights = (1 << np.arange(q - 1, -1, -1, dtype=np.int64))
        return (bits @ weights).reshape(shape)

    def draw_dyadic_values(self, q: int, shape) -> np.ndarray:
        """Array of independent dyadic uniforms in (0,1) at depth q."""
        return (self.draw_dyadic_numerators(q, shape) + 0.5) / 2.0 ** q

    def draw_dyadic_uniform(self, q: int, d: int) -> list[DyadicValue]:
        """d independent dyadic uniforms at depth q; consumes d*q bits."""
        if d < 1:
            raise ValueError(f"d must be >= 1, got {d}")
        nums = self.draw_dyadic_numerators(q, (d,))
        return [DyadicValue(q, int(k)) for k in nums]
