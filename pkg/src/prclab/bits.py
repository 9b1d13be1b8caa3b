"""Immutable bit strings with hex interchange.

Bit 0 is the most significant bit of the backing integer. Hex encoding
is most-significant-nibble first; lengths that are not a multiple of 4
are zero-padded at the least significant end, so parsing needs the
intended length to round-trip exactly.
"""

import numpy as np

from ._pack import value_to_words

__all__ = ["BitString"]


class BitString:
    """Fixed-length bit sequence backed by a python integer."""

    __slots__ = ("_value", "_n")

    def __init__(self, value, n):
        if n < 0:
            raise ValueError("length must be nonnegative")
        if not 0 <= value < (1 << n):
            raise ValueError(f"value {value} does not fit in {n} bits")
        self._value = value
        self._n = n

    @property
    def value(self):
        return self._value

    @property
    def n(self):
        return self._n

    @classmethod
    def zeros(cls, n):
        return cls(0, n)

    @classmethod
    def ones(cls, n):
        return cls((1 << n) - 1, n)

    @classmethod
    def from_bits(cls, bits):
        """Build from an iterable of {0,1}, most significant first."""
        arr = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits)
        arr = arr.astype(np.uint8)
        if arr.ndim != 1:
            raise ValueError("bits must be one-dimensional")
        if arr.size and int(arr.max()) > 1:
            raise ValueError("bits must be 0 or 1")
        n = arr.size
        padded = np.concatenate([np.zeros((-n) % 8, dtype=np.uint8), arr])
        value = int.from_bytes(np.packbits(padded).tobytes(), "big")
        return cls(value, n)

    def to_bits(self):
        """The bits as a uint8 array, most significant first."""
        n = self._n
        if n == 0:
            return np.zeros(0, dtype=np.uint8)
        nbytes = (n + 7) // 8
        raw = np.frombuffer(self._value.to_bytes(nbytes, "big"), dtype=np.uint8)
        return np.unpackbits(raw)[8 * nbytes - n :]

    @classmethod
    def random(cls, n, rng):
        """Uniform n-bit string drawn from a numpy Generator."""
        if n == 0:
            return cls(0, 0)
        nbytes = (n + 7) // 8
        value = int.from_bytes(rng.bytes(nbytes), "big") >> (8 * nbytes - n)
        return cls(value, n)

    def hex(self):
        if self._n == 0:
            return ""
        nhex = (self._n + 3) // 4
        return format(self._value << (4 * nhex - self._n), f"0{nhex}x")

    @classmethod
    def from_hex(cls, s, n=None):
        if n is None:
            n = 4 * len(s)
        if n > 4 * len(s):
            raise ValueError("hex string too short for requested length")
        raw = int(s, 16) if s else 0
        pad = 4 * len(s) - n
        if raw & ((1 << pad) - 1):
            raise ValueError("nonzero padding bits in hex string")
        return cls(raw >> pad, n)

    def concat(self, other):
        return BitString((self._value << other._n) | other._value, self._n + other._n)

    def __xor__(self, other):
        if self._n != other._n:
            raise ValueError("length mismatch")
        return BitString(self._value ^ other._value, self._n)

    def popcount(self):
        return self._value.bit_count()

    def hamming_distance(self, other):
        return (self ^ other).popcount()

    def to_words(self):
        """Little-endian 64-bit words of the value, for query packing."""
        return value_to_words(self._value, self._n)

    def __len__(self):
        return self._n

    def __getitem__(self, index):
        if isinstance(index, slice):
            return BitString.from_bits(self.to_bits()[index])
        if not -self._n <= index < self._n:
            raise IndexError("bit index out of range")
        if index < 0:
            index += self._n
        return (self._value >> (self._n - 1 - index)) & 1

    def __iter__(self):
        v, n = self._value, self._n
        for i in range(n):
            yield (v >> (n - 1 - i)) & 1

    def __eq__(self, other):
        if not isinstance(other, BitString):
            return NotImplemented
        return self._n == other._n and self._value == other._value

    def __hash__(self):
        return hash((self._n, self._value))

    def __repr__(self):
        if self._n <= 32:
            body = "".join(str(b) for b in self)
            return f"BitString('{body}')"
        return f"BitString(n={self._n}, hex='{self.hex()[:16]}...')"
