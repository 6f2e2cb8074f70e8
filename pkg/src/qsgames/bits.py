"""Fixed-width bit strings.

A BitString is an immutable (value, width) pair.  Bit 0 is the most
significant bit; hex serialization is lowercase, most-significant bit
first, padded to a whole number of nibbles.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class BitString:
    value: int
    width: int

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError("width must be positive")
        if not 0 <= self.value < (1 << self.width):
            raise ValueError(f"value {self.value} does not fit in {self.width} bits")

    def __xor__(self, other: "BitString") -> "BitString":
        if self.width != other.width:
            raise ValueError(f"xor width mismatch: {self.width} != {other.width}")
        return BitString(self.value ^ other.value, self.width)

    def __invert__(self) -> "BitString":
        return BitString(self.value ^ ((1 << self.width) - 1), self.width)

    def bit(self, i: int) -> int:
        """Bit at position i, counting from the most significant bit."""
        if not 0 <= i < self.width:
            raise IndexError(i)
        return (self.value >> (self.width - 1 - i)) & 1

    def concat(self, other: "BitString") -> "BitString":
        return BitString((self.value << other.width) | other.value, self.width + other.width)

    def split(self, left_width: int) -> tuple["BitString", "BitString"]:
        """Split into (first left_width bits, remainder)."""
        if not 0 < left_width < self.width:
            raise ValueError("split width out of range")
        right_width = self.width - left_width
        return (
            BitString(self.value >> right_width, left_width),
            BitString(self.value & ((1 << right_width) - 1), right_width),
        )

    def take(self, n: int) -> "BitString":
        """First n bits (most significant end)."""
        if not 0 < n <= self.width:
            raise ValueError("take width out of range")
        return BitString(self.value >> (self.width - n), n)

    def drop(self, n: int) -> "BitString":
        """All but the first n bits."""
        if not 0 <= n < self.width:
            raise ValueError("drop width out of range")
        w = self.width - n
        return BitString(self.value & ((1 << w) - 1), w)

    def to_hex(self) -> str:
        nibbles = (self.width + 3) // 4
        return format(self.value, f"0{nibbles}x")

    @classmethod
    def from_hex(cls, hexstr: str, width: int) -> "BitString":
        return cls(int(hexstr, 16), width)

    @classmethod
    def zeros(cls, width: int) -> "BitString":
        return cls(0, width)

    @classmethod
    def ones(cls, width: int) -> "BitString":
        return cls((1 << width) - 1, width)

    def to_json(self) -> dict:
        return {"hex": self.to_hex(), "bits": self.width}

    @classmethod
    def from_json(cls, obj: dict) -> "BitString":
        return cls.from_hex(obj["hex"], obj["bits"])

    def __str__(self) -> str:
        return format(self.value, f"0{self.width}b")


def parity(x: int) -> int:
    return bin(x).count("1") & 1
