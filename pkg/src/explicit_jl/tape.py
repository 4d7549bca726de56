"""Seed bookkeeping and k-wise independent sign vectors.

A seed is a plain bit string. Bits are ordered most-significant first
within each byte, so the hex seed ``"80"`` is the 8-bit string
``10000000``. A :class:`SeedTape` cuts the seed into named, disjoint
slices, one per randomised component of a plan.

Sign vectors come from a random polynomial of degree ``k - 1`` over
GF(2^w): position ``j`` gets the lowest bit of ``p(j)``, mapped
``0 -> +1`` and ``1 -> -1``. Over uniform coefficients the values at any
``k`` distinct points are independent and uniform, hence so are the signs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import BitsTooShort, IndexOutOfRange
from .field import field_width, low_bits, poly_eval


@dataclass(frozen=True)
class BitString:
    value: int
    length: int

    def __post_init__(self):
        if self.length < 0 or self.value < 0 or self.value >> self.length:
            raise ValueError("value does not fit in the stated length")

    @classmethod
    def from_bytes(cls, data: bytes) -> "BitString":
        return cls(int.from_bytes(data, "big"), 8 * len(data))

    @classmethod
    def from_hex(cls, text: str) -> "BitString":
        text = text.strip().lower()
        if text.startswith("0x"):
            text = text[2:]
        if len(text) % 2:
            raise ValueError("hex seed must have an even number of digits")
        return cls.from_bytes(bytes.fromhex(text))

    @classmethod
    def from_str(cls, text: str) -> "BitString":
        """From a literal such as ``"0110"``."""
        return cls(int(text, 2) if text else 0, len(text))

    @classmethod
    def zeros(cls, length: int) -> "BitString":
        return cls(0, length)

    @classmethod
    def random(cls, length: int, rng: np.random.Generator) -> "BitString":
        nbytes = -(-length // 8)
        raw = int.from_bytes(rng.bytes(nbytes), "big")
        return cls(raw >> (8 * nbytes - length), length)

    def __len__(self) -> int:
        return self.length

    def bit(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexOutOfRange(f"bit {i} outside [0, {self.length})")
        return (self.value >> (self.length - 1 - i)) & 1

    def slice(self, offset: int, length: int) -> "BitString":
        if offset < 0 or length < 0 or offset + length > self.length:
            raise BitsTooShort(
                f"slice [{offset}, {offset + length}) exceeds {self.length} bits"
            )
        shift = self.length - offset - length
        return BitString((self.value >> shift) & ((1 << length) - 1), length)

    def words(self, width: int) -> list[int]:
        """Consecutive ``width``-bit integers, first word first."""
        if self.length % width:
            raise ValueError(f"{self.length} bits do not split into {width}-bit words")
        n = self.length // width
        mask = (1 << width) - 1
        return [(self.value >> (width * (n - 1 - i))) & mask for i in range(n)]

    def to_bytes(self) -> bytes:
        """Left-aligned bytes, zero-padded at the end."""
        nbytes = -(-self.length // 8)
        return (self.value << (8 * nbytes - self.length)).to_bytes(nbytes, "big")

    def to_hex(self) -> str:
        return self.to_bytes().hex()

    def __str__(self) -> str:
        return format(self.value, f"0{self.length}b") if self.length else ""


@dataclass(frozen=True)
class SeedTape:
    """A seed together with the slice table that assigns its bits."""

    bits: BitString
    partition: tuple[tuple[str, int, int], ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pos = 0
        for name, offset, length in self.partition:
            if offset != pos or length < 0:
                raise ValueError(f"slice {name!r} is not contiguous with its predecessor")
            pos += length
        if pos != self.bits.length:
            raise ValueError("slices must cover the tape exactly")
        index = {name: (offset, length) for name, offset, length in self.partition}
        if len(index) != len(self.partition):
            raise ValueError("duplicate slice names")
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return self.bits.length

    def slice(self, name: str) -> BitString:
        offset, length = self._index[name]
        return self.bits.slice(offset, length)


def partition_bits(lengths: Iterable[tuple[str, int]], bits: BitString) -> SeedTape:
    """Lay the named slices end to end from the start of ``bits``."""
    table = []
    pos = 0
    for name, length in lengths:
        table.append((name, pos, length))
        pos += length
    if bits.length < pos:
        raise BitsTooShort(f"need {pos} seed bits, got {bits.length}")
    return SeedTape(bits.slice(0, pos), tuple(table))


def tape_partition(plan, bits: BitString) -> SeedTape:
    """Split ``bits`` according to ``plan.slice_lengths()``.

    Slice order is stage 0 signs, stage 0 sampler index, stage 1 signs,
    ..., tail signs. Bits beyond the plan's seed length are ignored.
    """
    return partition_bits(plan.slice_lengths(), bits)


@dataclass(frozen=True)
class SignTape:
    field_log_size: int
    coefficients: tuple[int, ...]
    domain_size: int

    def __post_init__(self):
        w = self.field_log_size
        if self.domain_size > (1 << w):
            raise ValueError("domain larger than the field")
        if any(not 0 <= c < (1 << w) for c in self.coefficients):
            raise ValueError("coefficient outside the field")

    @classmethod
    def from_bits(cls, bits: BitString, k: int, domain_size: int) -> "SignTape":
        w = field_width(domain_size)
        if bits.length != k * w:
            raise BitsTooShort(f"a {k}-wise tape over 2^{w} needs {k * w} bits, got {bits.length}")
        return cls(w, tuple(bits.words(w)), domain_size)

    @property
    def k(self) -> int:
        return len(self.coefficients)

    @property
    def seed_bits(self) -> int:
        return self.k * self.field_log_size


def sign_bits(k: int, domain_size: int) -> int:
    """Seed cost of a k-wise sign tape over ``domain_size`` positions."""
    return k * field_width(domain_size)


def sign_at(tape: SignTape, index: int) -> int:
    if not 0 <= index < tape.domain_size:
        raise IndexOutOfRange(f"sign index {index} outside [0, {tape.domain_size})")
    return 1 - 2 * (poly_eval(tape.coefficients, index, tape.field_log_size) & 1)


def sign_vector(tape: SignTape) -> np.ndarray:
    m = tape.domain_size
    return 1.0 - 2.0 * low_bits(tape.coefficients, tape.field_log_size, 0, m, m)


def sign_matrix(coeffs: Sequence[Sequence[int]], w: int, domain_size: int) -> np.ndarray:
    """Sign vectors for many coefficient tuples at once, one row each."""
    bits = low_bits(np.asarray(coeffs), w, 0, domain_size, domain_size)
    return 1.0 - 2.0 * bits


def all_coefficients(k: int, w: int) -> np.ndarray:
    """Every coefficient tuple of a k-wise tape over GF(2^w), in seed order."""
    q = 1 << w
    grid = np.indices((q,) * k).reshape(k, -1).T
    return grid.astype(np.int64)
