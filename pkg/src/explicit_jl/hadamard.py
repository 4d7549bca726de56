"""Orthonormal fast Walsh-Hadamard transform in Sylvester order.

``H[a, b] = (-1)**popcount(a & b) / sqrt(n)``, so ``H`` is symmetric and
its own inverse.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NonPowerOfTwoLength, SignDomainTooSmall
from .tape import SignTape, sign_vector


def next_pow2(n: int) -> int:
    return 1 if n <= 1 else 1 << (n - 1).bit_length()


def is_pow2(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


@dataclass(frozen=True)
class PaddedVector:
    """A vector zero-extended to a power-of-two length."""

    data: np.ndarray
    logical_len: int

    @classmethod
    def pad(cls, v, length: int | None = None) -> "PaddedVector":
        v = np.asarray(v, dtype=float)
        n = v.shape[-1]
        size = next_pow2(n) if length is None else length
        if size < n or not is_pow2(size):
            raise NonPowerOfTwoLength(f"cannot pad length {n} to {size}")
        out = np.zeros(v.shape[:-1] + (size,))
        out[..., :n] = v
        return cls(out, n)

    def __len__(self) -> int:
        return self.data.shape[-1]


@dataclass
class OpCounter:
    additions: int = 0


BLOCK = 32


@lru_cache(maxsize=None)
def _sylvester(b: int) -> np.ndarray:
    h = np.ones((1, 1))
    while h.shape[0] < b:
        h = np.block([[h, h], [h, -h]])
    return h


def fwht(v, counter: OpCounter | None = None) -> np.ndarray:
    """Return ``H @ v`` along the last axis; the input is left untouched."""
    if isinstance(v, PaddedVector):
        v = v.data
    x = np.array(v, dtype=float)
    n = x.shape[-1]
    if not is_pow2(n):
        raise NonPowerOfTwoLength(f"length {n} is not a power of two")
    lead = x.shape[:-1]
    # the lowest levels as one product with an unnormalised H_b: H_n = H_{n/b} (x) H_b
    b = min(BLOCK, n)
    x = (x.reshape(lead + (n // b, b)) @ _sylvester(b)).reshape(lead + (n,))
    if counter is not None:
        counter.additions += n * (b - 1)
    h = b
    while h < n:
        y = x.reshape(lead + (n // (2 * h), 2, h))
        a = y[..., 0, :].copy()
        b = y[..., 1, :]
        y[..., 0, :] += b
        b *= -1
        b += a
        h *= 2
        if counter is not None:
            counter.additions += n
    x *= 1.0 / np.sqrt(n)
    return x


def hadamard_entry(a: int, b: int, n: int) -> float:
    return (-1.0 if bin(a & b).count("1") & 1 else 1.0) / np.sqrt(n)


def hadamard_matrix(n: int) -> np.ndarray:
    """Dense ``H_n`` from the closed form, for oracles and small checks."""
    if not is_pow2(n):
        raise NonPowerOfTwoLength(f"length {n} is not a power of two")
    idx = np.arange(n)
    parity = np.zeros((n, n), dtype=np.int64)
    anded = idx[:, None] & idx[None, :]
    while anded.any():
        parity ^= anded & 1
        anded >>= 1
    return (1.0 - 2.0 * parity) / np.sqrt(n)


def regularize(v, signs) -> np.ndarray:
    """``H @ D(x) @ v`` for a sign tape (or explicit sign array) ``x``."""
    if isinstance(v, PaddedVector):
        v = v.data
    v = np.asarray(v, dtype=float)
    n = v.shape[-1]
    if isinstance(signs, SignTape):
        if signs.domain_size < n:
            raise SignDomainTooSmall(f"sign tape covers {signs.domain_size} < {n} positions")
        x = sign_vector(signs)[:n]
    else:
        x = np.asarray(signs, dtype=float)
        if x.shape[-1] < n:
            raise SignDomainTooSmall(f"{x.shape[-1]} signs for {n} positions")
        x = x[..., :n]
    return fwht(v * x)
