"""Arithmetic in the binary fields GF(2^w).

Elements are integers in ``[0, 2^w)`` read as polynomial-basis coordinates:
bit ``i`` is the coefficient of ``x^i``. Each width uses the numerically
smallest primitive polynomial of that degree, listed below with the
``x^w`` term included.
"""
from __future__ import annotations

from collections import OrderedDict
from functools import lru_cache
from typing import Sequence

import numpy as np

PRIMITIVE_POLYS = {
    1: 0x3,
    2: 0x7,
    3: 0xb,
    4: 0x13,
    5: 0x25,
    6: 0x43,
    7: 0x83,
    8: 0x11d,
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
    13: 0x201b,
    14: 0x402b,
    15: 0x8003,
    16: 0x1002d,
    17: 0x20009,
    18: 0x40027,
    19: 0x80027,
    20: 0x100009,
    21: 0x200005,
    22: 0x400003,
    23: 0x800021,
    24: 0x100001b,
    25: 0x2000009,
    26: 0x4000047,
    27: 0x8000027,
    28: 0x10000009,
    29: 0x20000005,
    30: 0x40000053,
    31: 0x80000009,
    32: 0x1000000af,
    33: 0x200000053,
    34: 0x4000000e7,
    35: 0x800000005,
    36: 0x1000000077,
    37: 0x200000003f,
    38: 0x4000000063,
    39: 0x8000000011,
    40: 0x10000000039,
    41: 0x20000000009,
    42: 0x4000000003f,
    43: 0x80000000059,
    44: 0x100000000065,
    45: 0x20000000001b,
    46: 0x40000000012f,
    47: 0x800000000021,
    48: 0x10000000000b7,
    49: 0x2000000000071,
    50: 0x400000000001d,
    51: 0x800000000004b,
    52: 0x10000000000009,
    53: 0x20000000000047,
    54: 0x4000000000007d,
    55: 0x80000000000047,
    56: 0x100000000000095,
    57: 0x20000000000002d,
    58: 0x400000000000063,
    59: 0x80000000000007b,
    60: 0x1000000000000003,
    61: 0x2000000000000027,
    62: 0x4000000000000069,
    63: 0x8000000000000003,
    64: 0x1000000000000001b,
}

MAX_WIDTH = 64
# widths with log/antilog tables; wider fields fall back to shift-and-add
TABLE_WIDTH = 20


def field_width(m: int) -> int:
    """Smallest ``w >= 1`` with ``2**w >= m``."""
    if m < 1:
        raise ValueError(f"domain size must be positive, got {m}")
    return max(1, (m - 1).bit_length())


def _check_width(w: int) -> int:
    if not 1 <= w <= MAX_WIDTH:
        raise ValueError(f"field width must be in [1, {MAX_WIDTH}], got {w}")
    return PRIMITIVE_POLYS[w]


def _mul_slow(a: int, b: int, w: int) -> int:
    poly = _check_width(w)
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if (a >> w) & 1:
            a ^= poly
    return r


@lru_cache(maxsize=None)
def _tables(w: int) -> tuple[np.ndarray, np.ndarray]:
    # log[0] is a sentinel pointing into a zero tail of exp, so products
    # with zero need no masking
    order = (1 << w) - 1
    poly = _check_width(w)
    block = 1 << ((w + 1) // 2)
    low = np.empty(block, dtype=np.uint64)
    x = 1
    for i in range(block):
        low[i] = x
        x = _mul_slow(x, 2, w)
    step = x
    nhigh = -(-order // block)
    high = np.empty(nhigh, dtype=np.uint64)
    x = 1
    for i in range(nhigh):
        high[i] = x
        x = _mul_slow(x, step, w)
    powers = _mul_bitserial(
        np.repeat(high, block), np.tile(low, nhigh), w, poly
    )[:order]
    sentinel = 2 * order
    exp = np.zeros(4 * order + 1, dtype=np.int64)
    exp[:order] = powers
    exp[order:2 * order] = powers
    log = np.empty(order + 1, dtype=np.int64)
    log[powers.astype(np.int64)] = np.arange(order, dtype=np.int64)
    log[0] = sentinel
    return log, exp


@lru_cache(maxsize=None)
def _scalar_tables(w: int) -> tuple[list[int], list[int]]:
    log, exp = _tables(w)
    return log.tolist(), exp.tolist()


def _mul_bitserial(a: np.ndarray, b: np.ndarray, w: int, poly: int) -> np.ndarray:
    a = np.array(a, dtype=np.uint64)
    b = np.asarray(b, dtype=np.uint64)
    a, b = np.broadcast_arrays(a, b)
    a = a.copy()
    r = np.zeros(a.shape, dtype=np.uint64)
    one = np.uint64(1)
    top = np.uint64(w)
    p = np.uint64(poly & ((1 << 64) - 1))
    for i in range(w):
        r ^= np.where((b >> np.uint64(i)) & one, a, np.uint64(0))
        a <<= one
        if w < 64:
            a ^= np.where((a >> top) & one, p, np.uint64(0))
    return r


def gf_mul(a: int, b: int, w: int) -> int:
    """Product of two elements of GF(2^w)."""
    if w <= TABLE_WIDTH:
        log, exp = _scalar_tables(w)
        return exp[log[a] + log[b]]
    return _mul_slow(a, b, w)


def gf_mul_array(a, b, w: int) -> np.ndarray:
    """Elementwise product of two broadcastable integer arrays."""
    if w <= TABLE_WIDTH:
        log, exp = _tables(w)
        return exp[log[np.asarray(a, dtype=np.int64)] + log[np.asarray(b, dtype=np.int64)]]
    if w >= MAX_WIDTH:
        raise ValueError("vectorised arithmetic supports widths below 64")
    return _mul_bitserial(a, b, w, PRIMITIVE_POLYS[w])


def poly_eval(coeffs: Sequence[int], x: int, w: int) -> int:
    """Horner evaluation at one point; ``coeffs[0]`` is the constant term."""
    acc = 0
    if w <= TABLE_WIDTH:
        log, exp = _scalar_tables(w)
        lx = log[x]
        for c in reversed(coeffs):
            acc = exp[log[acc] + lx] ^ c
        return acc
    for c in reversed(coeffs):
        acc = _mul_slow(acc, x, w) ^ c
    return acc


def poly_eval_array(coeffs, xs, w: int) -> np.ndarray:
    """Evaluate polynomials at many points.

    ``coeffs`` is either a flat sequence (one polynomial) or an array of
    shape ``(M, k)`` holding ``M`` polynomials; in the latter case the
    result has shape ``(M,) + xs.shape``.
    """
    coeffs = np.asarray(coeffs, dtype=np.int64 if w < 63 else np.uint64)
    xs = np.asarray(xs)
    batched = coeffs.ndim == 2
    if batched:
        cols = [coeffs[:, j].reshape((-1,) + (1,) * xs.ndim) for j in range(coeffs.shape[1])]
        shape = (coeffs.shape[0],) + xs.shape
    else:
        cols = list(coeffs)
        shape = xs.shape
    if w <= TABLE_WIDTH:
        log, exp = _tables(w)
        lx = log[xs.astype(np.int64)]
        acc = np.zeros(shape, dtype=np.int64)
        for c in reversed(cols):
            acc = exp[log[acc] + lx] ^ c
        return acc
    if w >= MAX_WIDTH:
        raise ValueError("vectorised arithmetic supports widths below 64")
    poly = PRIMITIVE_POLYS[w]
    x64 = xs.astype(np.uint64)
    acc = np.zeros(shape, dtype=np.uint64)
    for c in reversed(cols):
        acc = _mul_bitserial(acc, x64, w, poly) ^ np.asarray(c, dtype=np.uint64)
    return acc.astype(np.int64) if w < 63 else acc


def low_bit_mask(c: int, w: int) -> int:
    """Mask ``g`` with ``lowbit(c * y) == parity(g & y)`` for every ``y``."""
    g = 0
    for b in range(w):
        g |= (_mul_slow(c, 1 << b, w) & 1) << b
    return g


@lru_cache(maxsize=None)
def _mask_tables(w: int) -> np.ndarray:
    # the mask is GF(2)-linear in c: one 256-entry table per byte of c
    basis = [low_bit_mask(1 << a, w) for a in range(w)]
    nbytes = -(-w // 8)
    tables = np.zeros((nbytes, 256), dtype=np.int64)
    for j in range(nbytes):
        for byte in range(256):
            g = 0
            for a in range(8):
                if byte >> a & 1 and 8 * j + a < w:
                    g ^= basis[8 * j + a]
            tables[j, byte] = g
    return tables


def low_bit_masks(c: np.ndarray, w: int) -> np.ndarray:
    """``low_bit_mask`` applied elementwise to an integer array."""
    c = np.asarray(c, dtype=np.int64)
    out = np.zeros(c.shape, dtype=np.int64)
    for j, table in enumerate(_mask_tables(w)):
        out ^= table[(c >> (8 * j)) & 0xFF]
    return out


# seed-independent powers of the points 0..m-1, keyed by (w, k, m)
_POWER_CACHE: OrderedDict = OrderedDict()
# cells are stored as uint32 up to w = 32, so this is about 256 MB
POWER_CACHE_CELLS = 1 << 26


def _powers(w: int, k: int, xs: np.ndarray) -> list[np.ndarray]:
    pw = [None, xs]
    for i in range(2, k):
        half = pw[i // 2]
        sq = gf_mul_array(half, half, w).astype(np.int64)
        pw.append(sq if i % 2 == 0 else gf_mul_array(sq, xs, w).astype(np.int64))
    return pw[1:k]


def power_table(w: int, k: int, m: int) -> list[np.ndarray]:
    """Powers ``x**i`` for ``i = 1..k-1`` at ``x = 0..m-1``, cached when small."""
    key = (w, k, m)
    hit = _POWER_CACHE.get(key)
    if hit is not None:
        _POWER_CACHE.move_to_end(key)
        return hit
    table = _powers(w, k, np.arange(m, dtype=np.int64))
    if w <= 32:
        table = [p.astype(np.uint32) for p in table]
    if (k - 1) * m <= POWER_CACHE_CELLS:
        _POWER_CACHE[key] = table
        total = sum((kk - 1) * mm for (_, kk, mm) in _POWER_CACHE)
        while total > POWER_CACHE_CELLS:
            (_, kk, mm), _ = _POWER_CACHE.popitem(last=False)
            total -= (kk - 1) * mm
    return table


def low_bits(coeffs, w: int, start: int, stop: int, domain: int | None = None) -> np.ndarray:
    """Lowest bit of ``p(x)`` for every ``x`` in ``[start, stop)``.

    Equal to ``poly_eval_array(coeffs, arange(start, stop), w) & 1``. The
    low bit is GF(2)-linear in each term, so it reduces to the parity of
    masked powers of ``x``; those powers do not depend on the seed and are
    cached per ``domain`` (the full point range) when it is small enough.
    ``coeffs`` is one polynomial or an ``(M, k)`` batch.
    """
    coeffs = np.asarray(coeffs)
    if w >= 63:
        return poly_eval_array(coeffs, np.arange(start, stop), w) & 1
    batched = coeffs.ndim == 2
    rows = coeffs if batched else coeffs[None, :]
    k = rows.shape[1]
    rows = rows.astype(np.int64)
    masks = low_bit_masks(rows, w)
    if domain is not None and (k - 1) * domain <= POWER_CACHE_CELLS:
        pw = [p[start:stop] for p in power_table(w, k, domain)]
    else:
        pw = _powers(w, k, np.arange(start, stop, dtype=np.int64))
    acc = np.zeros((rows.shape[0], stop - start), dtype=np.int64)
    for i, p in enumerate(pw, start=1):
        acc ^= masks[:, i:i + 1] & p[None, :]
    bits = (np.bitwise_count(acc).astype(np.int64) + (masks[:, :1] & 1)) & 1
    return bits if batched else bits[0]
