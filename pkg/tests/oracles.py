"""Slow reference implementations for the test suite.

Nothing here imports ``explicit_jl``. Field arithmetic is a carry-less
product followed by polynomial long division, polynomials are evaluated
term by term, and matrices are built densely from their definitions.
"""
from __future__ import annotations

import math
from fractions import Fraction
from itertools import product

import numpy as np


def clmul(a: int, b: int) -> int:
    r = 0
    i = 0
    while b >> i:
        if (b >> i) & 1:
            r ^= a << i
        i += 1
    return r


def polymod(a: int, poly: int) -> int:
    d = poly.bit_length() - 1
    while a.bit_length() - 1 >= d:
        a ^= poly << (a.bit_length() - 1 - d)
    return a


def fmul(a: int, b: int, poly: int) -> int:
    return polymod(clmul(a, b), poly)


def fpow(a: int, e: int, poly: int) -> int:
    r = 1
    for _ in range(e):
        r = fmul(r, a, poly)
    return r


def fpow_fast(a: int, e: int, poly: int) -> int:
    r = 1
    while e:
        if e & 1:
            r = fmul(r, a, poly)
        a = fmul(a, a, poly)
        e >>= 1
    return r


def _prime_factors(m: int) -> list[int]:
    out, p = [], 2
    while p * p <= m:
        if m % p == 0:
            out.append(p)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        out.append(m)
    return out


def is_primitive(poly: int) -> bool:
    """``x`` generates the multiplicative group of GF(2)[x]/poly."""
    w = poly.bit_length() - 1
    order = (1 << w) - 1
    if w == 1:
        return poly == 0b11
    if fpow_fast(2, order, poly) != 1:
        return False
    return all(fpow_fast(2, order // p, poly) != 1 for p in _prime_factors(order))


def smallest_primitive(w: int) -> int:
    poly = (1 << w) | 1
    while not is_primitive(poly):
        poly += 2
    return poly


def poly_value(coeffs, x: int, poly: int) -> int:
    """``sum_i coeffs[i] * x**i`` with every power computed from scratch."""
    acc = 0
    for i, c in enumerate(coeffs):
        acc ^= fmul(c, fpow(x, i, poly), poly)
    return acc


def width(m: int) -> int:
    w = 1
    while (1 << w) < m:
        w += 1
    return w


def words(bitstring: str, w: int) -> list[int]:
    return [int(bitstring[i:i + w], 2) for i in range(0, len(bitstring), w)]


def signs(coeffs, m: int, poly: int) -> list[int]:
    return [-1 if poly_value(coeffs, j, poly) & 1 else 1 for j in range(m)]


def hadamard(n: int) -> np.ndarray:
    h = np.array([[1.0]])
    while h.shape[0] < n:
        h = np.kron(np.array([[1.0, 1.0], [1.0, -1.0]]), h)
    return h / math.sqrt(n)


def stage_matrix(n: int, subset, sign_list) -> np.ndarray:
    s = len(subset)
    hd = hadamard(n) @ np.diag(np.asarray(sign_list, dtype=float))
    return math.sqrt(n / s) * hd[list(subset), :]


def tail_matrix(s_out: int, m: int, sign_list) -> np.ndarray:
    return np.asarray(sign_list, dtype=float).reshape(s_out, m) / math.sqrt(s_out)


def embed_matrix(n: int, N: int) -> np.ndarray:
    return np.eye(N)[:, :n]


def pad_matrix(rows: int, cols: int) -> np.ndarray:
    out = np.zeros((rows, cols))
    k = min(rows, cols)
    out[:k, :k] = np.eye(k)
    return out


def kwise_counts(coeff_space, k: int, positions, poly: int) -> dict:
    """Joint sign pattern counts at ``positions`` over every coefficient tuple."""
    counts: dict = {}
    for coeffs in coeff_space:
        pat = tuple(-1 if poly_value(coeffs, j, poly) & 1 else 1 for j in positions)
        counts[pat] = counts.get(pat, 0) + 1
    return counts


def all_tuples(k: int, w: int):
    return product(range(1 << w), repeat=k)


def wilson(f: int, n: int, z: float) -> tuple[float, float]:
    p = f / n
    den = 1 + z * z / n
    mid = (p + z * z / (2 * n)) / den
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
    return mid - half, mid + half


def exact_mean(values) -> Fraction:
    values = [Fraction(v) for v in values]
    return sum(values, Fraction(0)) / len(values)


def dense_generator(plan, bitstring: str) -> np.ndarray:
    """The full ``s_out x n`` matrix of a plan, built from its definition.

    ``plan`` is read duck-typed (stage and tail sizes only); seed slices
    are taken in order stage 0 signs, stage 0 sampler, ..., tail signs.
    """
    pos = 0

    def take(nbits):
        nonlocal pos
        out = bitstring[pos:pos + nbits]
        pos += nbits
        return out

    G = embed_matrix(plan.n_input, plan.N)
    rows = plan.N
    for st in plan.stages:
        w = width(st.n_stage)
        poly = smallest_primitive(w)
        x = signs(words(take(st.k * w), w), st.n_stage, poly)
        coeffs = words(take(st.sampler_k * w), w)
        subset = [poly_value(coeffs, i, poly) for i in range(st.s_stage)]
        G = stage_matrix(st.n_stage, subset, x) @ pad_matrix(st.n_stage, rows) @ G
        rows = st.s_stage
    tail = plan.tail
    w = width(tail.s_out * tail.m_in)
    x = signs(words(take(tail.k_cw * w), w), tail.s_out * tail.m_in, smallest_primitive(w))
    assert pos == len(bitstring)
    return tail_matrix(tail.s_out, tail.m_in, x) @ pad_matrix(tail.m_in, rows) @ G
