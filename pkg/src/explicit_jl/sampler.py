"""Explicit averaging sampler built from k-wise independent index sequences.

A family member is the sequence ``(p(0), p(1), ..., p(s-1))`` for a
polynomial ``p`` of degree ``k - 1`` over GF(n), ``n`` a power of two.
Members are multisets: an index may repeat. Every slot is exactly
uniform on ``[n]`` over a uniform member, and any ``k`` slots are
independent, which gives the averaging guarantee through the usual
limited-independence tail bounds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import (DegenerateRequest, FamilyTooLargeToEnumerate,
                     InvalidParams, LengthMismatch, NonPowerOfTwoLength,
                     RangeViolation)
from .field import field_width, poly_eval, poly_eval_array
from .hadamard import is_pow2
from .tape import BitString, all_coefficients

ENUMERATION_CAP_BITS = 24
C_SAMP = 2.0
C_K = 2.0


@dataclass(frozen=True)
class SubsetFamily:
    n: int
    s: int
    range_bound: float
    eps: float
    delta: float
    k: int
    field_log_size: int

    @property
    def index_bits(self) -> int:
        return self.k * self.field_log_size

    @property
    def size(self) -> int:
        return 1 << self.index_bits


def sample_size(B: float, eps: float, delta: float, c_samp: float = C_SAMP) -> int:
    return math.ceil(c_samp * B * B * math.log(1.0 / delta) / (eps * eps))


def sampler_independence(delta: float, c_k: float = C_K) -> int:
    return max(2, math.ceil(c_k * math.log(1.0 / delta)))


def family_build(n: int, B: float, eps: float, delta: float,
                 c_samp: float = C_SAMP, c_k: float = C_K) -> SubsetFamily:
    if n < 1 or B < 1 or not 0 < eps < 1 or not 0 < delta < 1:
        raise InvalidParams(f"need n >= 1, B >= 1, 0 < eps, delta < 1; got {n}, {B}, {eps}, {delta}")
    if not is_pow2(n):
        raise NonPowerOfTwoLength(f"sampler domain {n} must be a power of two")
    s = sample_size(B, eps, delta, c_samp)
    if s >= n:
        raise DegenerateRequest(f"sample size {s} is not below the domain size {n}")
    return SubsetFamily(n, s, float(B), eps, delta,
                        sampler_independence(delta, c_k), field_width(n))


def subset_at(family: SubsetFamily, index: BitString) -> np.ndarray:
    if index.length != family.index_bits:
        raise LengthMismatch(f"index must have {family.index_bits} bits, got {index.length}")
    coeffs = index.words(family.field_log_size)
    return poly_eval_array(coeffs, np.arange(family.s), family.field_log_size)


def member_at(family: SubsetFamily, slot: int, index: BitString) -> int:
    """Single slot of a member; constant working memory."""
    return poly_eval(index.words(family.field_log_size), slot, family.field_log_size)


def iter_members(family: SubsetFamily, chunk: int = 1 << 14):
    """Yield blocks of members (rows) in index order."""
    if family.index_bits > ENUMERATION_CAP_BITS:
        raise FamilyTooLargeToEnumerate(
            f"{family.index_bits} index bits exceed the cap of {ENUMERATION_CAP_BITS}")
    coeffs = all_coefficients(family.k, family.field_log_size)
    points = np.arange(family.s)
    for start in range(0, len(coeffs), chunk):
        yield poly_eval_array(coeffs[start:start + chunk], points, family.field_log_size)


def _values(family: SubsetFamily, f) -> list:
    vals = [f(i) for i in range(family.n)] if callable(f) else list(f)
    if len(vals) != family.n:
        raise LengthMismatch(f"f must have {family.n} values, got {len(vals)}")
    for v in vals:
        if not 0 <= v <= family.range_bound:
            raise RangeViolation(f"f value {v} outside [0, {family.range_bound}]")
    return vals


def sampler_audit(family: SubsetFamily, f: Callable[[int], float] | Sequence[float],
                  exhaustive: bool | None = None, samples: int = 100_000,
                  rng: np.random.Generator | None = None) -> float:
    """Fraction of members whose sample mean misses the true mean by more than eps.

    Enumerates the family when it is small enough (or when asked to);
    otherwise draws ``samples`` uniform members from ``rng``.
    """
    fv = np.asarray(_values(family, f), dtype=float)
    mean = fv.mean()
    if exhaustive is None:
        exhaustive = family.index_bits <= ENUMERATION_CAP_BITS
    bad = 0
    total = 0
    if exhaustive:
        for block in iter_members(family):
            dev = np.abs(fv[block].mean(axis=1) - mean)
            bad += int(np.count_nonzero(dev > family.eps))
            total += len(block)
        return bad / total
    rng = np.random.default_rng(0) if rng is None else rng
    q = 1 << family.field_log_size
    points = np.arange(family.s)
    for start in range(0, samples, 1 << 14):
        m = min(1 << 14, samples - start)
        coeffs = rng.integers(0, q, size=(m, family.k))
        block = poly_eval_array(coeffs, points, family.field_log_size)
        dev = np.abs(fv[block].mean(axis=1) - mean)
        bad += int(np.count_nonzero(dev > family.eps))
        total += m
    return bad / total


def family_mean(family: SubsetFamily, f) -> Fraction:
    """Exact average of the sample mean over every member."""
    vals = [Fraction(v) for v in _values(family, f)]
    counts = np.zeros(family.n, dtype=np.int64)
    for block in iter_members(family):
        counts += np.bincount(block.ravel(), minlength=family.n)
    total = sum(int(c) * v for c, v in zip(counts, vals))
    return total / (family.size * family.s)
