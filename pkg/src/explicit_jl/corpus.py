"""Fixed test inputs: vectors for distortion audits and functions for sampler audits.

Vectors are integer valued so that exact (rational) audits can use them
unchanged; audits normalise internally.
"""
from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources

import numpy as np

CORPUS_VERSION = 1


def _adversarial() -> dict[int, list[int]]:
    text = resources.files("explicit_jl").joinpath("data/adversarial.json").read_text()
    return {int(k): v for k, v in json.loads(text)["vectors"].items()}


def vector_corpus(n: int) -> dict[str, np.ndarray]:
    """Named unnormalised test vectors of length ``n``."""
    out = {}
    e0 = np.zeros(n, dtype=np.int64)
    e0[0] = 1
    out["basis_first"] = e0
    last = np.zeros(n, dtype=np.int64)
    last[-1] = 1
    out["basis_last"] = last
    if n >= 2:
        pair = np.zeros(n, dtype=np.int64)
        pair[:2] = 1
        out["two_point"] = pair
        far = np.zeros(n, dtype=np.int64)
        far[0] = 1
        far[n // 2] = -1
        out["two_point_far"] = far
    out["uniform"] = np.ones(n, dtype=np.int64)
    geo = np.zeros(n, dtype=np.int64)
    span = min(n, 24)
    geo[:span] = [1 << (span - 1 - j) for j in range(span)]
    out["geometric"] = geo
    rng = np.random.default_rng(20100412)
    out["rademacher"] = rng.choice(np.array([-1, 1]), size=n)
    adv = _adversarial().get(n)
    if adv is not None:
        out["hadamard_adversarial"] = np.asarray(adv, dtype=np.int64)
    return out


def function_corpus(n: int, B) -> dict[str, list[Fraction]]:
    """Named functions ``[n] -> [0, B]`` given as exact value lists."""
    B = Fraction(B)
    out = {
        "zero": [Fraction(0)] * n,
        "half": [B / 2] * n,
        "full": [B] * n,
        "indicator_first": [B if i == 0 else Fraction(0) for i in range(n)],
        "indicator_last": [B if i == n - 1 else Fraction(0) for i in range(n)],
        "ramp_up": [B * i / max(1, n - 1) for i in range(n)],
        "ramp_down": [B * (n - 1 - i) / max(1, n - 1) for i in range(n)],
        "two_point": [B if i in (0, n // 2) else Fraction(0) for i in range(n)],
        "two_point_adjacent": [B if i in (0, 1) else Fraction(0) for i in range(n)],
        "half_mass": [B if i < n // 2 else Fraction(0) for i in range(n)],
        "odd_mass": [B if i % 2 else Fraction(0) for i in range(n)],
    }
    return out
