"""Empirical and exact checks of the generator's probabilistic guarantees.

Monte Carlo audits draw one seed per trial from a Philox generator whose
key is the audit's ``rng_seed`` and whose counter carries the trial
number, so trial ``i`` sees the same seed however the work is split.
Exact audits enumerate every seed and work in integer arithmetic.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from statistics import NormalDist

import numpy as np

from .errors import (BitsTooShort, InvalidParams, LengthMismatch,
                     NonPowerOfTwoLength, SeedSpaceTooLarge)
from .field import field_width
from .hadamard import fwht, is_pow2
from .pipeline import _pad_to, stage_signs, stage_subset, tail_rows
from .plan import JlPlan
from .sampler import iter_members
from .tape import BitString, all_coefficients, partition_bits, sign_matrix, sign_vector

CONFIDENCE = 0.99
HIST_BINS = 20
EXHAUSTIVE_CAP_BITS = 24
STREAM_PLAN = 0
STREAM_BASELINE = 1


def wilson_interval(failures: int, trials: int, confidence: float = CONFIDENCE) -> tuple[float, float]:
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    p = failures / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def _key(rng_seed) -> int:
    if isinstance(rng_seed, BitString):
        rng_seed = rng_seed.value
    elif isinstance(rng_seed, (bytes, bytearray)):
        rng_seed = int.from_bytes(rng_seed, "big")
    elif isinstance(rng_seed, str):
        rng_seed = int(rng_seed, 16) if rng_seed else 0
    return int(rng_seed) % (1 << 128)


def trial_rng(rng_seed, trial: int, stream: int = STREAM_PLAN) -> np.random.Generator:
    """Generator for one trial; counter word 3 is the trial, word 2 the stream."""
    return np.random.Generator(np.random.Philox(key=_key(rng_seed), counter=[0, 0, stream, trial]))


def baseline_matrix(s: int, n: int, seed: BitString) -> np.ndarray:
    """``s x n`` i.i.d. sign matrix read row-major from the seed; bit 1 is -1."""
    if seed.length < s * n:
        raise BitsTooShort(f"baseline needs {s * n} bits, got {seed.length}")
    bits = np.unpackbits(np.frombuffer(seed.to_bytes(), dtype=np.uint8))[: s * n]
    return (1.0 - 2.0 * bits).reshape(s, n)


def baseline_apply(s: int, seed: BitString, w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    return w @ baseline_matrix(s, w.shape[-1], seed).T / math.sqrt(s)


@dataclass
class AuditReport:
    params: dict
    vector: str
    trials: int
    failures: int
    failure_rate: float
    ci: tuple[float, float]
    histogram_edges: list[float]
    histogram: list[int]
    linf_exceed_rate: float | None
    baseline_failures: int
    baseline_failure_rate: float
    baseline_ci: tuple[float, float]
    wall_time: float = field(default=0.0, compare=False)

    @property
    def ci_width(self) -> float:
        return self.ci[1] - self.ci[0]

    def passes(self) -> bool:
        """Upper Wilson bound at or below delta."""
        return self.ci[1] <= self.params["delta"]

    def near_baseline(self, widths: float = 3.0) -> bool:
        width = max(self.ci_width, self.baseline_ci[1] - self.baseline_ci[0])
        return abs(self.failure_rate - self.baseline_failure_rate) <= widths * width

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("wall_time")
        d["ci"] = list(self.ci)
        d["baseline_ci"] = list(self.baseline_ci)
        d["passed"] = self.passes()
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def histogram_csv(self) -> str:
        lines = ["lower,upper,count"]
        edges = self.histogram_edges
        for lo, hi, c in zip(edges[:-1], edges[1:], self.histogram):
            lines.append(f"{lo!r},{hi!r},{c}")
        return "\n".join(lines) + "\n"


def plan_summary(plan: JlPlan) -> dict:
    return {"n": plan.n_input, "N": plan.N, "eps": plan.eps, "delta": plan.delta,
            "t": plan.t, "s_out": plan.s_out, "seed_length_bits": plan.seed_length_bits,
            "plan_sha256": plan.sha256()}


def _trial_outputs(plan: JlPlan, W: np.ndarray, bits: BitString):
    """Squared norms of ``G W^T`` columns, plus the first stage's linf values."""
    tape = partition_bits(plan.slice_lengths(), bits)
    v = _pad_to(W, plan.N)
    linf = None
    for spec in plan.stages:
        v = _pad_to(v, spec.n_stage)
        x = sign_vector(stage_signs(spec, tape))
        u = fwht(v * x)
        if linf is None:
            linf = np.abs(u).max(axis=1)
        v = spec.scale * u[:, stage_subset(spec, tape)]
    T = tail_rows(plan.tail, tape, 0, plan.s_out)
    out = v @ T.T / math.sqrt(plan.s_out)
    return np.einsum("ij,ij->i", out, out), linf


def corpus_audit(plan: JlPlan, vectors: dict, trials: int, rng_seed,
                 baseline: bool = True) -> dict[str, AuditReport]:
    """Audit several vectors against the same sequence of seeds."""
    if trials < 1000:
        raise InvalidParams("audits need at least 1000 trials for a meaningful interval")
    names = list(vectors)
    W = np.array([np.asarray(vectors[k], dtype=float) for k in names])
    if W.shape[1] != plan.n_input:
        raise LengthMismatch(f"vectors have length {W.shape[1]}, plan expects {plan.n_input}")
    W = W / np.linalg.norm(W, axis=1, keepdims=True)
    edges = [plan.eps * i / (HIST_BINS // 2) for i in range(HIST_BINS + 1)] + [math.inf]
    hist = np.zeros((len(names), len(edges) - 1), dtype=np.int64)
    fails = np.zeros(len(names), dtype=np.int64)
    bfails = np.zeros(len(names), dtype=np.int64)
    exceed = np.zeros(len(names), dtype=np.int64)
    threshold = plan.N ** (-3.0 / 8.0)
    nbytes = -(-plan.seed_length_bits // 8)
    nb = -(-plan.s_out * plan.n_input // 8)
    start = time.perf_counter()
    for i in range(trials):
        raw = trial_rng(rng_seed, i).bytes(nbytes)
        bits = BitString.from_bytes(raw).slice(0, plan.seed_length_bits)
        sq, linf = _trial_outputs(plan, W, bits)
        dev = np.abs(sq - 1.0)
        fails += dev > plan.eps
        hist[np.arange(len(names)), np.searchsorted(edges, dev, side="right") - 1] += 1
        if linf is not None:
            exceed += linf > threshold
        if baseline:
            A = baseline_matrix(plan.s_out, plan.n_input,
                                BitString.from_bytes(trial_rng(rng_seed, i, STREAM_BASELINE).bytes(nb)))
            b = W @ A.T / math.sqrt(plan.s_out)
            bfails += np.abs(np.einsum("ij,ij->i", b, b) - 1.0) > plan.eps
    elapsed = time.perf_counter() - start
    summary = plan_summary(plan)
    reports = {}
    for j, name in enumerate(names):
        reports[name] = AuditReport(
            params=summary, vector=name, trials=trials, failures=int(fails[j]),
            failure_rate=fails[j] / trials, ci=wilson_interval(int(fails[j]), trials),
            histogram_edges=edges, histogram=hist[j].tolist(),
            linf_exceed_rate=(exceed[j] / trials) if plan.stages else None,
            baseline_failures=int(bfails[j]), baseline_failure_rate=bfails[j] / trials,
            baseline_ci=wilson_interval(int(bfails[j]), trials), wall_time=elapsed,
        )
    return reports


def distortion_audit(plan: JlPlan, w, trials: int, rng_seed, name: str = "w") -> AuditReport:
    return corpus_audit(plan, {name: w}, trials, rng_seed)[name]


def regularity_bound(n: int, k: int, alpha: float) -> float:
    """``k^(k/2) / n^(alpha k - 1)``."""
    return k ** (k / 2) / n ** (alpha * k - 1)


def regularity_audit(n: int, k: int, w, alpha: float, exhaustive: bool | None = None,
                     samples: int = 100_000, rng: np.random.Generator | None = None) -> float:
    """Probability over a k-wise sign tape that ``||H D(x) w||_inf > n^-(1/2 - alpha)``."""
    if not is_pow2(n):
        raise NonPowerOfTwoLength(f"n must be a power of two, got {n}")
    w = np.asarray(w, dtype=float)
    w = w / np.linalg.norm(w)
    fw = field_width(n)
    threshold = n ** -(0.5 - alpha)
    if exhaustive is None:
        exhaustive = k * fw <= EXHAUSTIVE_CAP_BITS
    if exhaustive:
        coeffs = all_coefficients(k, fw)
    else:
        rng = np.random.default_rng(0) if rng is None else rng
        coeffs = rng.integers(0, 1 << fw, size=(samples, k))
    hits = 0
    for start in range(0, len(coeffs), 1 << 14):
        X = sign_matrix(coeffs[start:start + (1 << 14)], fw, n)
        hits += int(np.count_nonzero(np.abs(fwht(X * w)).max(axis=1) > threshold))
    return hits / len(coeffs)


def fourth_moment(w, k: int = 4) -> Fraction:
    """Exact mean of <w, x>^4 over every seed of a k-wise tape on ``len(w)`` signs."""
    w = [Fraction(v) for v in w]
    n = len(w)
    fw = field_width(n)
    den = math.lcm(*[v.denominator for v in w])
    z = np.array([int(v * den) for v in w], dtype=object)
    total = 0
    coeffs = all_coefficients(k, fw)
    for start in range(0, len(coeffs), 1 << 14):
        X = sign_matrix(coeffs[start:start + (1 << 14)], fw, n).astype(np.int64)
        dots = X.astype(object) @ z
        total += sum(int(d) ** 4 for d in dots)
    return Fraction(total, len(coeffs) * den ** 4)


@dataclass
class ExhaustiveReport:
    tapes: int
    stage_expectation: Fraction
    stage_failure_probability: Fraction
    stage_bound: float
    failure_probability: float


def _int_fwht(V: np.ndarray) -> np.ndarray:
    x = V.copy()
    n = x.shape[-1]
    h = 1
    lead = x.shape[:-1]
    while h < n:
        y = x.reshape(lead + (n // (2 * h), 2, h))
        a = y[..., 0, :].copy()
        y[..., 0, :] += y[..., 1, :]
        y[..., 1, :] *= -1
        y[..., 1, :] += a
        h *= 2
    return x


def _integer_vector(w) -> np.ndarray:
    vals = [Fraction(v) for v in w]
    den = math.lcm(*[v.denominator for v in vals])
    return np.array([int(v * den) for v in vals], dtype=np.int64)


def exhaustive_audit(plan: JlPlan, w) -> ExhaustiveReport:
    """Exact distribution of the distortion over every seed of a tiny plan.

    The stage chain is handled in integers: after stages of sizes
    ``s_0, ..., s_{t-1}`` the output is ``V / sqrt(prod s)`` for an
    integer vector ``V``. The tail is applied in floating point.
    """
    if plan.seed_length_bits > EXHAUSTIVE_CAP_BITS:
        raise SeedSpaceTooLarge(f"{plan.seed_length_bits} seed bits exceed {EXHAUSTIVE_CAP_BITS}")
    z = _integer_vector(w)
    if len(z) != plan.n_input:
        raise LengthMismatch(f"vector has length {len(z)}, plan expects {plan.n_input}")
    norm2 = int(z @ z)
    V = _pad_to(z[None, :], plan.N).astype(np.int64)
    denom = 1
    for spec in plan.stages:
        V = _pad_to(V, spec.n_stage).astype(np.int64)
        fw = field_width(spec.n_stage)
        X = sign_matrix(all_coefficients(spec.k, fw), fw, spec.n_stage).astype(np.int64)
        U = _int_fwht(V[:, None, :] * X[None, :, :]).reshape(-1, spec.n_stage)
        S = np.concatenate(list(iter_members(spec.family())))
        V = U[:, S].reshape(-1, spec.s_stage)
        denom *= spec.s_stage
    # rows of V are in seed order: stage-0 signs, stage-0 member, stage-1 signs, ...
    nums = np.einsum("ij,ij->i", V, V)
    scale = denom * norm2
    count = len(nums)
    expectation = Fraction(int(nums.astype(object).sum()), count * scale)
    t = plan.t
    eps_s = Fraction(plan.eps_stage)
    lo = (1 - eps_s) ** t * scale
    hi = (1 + eps_s) ** t * scale
    bad = int(np.count_nonzero((nums < math.ceil(lo)) | (nums > math.floor(hi)))) if t else 0
    stage_bound = sum(spec.delta + regularity_bound(spec.n_stage, spec.k, 1 / 8) for spec in plan.stages)
    # end to end: every tail seed against every stage outcome
    tail = plan.tail
    tw = field_width(tail.domain_size)
    Vf = V / math.sqrt(scale)
    tail_fail = 0
    tail_coeffs = all_coefficients(tail.k_cw, tw)
    for start in range(0, len(tail_coeffs), 256):
        T = sign_matrix(tail_coeffs[start:start + 256], tw, tail.domain_size)
        T = T.reshape(-1, tail.s_out, tail.m_in) / math.sqrt(tail.s_out)
        out = np.einsum("kij,mj->kmi", T, Vf)
        sq = np.einsum("kmi,kmi->km", out, out)
        tail_fail += int(np.count_nonzero(np.abs(sq - 1.0) > plan.eps))
    return ExhaustiveReport(
        tapes=count * len(tail_coeffs),
        stage_expectation=expectation,
        stage_failure_probability=Fraction(bad, count),
        stage_bound=stage_bound,
        failure_probability=tail_fail / (count * len(tail_coeffs)),
    )
