"""Applying the generated map ``G(y)`` to vectors.

``G(y) = T . A_{t-1} ... A_0 . pad`` where each stage is
``A_i = sqrt(n_i/s_i) P_S H D(x)`` and ``T`` is the ``s_out x m`` tail
sign matrix scaled by ``1/sqrt(s_out)``. Every function here accepts a
single vector or a stack of vectors along leading axes.
"""
from __future__ import annotations

from functools import cached_property

import numpy as np

from .errors import LengthMismatch
from .field import low_bits
from .hadamard import PaddedVector, fwht, regularize
from .plan import JlPlan, StageSpec, TailSpec
from .sampler import subset_at
from .tape import BitString, SeedTape, SignTape, sign_vector, tape_partition

# sign-matrix entries generated per block in the tail
TAIL_BLOCK = 1 << 21


def as_tape(plan: JlPlan, tape) -> SeedTape:
    if isinstance(tape, SeedTape):
        if len(tape) != plan.seed_length_bits:
            raise LengthMismatch(f"tape has {len(tape)} bits, plan needs {plan.seed_length_bits}")
        return tape
    if isinstance(tape, str):
        tape = BitString.from_hex(tape)
    return tape_partition(plan, tape)


def pad_input(w, plan: JlPlan) -> PaddedVector:
    w = np.asarray(w, dtype=float)
    if w.shape[-1] != plan.n_input:
        raise LengthMismatch(f"vector has length {w.shape[-1]}, plan expects {plan.n_input}")
    return PaddedVector.pad(w, plan.N)


def stage_signs(spec: StageSpec, tape: SeedTape) -> SignTape:
    return SignTape.from_bits(tape.slice(spec.sign_slice), spec.k, spec.n_stage)


def stage_subset(spec: StageSpec, tape: SeedTape) -> np.ndarray:
    return subset_at(spec.family(), tape.slice(spec.sampler_slice))


def tail_signs(tail: TailSpec, tape: SeedTape) -> SignTape:
    return SignTape.from_bits(tape.slice(tail.sign_slice), tail.k_cw, tail.domain_size)


def stage_apply(spec: StageSpec, tape: SeedTape, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != spec.n_stage:
        raise LengthMismatch(f"stage {spec.index} takes length {spec.n_stage}, got {v.shape[-1]}")
    u = regularize(v, stage_signs(spec, tape))
    return spec.scale * u[..., stage_subset(spec, tape)]


def tail_rows(tail: TailSpec, tape: SeedTape, start: int, stop: int) -> np.ndarray:
    """Rows ``start:stop`` of the unscaled +-1 tail matrix."""
    signs = tail_signs(tail, tape)
    bits = low_bits(signs.coefficients, signs.field_log_size, start * tail.m_in,
                    stop * tail.m_in, tail.domain_size)
    return (1.0 - 2.0 * bits).reshape(stop - start, tail.m_in)


def cw_apply(tail: TailSpec, tape: SeedTape, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != tail.m_in:
        raise LengthMismatch(f"tail takes length {tail.m_in}, got {v.shape[-1]}")
    out = np.empty(v.shape[:-1] + (tail.s_out,))
    step = max(1, TAIL_BLOCK // tail.m_in)
    for r0 in range(0, tail.s_out, step):
        r1 = min(tail.s_out, r0 + step)
        out[..., r0:r1] = v @ tail_rows(tail, tape, r0, r1).T
    return out / np.sqrt(tail.s_out)


def _pad_to(v: np.ndarray, n: int) -> np.ndarray:
    if v.shape[-1] == n:
        return v
    out = np.zeros(v.shape[:-1] + (n,))
    out[..., :v.shape[-1]] = v
    return out


def stages_apply(plan: JlPlan, tape: SeedTape, w) -> np.ndarray:
    """``A_{t-1} ... A_0`` applied to the padded input; the tail is skipped."""
    tape = as_tape(plan, tape)
    v = pad_input(w, plan).data
    for spec in plan.stages:
        v = stage_apply(spec, tape, _pad_to(v, spec.n_stage))
    return v


def generate_apply(plan: JlPlan, tape, w) -> np.ndarray:
    tape = as_tape(plan, tape)
    return cw_apply(plan.tail, tape, stages_apply(plan, tape, w))


class MatrixHandle:
    """A plan and a seed viewed as one concrete matrix.

    ``apply`` caches the stage signs, subsets and (when it fits in
    ``max_tail_cells``) the tail matrix, so repeated products are cheap.
    """

    def __init__(self, plan: JlPlan, seed, max_tail_cells: int = 1 << 24):
        self.plan = plan
        self.tape = as_tape(plan, seed)
        self.max_tail_cells = max_tail_cells

    @property
    def shape(self) -> tuple[int, int]:
        return self.plan.s_out, self.plan.n_input

    @cached_property
    def _stages(self):
        return [(sign_vector(stage_signs(sp, self.tape)), stage_subset(sp, self.tape))
                for sp in self.plan.stages]

    @cached_property
    def _tail(self):
        tail = self.plan.tail
        if tail.domain_size > self.max_tail_cells:
            return None
        return tail_rows(tail, self.tape, 0, tail.s_out) / np.sqrt(tail.s_out)

    def apply(self, w) -> np.ndarray:
        v = pad_input(w, self.plan).data
        for spec, (x, subset) in zip(self.plan.stages, self._stages):
            v = spec.scale * fwht(_pad_to(v, spec.n_stage) * x)[..., subset]
        if self._tail is None:
            return cw_apply(self.plan.tail, self.tape, v)
        return v @ self._tail.T

    def entry(self, i: int, j: int) -> float:
        from .access import entry
        return entry(self.plan, self.tape, i, j)

    def dense(self) -> np.ndarray:
        return self.apply(np.eye(self.plan.n_input)).T
