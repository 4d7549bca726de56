"""Single entries of ``G(y)`` without materialising any stage.

``G[row, col]`` is expanded as a sum over every chain of intermediate
indices ``(i_t, ..., i_1)`` of ``T[row, i_t] A_{t-1}[i_t, i_{t-1}] ...
A_0[i_1, col]``. Each factor is computed in closed form from the seed:
Hadamard entries from the parity of ``a & b``, signs and sampled indices
by evaluating one polynomial at one point. Working memory is one counter
and one partial product per stage plus a compensated accumulator; the
polynomial coefficients are read from the seed and not counted.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import IndexOutOfRange
from .field import field_width, poly_eval
from .plan import JlPlan, StageSpec
from .tape import SeedTape


class NeumaierSum:
    """Running sum with Neumaier's compensation term."""

    def __init__(self):
        self.total = 0.0
        self.comp = 0.0

    def add(self, x: float) -> None:
        t = self.total + x
        if abs(self.total) >= abs(x):
            self.comp += (self.total - t) + x
        else:
            self.comp += (x - t) + self.total
        self.total = t

    @property
    def value(self) -> float:
        return self.total + self.comp


@dataclass
class Workspace:
    """Tally of scalar cells held at once by an entry computation."""

    live: int = 0
    peak: int = 0

    def alloc(self, cells: int) -> None:
        self.live += cells
        self.peak = max(self.peak, self.live)

    def free(self, cells: int) -> None:
        self.live -= cells


class _StageReader:
    # coefficient words decoded from the seed; these are seed bits, not workspace
    def __init__(self, spec: StageSpec, tape: SeedTape):
        self.w = field_width(spec.n_stage)
        self.signs = tuple(tape.slice(spec.sign_slice).words(self.w))
        self.sampler = tuple(tape.slice(spec.sampler_slice).words(self.w))
        self.scale = math.sqrt(spec.n_stage / spec.s_stage) / math.sqrt(spec.n_stage)
        self.spec = spec

    def value(self, r: int, j: int) -> float:
        a = poly_eval(self.sampler, r, self.w)
        x = poly_eval(self.signs, j, self.w) & 1
        return -self.scale if (bin(a & j).count("1") + x) & 1 else self.scale


def stage_entry(spec: StageSpec, tape: SeedTape, r: int, j: int) -> float:
    """Entry ``(r, j)`` of ``sqrt(n/s) P_S H D(x)``."""
    if not 0 <= r < spec.s_stage or not 0 <= j < spec.n_stage:
        raise IndexOutOfRange(f"({r}, {j}) outside a {spec.s_stage} x {spec.n_stage} stage")
    return _StageReader(spec, tape).value(r, j)


def tail_entry(plan: JlPlan, tape: SeedTape, r: int, j: int) -> float:
    tail = plan.tail
    w = field_width(tail.domain_size)
    coeffs = tape.slice(tail.sign_slice).words(w)
    bit = poly_eval(coeffs, r * tail.m_in + j, w) & 1
    return (-1.0 if bit else 1.0) / math.sqrt(tail.s_out)


def entry(plan: JlPlan, tape: SeedTape, row: int, col: int,
          workspace: Workspace | None = None) -> float:
    if not 0 <= row < plan.s_out or not 0 <= col < plan.n_input:
        raise IndexOutOfRange(f"({row}, {col}) outside a {plan.s_out} x {plan.n_input} matrix")
    ws = Workspace() if workspace is None else workspace
    t = plan.t
    tail = plan.tail
    tw = field_width(tail.domain_size)
    tcoef = tuple(tape.slice(tail.sign_slice).words(tw))
    tscale = 1.0 / math.sqrt(tail.s_out)

    def tail_factor(j: int) -> float:
        return -tscale if poly_eval(tcoef, row * tail.m_in + j, tw) & 1 else tscale

    if t == 0:
        ws.alloc(1)
        val = tail_factor(col)
        ws.free(1)
        return val

    # readers[d] is the stage applied at depth d: A_{t-1}, ..., A_0
    readers = [_StageReader(spec, tape) for spec in reversed(plan.stages)]
    sizes = [spec.s_stage for spec in reversed(plan.stages)]
    idx = [0] * t
    prefix = [0.0] * t
    acc = NeumaierSum()
    ws.alloc(2 * t + 3)

    def refresh(d: int) -> None:
        for e in range(d, t):
            f = tail_factor(idx[0]) if e == 0 else readers[e - 1].value(idx[e - 1], idx[e])
            prefix[e] = f if e == 0 else prefix[e - 1] * f
    refresh(0)
    last = readers[-1]
    while True:
        acc.add(prefix[-1] * last.value(idx[-1], col))
        d = t - 1
        while d >= 0:
            idx[d] += 1
            if idx[d] < sizes[d]:
                break
            idx[d] = 0
            d -= 1
        if d < 0:
            break
        refresh(d)
    ws.free(2 * t + 3)
    return acc.value
