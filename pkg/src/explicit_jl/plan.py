"""Parameter schedule for the explicit JL generator.

A plan fixes everything except the seed: the padded ambient dimension,
the number of Hadamard/sampling stages and their sizes, the independence
level of every sign tape, the final sign-matrix tail, and the exact slice
table of the seed.

Schedule rules, all deterministic:

* ``N = next_pow2(max(n, ceil(1/delta)))``; padding with zeros keeps
  ``delta >= 1/N``.
* With ``q = t + 1`` randomised components, every stage and the tail run
  at ``eps_stage = (1 + eps)**(1/q) - 1`` and ``delta_stage = delta / q``,
  so ``(1 +- eps_stage)**q`` stays inside ``[1 - eps, 1 + eps]``.
* Stage ``i`` maps ``n_i`` (a power of two) to
  ``s_i = ceil(c_samp * sqrt(n_i) * ln(1/delta_stage) / eps_stage**2)``
  coordinates and is kept only if ``s_i <= n_i / 2``; the next stage
  works on ``n_{i+1} = next_pow2(s_i)``.
* ``t`` is the largest stage count meeting that rule and the cap
  ``max(1, floor(log2(log2 N / (8 log2 log2 N))))``.
* ``k_i = 2**i * k0`` with ``k0 = 16 (c + 1)`` made even, clipped to the
  largest even integer below ``n_i**(1/8)`` and never below 4.
* The tail is an ``s_out x m`` sign matrix with
  ``s_out = ceil(c_cw_dim * ln(1/delta_stage) / eps_stage**2)`` and
  ``ceil(c_cw_indep * ln(1/delta_stage))``-wise independent entries.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field

from .errors import DegenerateRequest, InvalidParams
from .field import field_width
from .hadamard import next_pow2
from .sampler import SubsetFamily, family_build
from .tape import sign_bits

PLAN_FORMAT = "explicit-jl-plan/1"
MAX_STAGES = 64


@dataclass(frozen=True)
class Constants:
    c: float = 1.0
    c_samp: float = 2.0
    c_k: float = 2.0
    c_cw_dim: float = 4.0
    c_cw_indep: float = 4.0
    # seed_length_bits <= c_r * log2(N/delta) * log2(log2(N/delta)/eps)
    c_r: float = 12.0
    k_schedule: str = "geometric"
    stage_cap: str = "loglog"

    def __post_init__(self):
        for name in ("c", "c_samp", "c_k", "c_cw_dim", "c_cw_indep", "c_r"):
            if not getattr(self, name) > 0:
                raise InvalidParams(f"constant {name} must be positive")
        if self.k_schedule not in ("geometric", "literal"):
            raise InvalidParams(f"unknown k schedule {self.k_schedule!r}")
        if self.stage_cap not in ("loglog", "none"):
            raise InvalidParams(f"unknown stage cap {self.stage_cap!r}")


@dataclass(frozen=True)
class StageSpec:
    index: int
    n_in: int
    n_stage: int
    k: int
    s_stage: int
    sampler_k: int
    range_bound: float
    eps: float
    delta: float

    @property
    def sign_slice(self) -> str:
        return f"stage{self.index}.signs"

    @property
    def sampler_slice(self) -> str:
        return f"stage{self.index}.sampler"

    @property
    def sign_bits(self) -> int:
        return sign_bits(self.k, self.n_stage)

    @property
    def sampler_bits(self) -> int:
        return self.sampler_k * field_width(self.n_stage)

    @property
    def scale(self) -> float:
        return math.sqrt(self.n_stage / self.s_stage)

    def family(self) -> SubsetFamily:
        return SubsetFamily(self.n_stage, self.s_stage, self.range_bound, self.eps,
                            self.delta, self.sampler_k, field_width(self.n_stage))


@dataclass(frozen=True)
class TailSpec:
    m_in: int
    s_out: int
    k_cw: int

    sign_slice = "tail.signs"

    @property
    def domain_size(self) -> int:
        return self.s_out * self.m_in

    @property
    def sign_bits(self) -> int:
        return sign_bits(self.k_cw, self.domain_size)


@dataclass(frozen=True)
class JlPlan:
    n_input: int
    N: int
    eps: float
    delta: float
    t: int
    stages: tuple[StageSpec, ...]
    tail: TailSpec
    constants: Constants
    eps_stage: float
    delta_stage: float
    c_effective: float
    k0: int
    t_cap: int
    seed_length_bits: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "seed_length_bits",
                           sum(length for _, length in self.slice_lengths()))

    @property
    def m(self) -> int:
        return self.tail.m_in

    @property
    def s_out(self) -> int:
        return self.tail.s_out

    def dims(self) -> list[int]:
        """Padded stage dimensions ``n_0, ..., n_{t-1}``."""
        return [st.n_stage for st in self.stages]

    def slice_lengths(self) -> list[tuple[str, int]]:
        out = []
        for st in self.stages:
            out.append((st.sign_slice, st.sign_bits))
            out.append((st.sampler_slice, st.sampler_bits))
        out.append((self.tail.sign_slice, self.tail.sign_bits))
        return out

    def seed_bound(self) -> float:
        return seed_length_bound(self.N, self.eps, self.delta, self.constants.c_r)

    def to_dict(self) -> dict:
        d = {
            "format": PLAN_FORMAT,
            "n_input": self.n_input,
            "N": self.N,
            "eps": self.eps,
            "delta": self.delta,
            "t": self.t,
            "t_cap": self.t_cap,
            "k0": self.k0,
            "c_effective": self.c_effective,
            "eps_stage": self.eps_stage,
            "delta_stage": self.delta_stage,
            "m": self.m,
            "s_out": self.s_out,
            "seed_length_bits": self.seed_length_bits,
            "seed_length_bound": self.seed_bound(),
            "constants": asdict(self.constants),
            "stages": [asdict(st) for st in self.stages],
            "tail": asdict(self.tail),
        }
        pos = 0
        table = []
        for name, length in self.slice_lengths():
            table.append({"slice": name, "offset": pos, "length": length})
            pos += length
        d["slices"] = table
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def sha256(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()

    @classmethod
    def from_dict(cls, d: dict) -> "JlPlan":
        if d.get("format") != PLAN_FORMAT:
            raise InvalidParams(f"not a plan document (format {d.get('format')!r})")
        plan = cls(
            n_input=d["n_input"], N=d["N"], eps=d["eps"], delta=d["delta"], t=d["t"],
            stages=tuple(StageSpec(**st) for st in d["stages"]),
            tail=TailSpec(**d["tail"]),
            constants=Constants(**d["constants"]),
            eps_stage=d["eps_stage"], delta_stage=d["delta_stage"],
            c_effective=d["c_effective"], k0=d["k0"], t_cap=d["t_cap"],
        )
        if plan.seed_length_bits != d["seed_length_bits"]:
            raise InvalidParams("plan document is internally inconsistent")
        return plan

    @classmethod
    def from_json(cls, text: str) -> "JlPlan":
        return cls.from_dict(json.loads(text))


def seed_length_bound(N: int, eps: float, delta: float, c_r: float) -> float:
    L = math.log2(N / delta)
    return c_r * L * math.log2(L / eps)


def padded_dimension(n: int, delta: float) -> int:
    return next_pow2(max(n, math.ceil(round(1.0 / delta, 9))))


def loglog_stage_cap(N: int) -> int:
    """``t`` with ``2**t = log N / (8 log log N)``, floored, at least 1."""
    L = math.log2(N)
    if L <= 1:
        return 1
    ratio = L / (8 * math.log2(L))
    return max(1, math.floor(math.log2(ratio)))


def _even_up(x: float) -> int:
    k = math.ceil(x)
    return k + (k & 1)


def stage_independence(i: int, n_stage: int, k0: int, schedule: str = "geometric") -> int:
    if schedule == "geometric":
        k = (1 << i) * k0
    else:
        k = k0 if i == 0 else (1 << (i - 1)) * k0
    root = n_stage ** 0.125
    cap = math.ceil(root) - 1
    cap -= cap & 1
    return max(4, min(k, cap))


def _try_stages(N: int, t: int, eps_s: float, delta_s: float, k0: int,
                consts: Constants) -> list[StageSpec] | None:
    stages = []
    n_in = N
    n_cur = N
    for i in range(t):
        try:
            fam = family_build(n_cur, n_cur ** 0.25, eps_s, delta_s, consts.c_samp, consts.c_k)
        except DegenerateRequest:
            return None
        if 2 * fam.s > n_cur:
            return None
        stages.append(StageSpec(
            index=i, n_in=n_in, n_stage=n_cur,
            k=stage_independence(i, n_cur, k0, consts.k_schedule),
            s_stage=fam.s, sampler_k=fam.k, range_bound=fam.range_bound,
            eps=eps_s, delta=delta_s,
        ))
        n_in = fam.s
        n_cur = next_pow2(fam.s)
    return stages


def plan_build(n: int, eps: float, delta: float, consts: Constants | None = None) -> JlPlan:
    consts = Constants() if consts is None else consts
    if not isinstance(n, int) or n < 1:
        raise InvalidParams(f"n must be a positive integer, got {n!r}")
    if not 0 < eps < 1:
        raise InvalidParams(f"eps must lie in (0, 1), got {eps}")
    if not 0 < delta < 1:
        raise InvalidParams(f"delta must lie in (0, 1), got {delta}")
    N = padded_dimension(n, delta)
    c_eff = max(consts.c, math.log(1.0 / delta) / math.log(N))
    k0 = _even_up(16 * (c_eff + 1))
    t_cap = loglog_stage_cap(N) if consts.stage_cap == "loglog" else MAX_STAGES
    for t in range(t_cap, -1, -1):
        q = t + 1
        eps_s = (1.0 + eps) ** (1.0 / q) - 1.0
        delta_s = delta / q
        stages = _try_stages(N, t, eps_s, delta_s, k0, consts)
        if stages is not None:
            break
    m = stages[-1].s_stage if stages else N
    s_out = math.ceil(consts.c_cw_dim * math.log(1.0 / delta_s) / eps_s ** 2)
    k_cw = max(2, math.ceil(consts.c_cw_indep * math.log(1.0 / delta_s)))
    return JlPlan(
        n_input=n, N=N, eps=eps, delta=delta, t=len(stages), stages=tuple(stages),
        tail=TailSpec(m_in=m, s_out=s_out, k_cw=k_cw), constants=consts,
        eps_stage=eps_s, delta_stage=delta_s, c_effective=c_eff, k0=k0, t_cap=t_cap,
    )
