import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import TOY
from explicit_jl.access import NeumaierSum, Workspace, entry, stage_entry, tail_entry
from explicit_jl.errors import IndexOutOfRange
from explicit_jl.pipeline import MatrixHandle, as_tape
from explicit_jl.plan import StageSpec, plan_build
from explicit_jl.tape import BitString, partition_bits


@pytest.mark.parametrize("fixture", ["tail_plan", "toy_plan", "deep_plan", "tiny_plan"])
def test_every_entry_matches_dense_oracle(fixture, request, rng):
    plan = request.getfixturevalue(fixture)
    bits = BitString.random(plan.seed_length_bits, rng)
    G = oracles.dense_generator(plan, str(bits))
    tape = as_tape(plan, bits)
    unit = 1 / math.sqrt(plan.s_out * math.prod(st_.s_stage for st_ in plan.stages))
    rows = range(plan.s_out) if plan.t < 2 else range(0, plan.s_out, 7)
    for i in rows:
        for j in range(plan.n_input):
            got = entry(plan, tape, i, j)
            assert abs(got - G[i, j]) <= 1e-10 * max(abs(G[i, j]), unit)
            # entries sit on the lattice unit * Z
            assert abs(got / unit - round(got / unit)) < 1e-6


def test_stage_entry_n8(rng):
    spec = StageSpec(index=0, n_in=8, n_stage=8, k=4, s_stage=4, sampler_k=3,
                     range_bound=8 ** 0.25, eps=0.5, delta=0.5)
    bits = BitString.random(spec.sign_bits + spec.sampler_bits, rng)
    tape = partition_bits([(spec.sign_slice, spec.sign_bits),
                           (spec.sampler_slice, spec.sampler_bits)], bits)
    poly = oracles.smallest_primitive(3)
    s = str(bits)
    x = oracles.signs(oracles.words(s[:12], 3), 8, poly)
    subset = [oracles.poly_value(oracles.words(s[12:], 3), i, poly) for i in range(4)]
    A = oracles.stage_matrix(8, subset, x)
    got = np.array([[stage_entry(spec, tape, r, j) for j in range(8)] for r in range(4)])
    assert np.allclose(got, A, rtol=0, atol=1e-15)
    with pytest.raises(IndexOutOfRange):
        stage_entry(spec, tape, 4, 0)


def test_tail_only_entries_are_signs(tail_plan, rng):
    tape = as_tape(tail_plan, BitString.random(tail_plan.seed_length_bits, rng))
    mag = 1 / math.sqrt(tail_plan.s_out)
    for i, j in [(0, 0), (3, 39), (tail_plan.s_out - 1, 17)]:
        assert abs(entry(tail_plan, tape, i, j)) == mag
        assert entry(tail_plan, tape, i, j) == tail_entry(tail_plan, tape, i, j)


def test_workspace_grows_with_stages_only():
    peaks = []
    for n in (64, 256):
        plan = plan_build(n, 0.9, 0.25, TOY)
        tape = as_tape(plan, BitString.zeros(plan.seed_length_bits))
        ws = Workspace()
        entry(plan, tape, 1, n - 1, ws)
        assert ws.live == 0
        peaks.append((plan.t, ws.peak))
    assert all(peak == 2 * t + 3 for t, peak in peaks)


@pytest.mark.parametrize("i, j", [(-1, 0), (0, -1), (10 ** 6, 0), (0, 64)])
def test_out_of_range(toy_plan, i, j):
    tape = as_tape(toy_plan, BitString.zeros(toy_plan.seed_length_bits))
    with pytest.raises(IndexOutOfRange):
        entry(toy_plan, tape, i, j)
    with pytest.raises(IndexError):
        MatrixHandle(toy_plan, tape).entry(i, j)


def test_handle_entry(toy_plan, rng):
    bits = BitString.random(toy_plan.seed_length_bits, rng)
    h = MatrixHandle(toy_plan, bits)
    D = h.dense()
    assert h.entry(2, 5) == pytest.approx(D[2, 5], rel=1e-10)


@settings(max_examples=30)
@given(st.integers(0, 2 ** 64 - 1), st.integers(0, 10 ** 6), st.integers(0, 10 ** 6))
def test_spot_checks_at_n_1024(seed, i, j):
    plan = plan_build(1024, 0.9, 0.25)
    bits = BitString(seed % (1 << plan.seed_length_bits), plan.seed_length_bits)
    h = MatrixHandle(plan, bits)
    i, j = i % plan.s_out, j % plan.n_input
    e = np.zeros(plan.n_input)
    e[j] = 1.0
    col = h.apply(e)
    assert entry(plan, h.tape, i, j) == pytest.approx(col[i], rel=1e-10, abs=1e-13)


def test_neumaier_recovers_cancelled_terms():
    acc = NeumaierSum()
    for x in (1.0, 1e100, 1.0, -1e100):
        acc.add(x)
    assert acc.value == 2.0
    assert sum((1.0, 1e100, 1.0, -1e100)) == 0.0
