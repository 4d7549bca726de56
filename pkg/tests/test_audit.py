import json
import math
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

import oracles
from explicit_jl.audit import (HIST_BINS, baseline_apply, baseline_matrix, corpus_audit,
                               distortion_audit, exhaustive_audit, fourth_moment,
                               regularity_audit, regularity_bound, trial_rng, wilson_interval)
from explicit_jl.corpus import vector_corpus
from explicit_jl.errors import InvalidParams, NonPowerOfTwoLength, SeedSpaceTooLarge
from explicit_jl.plan import plan_build
from explicit_jl.tape import BitString


@pytest.mark.parametrize("f, n", [(0, 1000), (3, 1000), (50, 10_000), (1000, 1000), (7, 31)])
def test_wilson_matches_oracle(f, n):
    lo, hi = oracles.wilson(f, n, 2.5758293035489004)
    got = wilson_interval(f, n)
    assert got[0] == pytest.approx(max(0.0, lo), abs=1e-12)
    assert got[1] == pytest.approx(min(1.0, hi), abs=1e-12)


def test_baseline_enumeration_s1_n2():
    w = np.array([1.0, 1.0]) / math.sqrt(2)
    sq = [float(np.sum(baseline_apply(1, BitString(v, 2), w) ** 2)) for v in range(4)]
    assert sorted(sq) == pytest.approx([0.0, 0.0, 2.0, 2.0])


def test_baseline_matrix_reads_rows_first():
    A = baseline_matrix(2, 3, BitString.from_str("101100"))
    assert A.tolist() == [[-1, 1, -1], [-1, 1, 1]]


def test_trial_streams_are_independent_of_chunking():
    a = trial_rng("00ff", 7).bytes(16)
    assert a == trial_rng(0xFF, 7).bytes(16)
    assert a != trial_rng("00ff", 8).bytes(16)
    assert a != trial_rng("00ff", 7, stream=1).bytes(16)


@pytest.fixture(scope="module")
def reports():
    plan = plan_build(64, 0.5, 0.2)
    return plan, corpus_audit(plan, vector_corpus(64), 1000, "c0ffee")


class TestCorpusAudit:
    def test_shape_and_mass(self, reports):
        plan, reps = reports
        assert set(reps) == set(vector_corpus(64))
        for r in reps.values():
            assert sum(r.histogram) == r.trials == 1000
            assert len(r.histogram) == HIST_BINS + 1
            assert r.ci[0] <= r.failure_rate <= r.ci[1]
            assert r.failures == sum(r.histogram[HIST_BINS // 2:])

    def test_reproducible(self, reports):
        plan, reps = reports
        again = corpus_audit(plan, {"uniform": vector_corpus(64)["uniform"]}, 1000, "c0ffee")
        assert again["uniform"].to_json() == reps["uniform"].to_json()
        single = distortion_audit(plan, vector_corpus(64)["uniform"], 1000, "c0ffee", "uniform")
        assert single == reps["uniform"]

    def test_report_serialises(self, reports):
        _, reps = reports
        doc = json.loads(reps["basis_first"].to_json())
        assert "wall_time" not in doc and doc["passed"] == reps["basis_first"].passes()
        assert reps["basis_first"].histogram_csv().startswith("lower,upper,count\n")

    def test_too_few_trials(self):
        with pytest.raises(InvalidParams):
            corpus_audit(plan_build(16, 0.5, 0.2), vector_corpus(16), 999, 1)


class TestRegularity:
    def test_basis_vectors_never_exceed(self):
        for j in range(8):
            e = np.zeros(8)
            e[j] = 1.0
            assert regularity_audit(8, 2, e, 1 / 8) == 0.0

    def test_matches_direct_enumeration(self):
        w = np.array([3.0, 1.0, 0.0, 0.0, 2.0, 0.0, 0.0, 1.0])
        u = w / np.linalg.norm(w)
        poly = oracles.smallest_primitive(3)
        H = oracles.hadamard(8)
        thr = 8 ** -(0.5 - 0.125)
        hits = sum(np.abs(H @ (np.array(oracles.signs(c, 8, poly)) * u)).max() > thr
                   for c in oracles.all_tuples(2, 3))
        assert regularity_audit(8, 2, w, 0.125) == hits / 64

    def test_rate_falls_as_alpha_grows(self):
        w = vector_corpus(16)["two_point"]
        rates = [regularity_audit(16, 2, w, a) for a in (0.05, 0.125, 0.25, 0.5)]
        assert all(a >= b for a, b in zip(rates, rates[1:]))
        assert rates[-1] == 0.0

    def test_bound(self):
        assert regularity_bound(8, 2, 1 / 8) == 2 / 8 ** (-0.75)
        assert regularity_bound(2 ** 40, 16, 1 / 8) == 2.0 ** -8

    def test_rejects_bad_length(self):
        with pytest.raises(NonPowerOfTwoLength):
            regularity_audit(12, 2, np.ones(12), 0.1)


def test_fourth_moment_uniform():
    w = [Fraction(1, 2)] * 4
    assert fourth_moment(w) == 3 - 2 * 4 * Fraction(1, 16)


@pytest.fixture(scope="module")
def report(tiny_plan):
    return exhaustive_audit(tiny_plan, vector_corpus(8)["two_point"])


class TestExhaustive:
    def test_expectation_is_exact(self, report, tiny_plan):
        assert report.stage_expectation == 1
        assert report.tapes == 2 ** tiny_plan.seed_length_bits
        assert 0 <= report.stage_failure_probability <= 1

    def test_agrees_with_monte_carlo(self, report, tiny_plan):
        mc = distortion_audit(tiny_plan, vector_corpus(8)["two_point"], 4000, 99)
        lo, hi = wilson_interval(mc.failures, mc.trials, 0.999)
        assert lo <= report.failure_probability <= hi

    def test_stage_failure_by_enumeration(self, tiny_plan):
        # independent count of stage outcomes outside (1 +- eps_stage)
        plan = tiny_plan
        (spec,) = plan.stages
        w = np.array([1.0, 1.0, 0, 0, 0, 0, 0, 0])
        w /= np.linalg.norm(w)
        poly = oracles.smallest_primitive(3)
        bad = total = 0
        for sc in oracles.all_tuples(spec.k, 3):
            x = oracles.signs(sc, 8, poly)
            for mc in oracles.all_tuples(spec.sampler_k, 3):
                S = [oracles.poly_value(mc, i, poly) for i in range(spec.s_stage)]
                v = oracles.stage_matrix(8, S, x) @ w
                bad += abs(v @ v - 1) > plan.eps_stage + 1e-12
                total += 1
        rep = exhaustive_audit(plan, [1, 1, 0, 0, 0, 0, 0, 0])
        assert rep.stage_failure_probability == Fraction(bad, total)

    def test_cap(self):
        with pytest.raises(SeedSpaceTooLarge):
            exhaustive_audit(plan_build(64, 0.5, 0.2), np.ones(64))
