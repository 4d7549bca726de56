import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from explicit_jl.plan import Constants, plan_build

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

# small constants that make Hadamard stages appear at toy sizes
TOY = Constants(c_samp=0.1, c_k=0.5, c_cw_dim=1.0, c_cw_indep=1.0, stage_cap="none")
DEEP = Constants(c_samp=0.05, c_k=0.5, c_cw_dim=1.0, c_cw_indep=1.0, stage_cap="none")
# tiny enough that every tape can be enumerated
TINY = Constants(c_samp=0.05, c_k=0.5, c_cw_dim=0.25, c_cw_indep=0.3, stage_cap="none")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def toy_plan():
    plan = plan_build(64, 0.9, 0.25, TOY)
    assert plan.t == 1
    return plan


@pytest.fixture(scope="session")
def deep_plan():
    plan = plan_build(64, 0.9, 0.25, DEEP)
    assert plan.t == 2
    return plan


@pytest.fixture(scope="session")
def tail_plan():
    plan = plan_build(40, 0.5, 0.1)
    assert plan.t == 0
    return plan


@pytest.fixture(scope="session")
def tiny_plan():
    plan = plan_build(8, 0.9, 0.5, TINY)
    assert plan.t == 1 and plan.seed_length_bits <= 24
    return plan


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance")
        for tag in sorted(results):
            terminalreporter.write_line(results[tag])
