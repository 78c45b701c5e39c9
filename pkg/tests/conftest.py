import numpy as np
import pytest

from zerochain import build_hard_instance, build_schedule, make_class
from zerochain.model import ScheduleKind

Q_GRID = (0.01, 0.1, 0.25, 0.5)


def instance(kind, N, q=0.0, L=1.0, R=1.0, dim=None):
    params = make_class(q * L, L, R)
    return build_hard_instance(build_schedule(kind, N, params), dim=dim)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def sc_instance():
    return instance(ScheduleKind.EXACT_SC, 3, q=0.25)


@pytest.fixture
def muzero_instance():
    return instance(ScheduleKind.SIMPLE_MUZERO, 1)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.summary_line(n))
