import time

import pytest
from hypothesis import settings

from condkin.verification import canned_run

settings.register_profile("condkin", deadline=None, max_examples=60)
settings.load_profile("condkin")

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def reference_run():
    """(RunConfig, Trajectory) of the default concentrated-data run."""
    return canned_run()


@pytest.fixture(scope="session")
def timed_reference_run():
    start = time.perf_counter()
    cfg, traj = canned_run()
    return cfg, traj, time.perf_counter() - start


@pytest.fixture
def criterion():
    def report(number, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
