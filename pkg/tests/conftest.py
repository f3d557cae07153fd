import functools
import time

import pytest

from regfair.audit import AuditConfig, audit_with_probs
from regfair.synthetic import ScenarioSpec, generate

ACCEPTANCE_SEEDS = (0, 1, 2, 3, 4)

# wall-clock seconds of each cached audit, keyed like scenario_result
AUDIT_SECONDS = {}
# (criterion number, PASS/FAIL line) filled by the acceptance module
ACCEPTANCE_LINES = []


@functools.lru_cache(maxsize=None)
def scenario_result(kind, seed=0, n=1000):
    t0 = time.perf_counter()
    ds = generate(ScenarioSpec(kind, n=n, seed=seed))
    result = audit_with_probs(ds, AuditConfig(seed=seed))
    AUDIT_SECONDS[(kind, seed, n)] = time.perf_counter() - t0
    return ds, result


@pytest.fixture(scope="session")
def scenario():
    """``scenario(kind, seed)`` -> (dataset, AuditResult), cached per session."""
    return scenario_result


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
