import time
from collections import defaultdict

import pytest

from weighted_mt.constants import WeightParams, build_constants

_criteria = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    _criteria[mark.args[0]].append((item.name, rep.passed, rep.duration))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_criteria):
        parts = _criteria[n]
        ok = all(p for _, p, _ in parts)
        secs = sum(d for _, _, d in parts)
        failed = [name for name, p, _ in parts if not p]
        extra = f"  failing: {', '.join(failed)}" if failed else ""
        tr.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  ({secs:.2f} s){extra}")


@pytest.fixture
def timer():
    start = time.perf_counter()
    return lambda: time.perf_counter() - start


def _bundle(alpha, beta, sigma=None, **kw):
    p = WeightParams(alpha, beta, sigma)
    return p, build_constants(p, **kw)


@pytest.fixture
def bundle():
    """Factory: (alpha, beta[, sigma]) -> (params, constants)."""
    return _bundle


@pytest.fixture
def flat():
    """alpha = beta = 0."""
    return _bundle(0.0, 0.0)
