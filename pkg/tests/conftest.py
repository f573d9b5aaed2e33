import time

import pytest

_RESULTS = {}
_OUTCOMES = {}


class Criterion:
    def __init__(self, label, limit):
        self.label = label
        self.limit = limit
        self.notes = []
        self.elapsed = 0.0

    def note(self, text):
        self.notes.append(text)


@pytest.fixture
def criterion(request):
    """Time an acceptance criterion and record one summary line for it."""
    marker = request.node.get_closest_marker("criterion")
    label, limit = marker.args
    c = Criterion(label, limit)
    start = time.perf_counter()
    yield c
    c.elapsed = time.perf_counter() - start
    _RESULTS[request.node.nodeid] = c


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" and item.get_closest_marker("criterion"):
        _OUTCOMES[item.nodeid] = report.passed


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label, limit): an acceptance criterion")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, passed in _OUTCOMES.items():
        c = _RESULTS.get(nodeid)
        if c is None:
            terminalreporter.write_line(f"FAIL {nodeid}")
            continue
        timing = f"{c.elapsed:.1f}s" + (f" (limit {c.limit}s)" if c.limit else "")
        extra = "; ".join(c.notes)
        line = f"{'PASS' if passed else 'FAIL'} {c.label}: {timing}"
        terminalreporter.write_line(line + (f"; {extra}" if extra else ""))
