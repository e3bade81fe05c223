import re

import pytest

_LINES = {}
_OUTCOMES = {}
_CRITERION = re.compile(r"test_criterion_(\d+)")


@pytest.fixture
def acceptance(request):
    """``acceptance(n, title, checks)`` with checks = [(label, ok, shown_value), ...].

    Records one summary line for criterion ``n`` and fails the test if any check failed.
    """

    def verdict(n, title, checks):
        ok = all(c[1] for c in checks)
        parts = "; ".join(f"{label} {'ok' if good else 'FAILED'} ({shown})" for label, good, shown in checks)
        line = f"criterion {n} [{title}]: {'PASS' if ok else 'FAIL'} | {parts}"
        _LINES[n] = line
        print(line)
        failed = [label for label, good, _ in checks if not good]
        assert not failed, f"criterion {n} failed: {failed}"

    return verdict


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if m and (report.when == "call" or report.outcome != "passed"):
        n = int(m.group(1))
        if report.outcome != "passed" or n not in _OUTCOMES:
            _OUTCOMES[n] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_OUTCOMES):
        line = _LINES.get(n, f"criterion {n}: FAIL | did not reach its checks ({_OUTCOMES[n]})")
        terminalreporter.write_line(line)
