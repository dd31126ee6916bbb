import re

import pytest

_CRITERION = re.compile(r"test_criterion_(\d+)_")
_results = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    n = int(m.group(1))
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        detail = ""
        if report.failed and report.longrepr is not None:
            detail = getattr(report.longrepr, "reprcrash", None)
            detail = detail.message.splitlines()[0] if detail else ""
        name = report.nodeid.split("::")[-1].split("[")[0]
        prev = _results.get(n)
        if prev is None or (prev[0] == "PASS" and not report.passed):
            _results[n] = ("PASS" if report.passed else "FAIL", name, detail)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_results):
        status, name, detail = _results[n]
        line = f"criterion {n:2d}: {status}  {name}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
    passed = sum(1 for s, _, _ in _results.values() if s == "PASS")
    terminalreporter.write_line(f"{passed}/{len(_results)} acceptance criteria passed")
