import re

import pytest

_results: dict = {}
_notes: dict = {}


@pytest.fixture
def note(request):
    """Attach a one-line measurement to the running acceptance criterion."""
    def add(text):
        _notes.setdefault(request.node.name, []).append(text)
    return add


def pytest_runtest_logreport(report):
    if "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if report.when == "call" or report.outcome != "passed":
        _results[name] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_results):
        m = re.match(r"test_criterion_(\d+)_(.*)", name)
        label = f"criterion {int(m.group(1)):2d} ({m.group(2)})" if m else name
        extra = "; ".join(_notes.get(name, []))
        terminalreporter.write_line(f"{_results[name]}  {label}" + (f"  [{extra}]" if extra else ""))
