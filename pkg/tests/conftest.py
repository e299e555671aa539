import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_criteria: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None or (call.when != "call" and call.excinfo is None):
        return
    num, title = mark.args
    entry = _criteria.setdefault(num, {"title": title, "ok": True, "notes": []})
    if call.excinfo is not None and not call.excinfo.errisinstance(pytest.skip.Exception):
        entry["ok"] = False
        entry["notes"].append(f"{item.name} failed")
    for key, value in item.user_properties:
        if key == "detail":
            entry["notes"].append(str(value))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        e = _criteria[num]
        status = "PASS" if e["ok"] else "FAIL"
        terminalreporter.write_line(f"criterion {num}: {status}  {e['title']}")
        for note in e["notes"]:
            terminalreporter.write_line(f"    {note}")
