import json

import pytest
from hypothesis import settings

from lame_accessory.catalog import find_entry, load_catalog
from lame_accessory.precision import PrecisionContext

settings.register_profile("default", deadline=None, max_examples=25)
settings.load_profile("default")


@pytest.fixture(scope="session")
def catalog():
    return load_catalog()


@pytest.fixture(scope="session")
def entry(catalog):
    def get(label, e=None):
        return find_entry(catalog, label, e)
    return get


@pytest.fixture
def ctx40():
    return PrecisionContext(digits=40)


@pytest.fixture
def curve_file(tmp_path, entry):
    def write(label, e=None):
        path = tmp_path / (label.replace("/", "_") + f"_{e}.json")
        path.write_text(json.dumps(entry(label, e).curve.to_json()), encoding="utf-8")
        return str(path)
    return write


# one summary line per acceptance criterion
_criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (report.when != "call" and not report.failed and not report.skipped):
        return
    number, text = mark.args
    state = _criteria.setdefault(number, {"text": text, "passed": 0, "failed": [], "skipped": 0})
    if report.failed:
        state["failed"].append(item.name)
    elif report.skipped:
        state["skipped"] += 1
    elif report.when == "call":
        state["passed"] += 1


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        s = _criteria[number]
        verdict = "FAIL" if s["failed"] else ("PASS" if s["passed"] else "SKIP")
        line = f"criterion {number}: {verdict}  {s['text']}"
        if s["failed"]:
            line += f"  (failed: {', '.join(s['failed'])})"
        terminalreporter.write_line(line)
