import pytest

from irsquant.config import SystemConfig

_criteria: dict[int, dict] = {}


@pytest.fixture
def config():
    return SystemConfig()


@pytest.fixture
def no_direct(config):
    return config.replace(direct_link=False)


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    number, title = marker
    entry = _criteria.setdefault(number, {"title": title, "failed": [], "ran": 0})
    if report.when == "call" or report.outcome == "failed":
        entry["ran"] += report.when == "call"
        if report.outcome == "failed":
            entry["failed"].append(report.nodeid.split("::")[-1])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        report.criterion = tuple(marker.args)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        status = "FAIL" if entry["failed"] else "PASS"
        line = f"criterion {number}: {status}  {entry['title']}"
        if entry["failed"]:
            line += f"  (failed: {', '.join(entry['failed'])})"
        terminalreporter.write_line(line)
