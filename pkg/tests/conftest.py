import pytest

from crosshom.catalog import default_catalog, group_from_label

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.fixture(scope="session")
def catalog():
    return default_catalog()


def G(label):
    return group_from_label(label)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when != "call" and not report.failed:
        return
    n = mark.args[0]
    detail = dict(report.user_properties).get("detail", "")
    if report.failed:
        _CRITERIA[n] = ("FAIL", detail or f"{report.when} error")
    elif n not in _CRITERIA or _CRITERIA[n][0] != "FAIL":
        _CRITERIA[n] = ("PASS", detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        verdict, detail = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:>2}: {verdict}  {detail}")
