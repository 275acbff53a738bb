import pytest

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title, budget): acceptance criterion with a time budget in seconds")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title, budget = mark.args
    if rep.when == "call" or rep.failed:
        prev = _CRITERIA.get(number)
        failed = rep.failed or (prev is not None and prev[2] == "FAIL")
        _CRITERIA[number] = (title, budget, "FAIL" if failed else "PASS", rep.duration if rep.when == "call" else 0.0)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, budget, status, secs = _CRITERIA[number]
        limit = f" / {budget:g}s" if budget else ""
        terminalreporter.write_line(f"criterion {number}: {status}  {title}  ({secs:.2f}s{limit})")
