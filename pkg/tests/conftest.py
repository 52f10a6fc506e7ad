import pytest

_CRITERIA = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by the test")


@pytest.fixture
def detail(request):
    """Free-text summary a criterion test can fill in for the final report."""
    lines = []
    request.node._criterion_detail = lines
    return lines


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    number, title = marker.args
    lines = getattr(item, "_criterion_detail", [])
    _CRITERIA.append((number, title, report.passed, "; ".join(lines)))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, text in sorted(_CRITERIA):
        status = "PASS" if passed else "FAIL"
        line = f"[{status}] {number:>2}. {title}"
        terminalreporter.write_line(line + (f" -- {text}" if text else ""))
    n_pass = sum(p for _, _, p, _ in _CRITERIA)
    terminalreporter.write_line(f"{n_pass}/{len(_CRITERIA)} acceptance criteria met")
