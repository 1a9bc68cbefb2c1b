import pytest

_RESULTS = {}


@pytest.fixture
def criterion(request):
    """Record the outcome of an acceptance criterion: ``criterion(number, title)``."""
    marks = {}

    def register(number, title):
        marks["key"] = (number, title)

    yield register
    if "key" in marks:
        rep = getattr(request.node, "rep_call", None)
        ok = rep is not None and rep.passed
        number, title = marks["key"]
        prev = _RESULTS.get(number, (title, True))
        _RESULTS[number] = (title, prev[1] and ok)


@pytest.hookimpl(wrapper=True, tryfirst=True)
def pytest_runtest_makereport(item, call):
    rep = yield
    if rep.when == "call":
        item.rep_call = rep
    return rep


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, ok = _RESULTS[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {number:2d}  {title}")
