import pytest

_results: list[tuple[int, str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        n, text = marker.args
        callspec = getattr(item, "callspec", None)
        if callspec is not None:
            text = f"{text} [{callspec.id}]"
        _results.append((n, text, "PASS" if rep.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n, text, status in sorted(_results):
        terminalreporter.write_line(f"[{status}] criterion {n}: {text}")
