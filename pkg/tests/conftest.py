"""Per-criterion pass/fail summary for the acceptance suite."""

import pytest

TITLES = {
    1: "kernel of the non-simplicial chart",
    2: "classical recovery: Hilbert basis and quadric relation",
    3: "class group of the quadric cone",
    4: "choice independence over all basis subfamilies",
    5: "completion cocycle",
    6: "simplicial reduction",
    7: "functoriality and glue compatibility",
    8: "Gale exactness and the non-exactness flag",
    9: "cone engine against the brute-force oracle",
    10: "band rank",
    11: "stabilizer distinction",
}

_results = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n = marker.args[0]
    if report.when == "call" or report.failed:
        ok = report.passed and _results.get(n, True)
        _results[n] = ok


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_results):
        status = "PASS" if _results[n] else "FAIL"
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {TITLES.get(n, '')}")
