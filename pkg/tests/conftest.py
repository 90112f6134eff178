import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tvdiam import datasets  # noqa: E402

ACCEPTANCE = {}


@pytest.fixture(scope="session")
def asia():
    return datasets.asia()


@pytest.fixture(scope="session")
def growth():
    return datasets.growth()


@pytest.fixture(scope="session")
def csi():
    return datasets.csi_example()


def pytest_runtest_logreport(report):
    # a criterion passes only if every test tagged with it passes
    if report.when == "call" or report.outcome != "passed":
        for key, value in report.user_properties:
            if key == "criterion":
                ok = report.outcome == "passed"
                ACCEPTANCE[value] = ACCEPTANCE.get(value, True) and ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    from test_acceptance import CRITERIA

    terminalreporter.section("acceptance criteria")
    for number, title in CRITERIA.items():
        if number in ACCEPTANCE:
            status = "PASS" if ACCEPTANCE[number] else "FAIL"
            terminalreporter.write_line(f"[{status}] criterion {number}: {title}")
        else:
            terminalreporter.write_line(f"[SKIP] criterion {number}: {title} (not run)")


@pytest.fixture(autouse=True)
def _criterion_tag(request):
    marker = request.node.get_closest_marker("acceptance")
    if marker is not None and marker.args:
        request.node.user_properties.append(("criterion", marker.args[0]))
