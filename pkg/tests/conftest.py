import json
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"

# one representative per catalogued family
FAMILY_SPECS = [
    "normal(mu=0,sigma=1)",
    "lattice(p=0.5)",
    "shiftexp(rate=1,shift=-1)",
    "cauchy(x0=0,gamma=1)",
    "pareto2(alpha_neg=1.5,alpha_pos=2.5,p_neg=0.5)",
]


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def thresholds():
    return json.loads((DATA / "thresholds.json").read_text())


# ---------------------------------------------------------------------------
# acceptance reporting: one pass/fail line per criterion in the terminal summary

_CRITERIA: dict = {}


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None or call.when != "call":
        return
    number, title = mark.args
    ok = call.excinfo is None
    prev = _CRITERIA.get(number, (title, True))
    _CRITERIA[number] = (title, prev[1] and ok)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}")
