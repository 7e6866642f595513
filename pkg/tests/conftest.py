from fractions import Fraction

import pytest

from ptpm.patterns import accel, blowup, gear, running_example, running_example_word
from ptpm.polyhedron import ConvexPoly, DisjPoly, VarSpace

MATCH_VARS = ("p1", "p2", "t", "t_prime")

# The three disjuncts printed for the running example, plus the parameter domain.
PRINTED_DISJUNCTS = (
    ("1.7 < t < 2.8 - p1", "4.9 <= t_prime < 5.3", "p2 > 1.2", "p1 >= 0"),
    ("2.8 < t < 3.7 - p1", "5.3 <= t_prime < 6", "p2 > 1.2", "p1 >= 0"),
    ("3.7 < t < 4.9 - p1", "t_prime >= 6", "p2 > 0.7", "p1 >= 0"),
)


def Q(text) -> Fraction:
    return Fraction(str(text))


def poly(space: VarSpace, *constraints: str) -> ConvexPoly:
    return ConvexPoly.from_strings(space, list(constraints))


def union(space: VarSpace, *disjuncts) -> DisjPoly:
    return DisjPoly(space, [poly(space, *d) for d in disjuncts])


@pytest.fixture
def fig_pattern():
    return running_example()


@pytest.fixture
def fig_word():
    return running_example_word()


@pytest.fixture
def printed_match_set():
    return union(VarSpace(MATCH_VARS), *PRINTED_DISJUNCTS)


@pytest.fixture(params=["running", "gear", "accel", "blowup"])
def any_pattern(request):
    return {"running": running_example, "gear": gear, "accel": accel, "blowup": blowup}[request.param]()


# acceptance summary ----------------------------------------------------------

_CRITERIA: dict[int, tuple[str, bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call" and not report.failed:
        return
    number, title = marker.args
    ok = report.passed and _CRITERIA.get(number, (title, True))[1]
    _CRITERIA[number] = (title, ok)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")
