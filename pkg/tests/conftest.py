import pytest

from markov_dyck.builders import (
    FamilyIIIParams,
    FamilyIIParams,
    FamilyIParams,
    build_family_I,
    build_family_II,
    build_family_III,
    dyck_graph,
)
from markov_dyck.graph_core import contracting_forest


def corpus():
    """The shared test graphs, keyed by short name."""
    return {
        "D2": dyck_graph(2),
        "D3": dyck_graph(3),
        "Fib": build_family_I(FamilyIParams({1: 1, 2: 1})),
        "G21": build_family_III(FamilyIIIParams(2, 1)),
        "G22": build_family_III(FamilyIIIParams(2, 2)),
        "G32": build_family_III(FamilyIIIParams(3, 2)),
        "II_R1_Q2": build_family_II(FamilyIIParams(1, {2: 1})),
    }


CORPUS = corpus()
SMALL = ["D2", "Fib", "G21", "G32", "II_R1_Q2"]


@pytest.fixture(params=sorted(CORPUS))
def named_graph(request):
    g = CORPUS[request.param]
    return request.param, g, contracting_forest(g)


@pytest.fixture
def d2():
    return CORPUS["D2"]


@pytest.fixture
def g21():
    return CORPUS["G21"]


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS):
            terminalreporter.write_line(line)
