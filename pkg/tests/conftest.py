from pathlib import Path

import pytest

from bicomm import load_graph

DATA = Path(__file__).parent / "data"
F1_PATH = DATA / "f1.txt"


@pytest.fixture
def f1_path():
    return F1_PATH


@pytest.fixture
def f1():
    return load_graph(F1_PATH)


def gid(graph, token):
    return graph.vid(token)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
