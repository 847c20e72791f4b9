import pytest

from gpeps.lattice import Graph, load_fixture


@pytest.fixture(scope="session")
def path8():
    return load_fixture("path8")


@pytest.fixture(scope="session")
def tree10():
    return load_fixture("tree10")


@pytest.fixture(scope="session")
def ring12():
    return load_fixture("ring12hex")


@pytest.fixture(scope="session")
def patch20():
    return load_fixture("patch20")


@pytest.fixture
def path4():
    return Graph(4, ((0, 1), (1, 2), (2, 3)))


@pytest.fixture
def pair():
    return Graph(2, ((0, 1),))


def pytest_terminal_summary(terminalreporter):
    from tests import acceptance_log

    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.LINES:
            terminalreporter.write_line(line)
