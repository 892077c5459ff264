import pytest
from hypothesis import settings

from pliable.construct import construct_family

# fixed seed, no example database: every run draws the same cases
settings.register_profile("pliable", derandomize=True, database=None, deadline=None, max_examples=1000)
settings.load_profile("pliable")


@pytest.fixture(scope="session")
def fam3():
    return construct_family(3)


@pytest.fixture(scope="session")
def fam4():
    return construct_family(4)


@pytest.fixture(scope="session")
def fam5():
    return construct_family(5)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
