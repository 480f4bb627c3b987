import pytest
from hypothesis import settings

from puremix.extension import unit_interval
from puremix.construction import build_pure_mixing
from puremix.spaces import circle, theta

settings.register_profile("puremix", deadline=None, max_examples=60)
settings.load_profile("puremix")


# builds are shared: each one costs seconds
@pytest.fixture(scope="session")
def interval_build():
    return build_pure_mixing(unit_interval(), N=3)


@pytest.fixture(scope="session")
def circle_build():
    return build_pure_mixing(circle(), N=2)


@pytest.fixture(scope="session")
def theta_build():
    return build_pure_mixing(theta(), N=2)


@pytest.fixture(scope="session")
def interval_build4():
    return build_pure_mixing(unit_interval(), N=4, check=False)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
