from fractions import Fraction

import pytest
from hypothesis import settings

from secplf.ledger import begin_block
from secplf.scenario import bundled
from secplf.state import PriceMode

settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile("ci")


@pytest.fixture
def fig1():
    return bundled("fig1")


@pytest.fixture
def raw_state(fig1):
    return begin_block(fig1.state_for(PriceMode.RAW))


@pytest.fixture
def guarded_state(fig1):
    return begin_block(fig1.state_for(PriceMode.GUARDED))


def F(x) -> Fraction:
    return Fraction(x)


def pytest_terminal_summary(terminalreporter):
    from tests import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
