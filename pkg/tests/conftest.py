import random
from fractions import Fraction

import pytest

from knotoidal.algebra import DElement
from knotoidal.series import Caps, ScalarSeries

# pass/fail lines recorded by the acceptance module; echoed after the run so
# they survive pytest's output capture
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def caps14():
    return Caps(1, 4)


@pytest.fixture(scope="session")
def caps13():
    return Caps(1, 3)


def random_element(rng: random.Random, caps: Caps, max_degree: int = 4, terms: int = 3) -> DElement:
    out = DElement.zero(caps)
    for _ in range(terms):
        mon = tuple(rng.randint(0, 2) for _ in range(4))
        if sum(mon) > max_degree:
            continue
        coeff = ScalarSeries.term(
            caps,
            Fraction(rng.randint(-4, 4), rng.randint(1, 4)),
            rng.randint(0, caps.eps_order),
            rng.randint(0, min(2, caps.hbar_order)),
        )
        out = out + DElement.monomial(caps, mon, coeff)
    return out
