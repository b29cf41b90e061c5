import random
from fractions import Fraction

import pytest
from hypothesis import settings

from sievelab import arith
from sievelab.density import table_density
from sievelab.sequences import ApproximationModel, SiftingSequence

settings.register_profile("repro", derandomize=True, database=None, deadline=None)
settings.load_profile("repro")

RIG_PRIMES = (101, 103, 107, 109)


def random_density(rng: random.Random, p_max: int, mode="float", positive=False, den=12):
    """Rational g(p) p in [0, 2), drawn on a grid of step 1/den."""
    rows = []
    for p in map(int, arith.primes_up_to(p_max)):
        k = rng.randrange(1 if positive else 0, 2 * den)
        g = Fraction(k, den * p)
        if g >= 1:
            g = Fraction(1, 2)
        rows.append((p, g))
    return table_density(rows, p_max, mode)


def rigged_instance():
    """Density and sequence with delta(2, 100) = 0 and r_d = 0 for every squarefree d < 6400.

    g(2) = 1/2, g(l) = 1/4 on four primes just above 100, zero elsewhere;
    a_l = a_{2l} = 1 so that A_d = g(d) X with X = 8 whenever d < 10^4.
    """
    dens = table_density([(2, Fraction(1, 2))] + [(p, Fraction(1, 4)) for p in RIG_PRIMES],
                         p_max=10**4, mode="exact")
    seq = SiftingSequence.from_mapping({**{p: 1 for p in RIG_PRIMES}, **{2 * p: 1 for p in RIG_PRIMES}})
    return dens, seq, ApproximationModel(8, dens, 10**4)


@pytest.fixture
def rng():
    return random.Random(20240611)


_results = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        _results[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, outcome in _results.items():
        name = nodeid.split("::")[-1]
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
