import random
import warnings

import pytest

from nevpick import fixtures
from nevpick.core import Precision
from nevpick.pencil import PencilCoefficients, assemble
from nevpick.schur import build_chain_from_measure

ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture(scope="session")
def prec():
    return Precision(128)


@pytest.fixture(scope="session")
def eps(prec):
    return prec.eps


@pytest.fixture(scope="session")
def two_atom(prec):
    m = fixtures.two_atom_measure(prec)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        chain = build_chain_from_measure(m, fixtures.two_atom_points(prec), 2)
    return m, chain


@pytest.fixture(scope="session")
def uniform64(prec):
    m = fixtures.uniform_measure(prec)
    pts = fixtures.standard_points(13, prec)
    chain = build_chain_from_measure(m, pts, 13)
    return m, pts, chain, PencilCoefficients.from_chain(chain), assemble(chain, 12)


def random_lambdas(prec, count, seed, re=(-2, 2), im=(0.25, 2)):
    rng = random.Random(seed)
    return [prec.ctx.mpc(rng.uniform(*re), rng.uniform(*im)) for _ in range(count)]


def rel(a, b):
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale else abs(a - b)
