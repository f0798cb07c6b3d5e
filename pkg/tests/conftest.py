from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from dre.data import fixture
from dre.encoder import encode
from dre.lra import atom, conj, disj, neg
from dre.model.expr import LinearExpression

VARS = ("x", "y", "z")
REL = ("<=", "<", "=")


@st.composite
def atoms_st(draw, variables=VARS, coef=3, const=6):
    coeffs = {v: draw(st.integers(-coef, coef)) for v in variables}
    k = draw(st.integers(-const, const))
    return atom(LinearExpression.build(k, coeffs), draw(st.sampled_from(REL)))


def formulas_st(variables=VARS, max_leaves=6):
    leaf = atoms_st(variables)
    return st.recursive(
        leaf,
        lambda kids: st.one_of(
            st.lists(kids, min_size=2, max_size=3).map(lambda fs: conj(*fs)),
            st.lists(kids, min_size=2, max_size=3).map(lambda fs: disj(*fs)),
            kids.map(neg),
        ),
        max_leaves=max_leaves,
    )


def grid(variables, lo=-6, hi=6, step=Fraction(1, 2)):
    n = int((hi - lo) / step)
    axis = [lo + i * step for i in range(n + 1)]
    for pt in itertools.product(axis, repeat=len(variables)):
        yield dict(zip(variables, pt))


FIXTURE_NAMES = ("unit", "twoact", "delivery_s", "delivery_s_battery")


@pytest.fixture(scope="session")
def encodings():
    return {n: encode(*fixture(n)) for n in FIXTURE_NAMES}


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running campaign checks")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
