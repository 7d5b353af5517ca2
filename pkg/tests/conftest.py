import random

import pytest
from hypothesis import strategies as st

from monodt.boolfn import TruthTable


@st.composite
def tables(draw, min_n=0, max_n=4):
    n = draw(st.integers(min_n, max_n))
    return TruthTable(n, draw(st.integers(0, (1 << (1 << n)) - 1)))


def all_tables(n):
    return [TruthTable(n, b) for b in range(1 << (1 << n))]


def tt(n, bits):
    """Table from a bit string written f(0), f(1), ... (index order)."""
    return TruthTable(n, sum(int(c) << i for i, c in enumerate(bits)))


@pytest.fixture
def rng():
    return random.Random(1234)
