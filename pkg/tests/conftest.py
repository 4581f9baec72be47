from fractions import Fraction
from itertools import product

import pytest
from hypothesis import strategies as st

from syncwalk.automaton import Automaton
from syncwalk.markov import LetterDistribution

CRITERIA: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA:
            terminalreporter.write_line(line)


@pytest.fixture
def half():
    return LetterDistribution(Fraction(1, 2))


@pytest.fixture
def third():
    return LetterDistribution(Fraction(1, 3))


def permutation_automaton(n=3):
    """Both letters permute the states, so no pair ever merges."""
    return Automaton(n, ([(i + 1) % n for i in range(n)], [(i - 1) % n for i in range(n)]))


@st.composite
def automata(draw, max_states=6):
    n = draw(st.integers(1, max_states))
    row = st.lists(st.integers(0, n - 1), min_size=n, max_size=n)
    return Automaton(n, (draw(row), draw(row)))


words = st.lists(st.integers(0, 1), max_size=20).map(tuple)


def all_words(max_len, sigma=2):
    for k in range(max_len + 1):
        yield from product(range(sigma), repeat=k)
