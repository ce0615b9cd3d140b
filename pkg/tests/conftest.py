import pytest
from hypothesis import strategies as st

from sadic_builder.bratteli import diagram_from_matrices
from sadic_builder.construct import build_main1, build_toeplitz
from sadic_builder.exact_linear import ExactMatrix
from sadic_builder.morphisms import DirectiveSequence, Morphism
from sadic_builder.targets import parse_target

PAIR = [[1], [1]]
SYMMETRIC = [[3, 1], [1, 3]]
FIBONACCI_STEP = [[1, 1], [1, 2]]


def fibonacci_sequence(depth: int) -> DirectiveSequence:
    return DirectiveSequence([Morphism([[1, 2], [1]], 2)] * depth)


def positive_matrices(max_size: int = 4, max_entry: int = 50):
    """Strategy for entrywise positive integer matrices."""
    return st.integers(1, max_size).flatmap(
        lambda rows: st.integers(1, max_size).flatmap(
            lambda cols: st.lists(
                st.lists(st.integers(1, max_entry), min_size=cols, max_size=cols),
                min_size=rows,
                max_size=rows,
            )
        )
    ).map(ExactMatrix)


@pytest.fixture
def fibonacci():
    return fibonacci_sequence(12)


@pytest.fixture
def main1_diagram():
    return diagram_from_matrices([PAIR], repeat=[SYMMETRIC])


@pytest.fixture
def toeplitz_diagram():
    return diagram_from_matrices([PAIR], repeat=[FIBONACCI_STEP])


@pytest.fixture(scope="session")
def main1_result():
    diagram = diagram_from_matrices([PAIR], repeat=[SYMMETRIC])
    return build_main1(diagram, parse_target("n^3/2"), 4)


@pytest.fixture(scope="session")
def toeplitz_result():
    diagram = diagram_from_matrices([PAIR], repeat=[FIBONACCI_STEP])
    return build_toeplitz(diagram, parse_target("n^2"), 4)
