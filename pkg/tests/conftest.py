"""
Shared fixtures for the test suites
"""

from fractions import Fraction

import pytest

from sepcore.algebra.algebra_core import make_matrix_algebra
from sepcore.algebra.scalars import get_backend
from sepcore.constructions.examples import diagonal, make_E0, make_twisted


@pytest.fixture
def exact():
    return get_backend("exact")


@pytest.fixture
def flt():
    return get_backend("float64", 1e-9)


@pytest.fixture
def m2(exact):
    return make_matrix_algebra(2, backend=exact)


@pytest.fixture
def e0_2(exact):
    return make_E0(2, exact)


@pytest.fixture
def twisted_7_5(m2):
    """r = s = diag(7/5, 1/5), normalised since Tr(s r) = 2."""
    d = diagonal(m2, [Fraction(7, 5), Fraction(1, 5)])
    return make_twisted(d, d)


@pytest.fixture
def nilpotent_2(m2):
    """r = 1, s = diag(1, -1): Tr(s r) = 0."""
    return make_twisted(m2.one(), diagonal(m2, [1, -1]))


@pytest.fixture
def scalar_multiple_2(m2):
    """r = 1, s = diag(2, 1): E^2 = (3/2) E."""
    return make_twisted(m2.one(), diagonal(m2, [2, 1]))
