import random

import pytest

from nchilbert.core_linear import ScalarField, column, matrix_from_rows
from nchilbert.freealg import AlgebraPresentation, NCPoly, commutative_polynomial_ring, evaluate
from nchilbert.points import PointData, is_cyclic, random_group_element, sample_valid_point


@pytest.fixture
def Q():
    return ScalarField.rationals()


@pytest.fixture
def F2():
    return ScalarField.prime(2)


@pytest.fixture
def F3():
    return ScalarField.prime(3)


@pytest.fixture
def F5():
    return ScalarField.prime(5)


@pytest.fixture
def rng():
    return random.Random(1729)


@pytest.fixture
def make_point():
    """make_point(algebra, matrices_as_rows, y)"""
    return PointData.from_rows


@pytest.fixture
def free_algebra():
    def build(m, field):
        return AlgebraPresentation.free(m, field)
    return build


@pytest.fixture
def commutative_algebra():
    def build(m, field):
        return commutative_polynomial_ring(m, field)
    return build


@pytest.fixture
def sample_point(rng):
    """Random valid point: entries |x| <= 3 over Q, uniform over F_p, rejection on non-cyclicity."""
    def build(algebra, n, generator=None):
        return sample_valid_point(algebra, n, generator or rng)
    return build


@pytest.fixture
def sample_group(rng):
    def build(n, field, generator=None):
        return random_group_element(n, field, generator or rng)
    return build


@pytest.fixture
def sample_commuting_point(rng):
    """Cyclic point of k[x1, x2] with A_2 a random polynomial in A_1."""
    def build(n, field, generator=None):
        generator = generator or rng
        algebra = commutative_polynomial_ring(2, field)
        for _ in range(1000):
            A1 = matrix_from_rows([[field.random_element(generator) for _ in range(n)] for _ in range(n)], field)
            f = NCPoly.from_terms(field, [((1,) * k, field.random_element(generator)) for k in range(n)])
            y = column([field.random_element(generator) for _ in range(n)], field)
            p = PointData(algebra, n, (A1, evaluate(f, [A1])), y)
            if is_cyclic(p):
                return p
        raise AssertionError("no cyclic commuting point found")
    return build
