from fractions import Fraction

import pytest

from nchilbert.core_linear import (
    EchelonBasis,
    ScalarField,
    column,
    column_entries,
    det,
    hstack,
    identity,
    inverse,
    kernel_basis,
    matrix_from_rows,
    rank,
    rref,
    solve,
)
from nchilbert.exceptions import (
    BadDenominatorError,
    FieldMismatchError,
    ShapeError,
    SingularMatrixError,
    UnsupportedFieldError,
)


def test_scalar_field_equality_and_validation():
    assert ScalarField.prime(5) == ScalarField(5)
    assert ScalarField.rationals() != ScalarField.prime(2)
    with pytest.raises(UnsupportedFieldError):
        ScalarField(4)
    with pytest.raises(UnsupportedFieldError):
        ScalarField(2 ** 31 + 11)


def test_scalar_conversion_and_encoding(Q, F3, F5):
    assert Q.encode(Q("6/4")) == "3/2"
    assert Q.encode(Q(Fraction(-1, 2))) == "-1/2"
    assert Q.encode(Q(7)) == "7"
    assert F5.encode(F5(-1)) == 4
    assert F5("1/2") == F5(3)
    with pytest.raises(BadDenominatorError):
        F3("1/3")
    with pytest.raises(FieldMismatchError):
        Q(0.5)


def test_rational_arithmetic_is_exact(Q):
    assert Q("1/2") + Q("1/3") == Q("5/6")
    big = Q(Fraction(10 ** 40 + 1, 3 ** 30))
    assert Q.to_fraction(big * big) == Fraction(10 ** 40 + 1, 3 ** 30) ** 2


def test_rref_identity_over_f2(F2):
    reduced, pivots, r = rref(identity(2, F2))
    assert reduced == identity(2, F2)
    assert pivots == [0, 1]
    assert r == 2


def test_rref_already_reduced(Q):
    M = matrix_from_rows([[0, 1], [0, 0]], Q)
    reduced, pivots, r = rref(M)
    assert reduced == M
    assert (pivots, r) == ([1], 1)


def test_rref_by_hand(Q):
    reduced, pivots, r = rref(matrix_from_rows([[2, 4], [1, 2]], Q))
    assert reduced == matrix_from_rows([[1, 2], [0, 0]], Q)
    assert (pivots, r) == ([0], 1)


def test_mixed_fields_rejected(Q, F2):
    with pytest.raises(FieldMismatchError):
        hstack([column([1], Q), column([1], F2)])


def test_determinants(Q):
    assert det(identity(3, Q)) == Q(1)
    assert det(matrix_from_rows([[0, 1], [1, 0]], Q)) == Q(-1)
    assert det(matrix_from_rows([[1, 1, 2], [3, 3, 5], [4, 4, 0]], Q)) == Q(0)
    with pytest.raises(ShapeError):
        det(matrix_from_rows([[1, 2]], Q))


def test_solve_and_kernel(Q, F2):
    b = column([3, "1/2"], Q)
    assert solve(identity(2, Q), b) == b
    assert solve(matrix_from_rows([[0]], Q), column([1], Q)) is None
    kernel = kernel_basis(matrix_from_rows([[1, 1]], F2))
    assert [column_entries(v) for v in kernel] == [[F2(1), F2(1)]]


def test_solve_returns_a_solution(Q):
    M = matrix_from_rows([[1, 2, 3], [2, 4, 7]], Q)
    b = column([1, 3], Q)
    x = solve(M, b)
    assert M * x == b


def test_singular_inverse(F5):
    with pytest.raises(SingularMatrixError):
        inverse(matrix_from_rows([[1, 2], [2, 4]], F5))


def test_random_square_matrices_over_f5(F5, rng):
    for _ in range(200):
        n = rng.randint(1, 4)
        M = matrix_from_rows([[rng.randrange(5) for _ in range(n)] for _ in range(n)], F5)
        invertible = bool(det(M))
        assert invertible == (rank(M) == n)
        if invertible:
            assert M * inverse(M) == identity(n, F5)
        else:
            with pytest.raises(SingularMatrixError):
                inverse(M)


def test_rank_nullity(Q, rng):
    for _ in range(100):
        rows, cols = rng.randint(1, 4), rng.randint(1, 5)
        M = matrix_from_rows([[rng.randint(-2, 2) for _ in range(cols)] for _ in range(rows)], Q)
        kernel = kernel_basis(M)
        assert rank(M) + len(kernel) == cols
        for v in kernel:
            assert not any(column_entries(M * v))


def test_echelon_basis(F3):
    basis = EchelonBasis(F3, 3)
    assert basis.add([F3(1), F3(2), F3(0)])
    assert not basis.add([F3(2), F3(1), F3(0)])
    assert basis.add([F3(0), F3(0), F3(1)])
    assert basis.contains([F3(1), F3(2), F3(2)])
    assert basis.rank == 2
    with pytest.raises(ShapeError):
        basis.add([F3(1)])
