"""
Exact scalars over Q and F_p and dense exact linear algebra.

Matrices are sympy ``DomainMatrix`` instances over ``QQ`` or ``GF(p)``; a
``ScalarField`` names the field and converts raw values (ints, Fractions,
"a/b" strings) into its domain elements. Every matrix built here is kept in
dense format: DomainMatrix equality compares representations.
"""
import functools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterator, List, Optional, Sequence, Tuple

from sympy import isprime
from sympy.polys.domains import GF, QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError

from nchilbert.exceptions import (
    BadDenominatorError,
    FieldMismatchError,
    ShapeError,
    SingularMatrixError,
    UnsupportedFieldError,
)

# An element of QQ or GF(p); see ScalarField.
FieldValue = Any
Matrix = DomainMatrix

MAX_CHARACTERISTIC = 2 ** 31


@functools.lru_cache(maxsize=None)
def _domain_for(characteristic: int):
    if characteristic == 0:
        return QQ
    return GF(characteristic, symmetric=False)


@dataclass(frozen=True)
class ScalarField:
    """The base field k: Q when ``characteristic`` is 0, F_p otherwise."""

    characteristic: int = 0

    def __post_init__(self):
        c = self.characteristic
        if c == 0:
            return
        if c < 0 or c > MAX_CHARACTERISTIC or not isprime(c):
            raise UnsupportedFieldError(
                f"characteristic must be 0 or a prime <= 2^31, got {c}"
            )

    @classmethod
    def rationals(cls) -> "ScalarField":
        return cls(0)

    @classmethod
    def prime(cls, p: int) -> "ScalarField":
        return cls(int(p))

    @property
    def kind(self) -> str:
        return "Q" if self.characteristic == 0 else "Fp"

    @property
    def is_finite(self) -> bool:
        return self.characteristic != 0

    @property
    def domain(self):
        return _domain_for(self.characteristic)

    @property
    def zero(self) -> FieldValue:
        return self.domain.zero

    @property
    def one(self) -> FieldValue:
        return self.domain.one

    def __str__(self) -> str:
        return "Q" if self.characteristic == 0 else f"F_{self.characteristic}"

    def __call__(self, value: Any) -> FieldValue:
        """Convert an int, Fraction, "a/b" string or own-domain element."""
        if isinstance(value, bool):
            raise FieldMismatchError(f"booleans are not scalars of {self}")
        if isinstance(value, int):
            return self.domain(value)
        if isinstance(value, str):
            try:
                value = Fraction(value.strip())
            except (ValueError, ZeroDivisionError) as exc:
                raise FieldMismatchError(f"'{value}' is not a rational number") from exc
        if isinstance(value, Fraction):
            return self._from_fraction(value)
        if self.domain.of_type(value):
            return value
        raise FieldMismatchError(f"value {value!r} does not belong to {self}")

    def _from_fraction(self, value: Fraction) -> FieldValue:
        if self.characteristic == 0:
            return QQ(value.numerator, value.denominator)
        if value.denominator % self.characteristic == 0:
            raise BadDenominatorError(
                f"denominator of {value} vanishes modulo {self.characteristic}"
            )
        return self.domain(value.numerator) / self.domain(value.denominator)

    def to_fraction(self, value: FieldValue) -> Fraction:
        if self.characteristic == 0:
            return Fraction(int(QQ.numer(value)), int(QQ.denom(value)))
        return Fraction(self.to_int(value))

    def to_int(self, value: FieldValue) -> int:
        """Canonical residue in [0, p) of an F_p element."""
        if self.characteristic == 0:
            fraction = self.to_fraction(value)
            if fraction.denominator != 1:
                raise FieldMismatchError(f"{fraction} is not an integer")
            return fraction.numerator
        return int(self.domain.to_int(value)) % self.characteristic

    def encode(self, value: FieldValue):
        """JSON form: "a/b" (or "a") over Q, an integer in [0, p) over F_p."""
        if self.characteristic == 0:
            fraction = self.to_fraction(value)
            if fraction.denominator == 1:
                return str(fraction.numerator)
            return f"{fraction.numerator}/{fraction.denominator}"
        return self.to_int(value)

    def reduce(self, value: FieldValue, source: "ScalarField") -> FieldValue:
        """Map an element of ``source`` into this field (identity or Q -> F_p)."""
        if source == self:
            return value
        if source.characteristic == 0 and self.characteristic != 0:
            return self._from_fraction(source.to_fraction(value))
        raise FieldMismatchError(f"cannot map elements of {source} into {self}")

    def is_zero(self, value: FieldValue) -> bool:
        return value == self.domain.zero

    def elements(self) -> Iterator[FieldValue]:
        if self.characteristic == 0:
            raise UnsupportedFieldError("Q has no finite element listing")
        for residue in range(self.characteristic):
            yield self.domain(residue)

    def random_element(self, rng: random.Random, bound: int = 3) -> FieldValue:
        """Uniform over F_p; an integer in [-bound, bound] over Q."""
        if self.characteristic == 0:
            return self.domain(rng.randint(-bound, bound))
        return self.domain(rng.randrange(self.characteristic))


def field_of(M: Matrix) -> ScalarField:
    return ScalarField(int(M.domain.characteristic()))


def require_same_field(*matrices: Matrix) -> ScalarField:
    fields = {field_of(M) for M in matrices}
    if len(fields) > 1:
        names = ", ".join(sorted(str(f) for f in fields))
        raise FieldMismatchError(f"matrices over different fields: {names}")
    return fields.pop()


def require_square(M: Matrix) -> int:
    rows, cols = M.shape
    if rows != cols:
        raise ShapeError(f"expected a square matrix, got {rows}x{cols}")
    return rows


def matrix_from_rows(rows: Sequence[Sequence[Any]], field: ScalarField) -> Matrix:
    if not rows or not rows[0]:
        raise ShapeError("matrices must have at least one row and one column")
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise ShapeError("ragged matrix rows")
    converted = [[field(value) for value in row] for row in rows]
    return DomainMatrix(converted, (len(rows), width), field.domain)


def column(values: Sequence[Any], field: ScalarField) -> Matrix:
    return matrix_from_rows([[value] for value in values], field)


def identity(n: int, field: ScalarField) -> Matrix:
    return DomainMatrix.eye(n, field.domain).to_dense()


def zero_matrix(rows: int, cols: int, field: ScalarField) -> Matrix:
    return DomainMatrix.zeros((rows, cols), field.domain).to_dense()


def unit_matrix(rows: int, cols: int, i: int, j: int, field: ScalarField) -> Matrix:
    entries = [[field.zero] * cols for _ in range(rows)]
    entries[i][j] = field.one
    return DomainMatrix(entries, (rows, cols), field.domain)


def standard_basis_vector(n: int, i: int, field: ScalarField) -> Matrix:
    return unit_matrix(n, 1, i, 0, field)


def entry(M: Matrix, i: int, j: int) -> FieldValue:
    return M[i, j].element


def rows_of(M: Matrix) -> List[List[FieldValue]]:
    return M.to_list()


def column_entries(v: Matrix) -> List[FieldValue]:
    return [row[0] for row in v.to_list()]


def hstack(columns: Sequence[Matrix]) -> Matrix:
    if not columns:
        raise ShapeError("cannot stack an empty list of columns")
    require_same_field(*columns)
    if len(columns) == 1:
        return columns[0]
    return columns[0].hstack(*columns[1:]).to_dense()


def is_zero_matrix(M: Matrix) -> bool:
    return all(not value for row in M.to_list() for value in row)


def commutator(X: Matrix, Y: Matrix) -> Matrix:
    return X * Y - Y * X


def rref(M: Matrix) -> Tuple[Matrix, List[int], int]:
    """Reduced row echelon form, pivot columns in increasing order, rank."""
    reduced, pivots = M.to_dense().rref()
    pivots = sorted(pivots)
    return reduced.to_dense(), pivots, len(pivots)


def rank(M: Matrix) -> int:
    return rref(M)[2]


def det(M: Matrix) -> FieldValue:
    require_square(M)
    return M.det()


def inverse(M: Matrix) -> Matrix:
    require_square(M)
    try:
        return M.inv().to_dense()
    except DMNonInvertibleMatrixError as exc:
        raise SingularMatrixError("matrix is not invertible") from exc


def kernel_basis(M: Matrix) -> List[Matrix]:
    """Exact basis of the right null space, one column per free variable."""
    field = field_of(M)
    reduced, pivots, _ = rref(M)
    table = reduced.to_list()
    cols = M.shape[1]
    pivot_rows = {col: row for row, col in enumerate(pivots)}
    basis = []
    for free in range(cols):
        if free in pivot_rows:
            continue
        values = [field.zero] * cols
        values[free] = field.one
        for col, row in pivot_rows.items():
            values[col] = -table[row][free]
        basis.append(DomainMatrix([[v] for v in values], (cols, 1), field.domain))
    return basis


def solve(M: Matrix, b: Matrix) -> Optional[Matrix]:
    """One exact solution of M x = b, or None when the system is inconsistent."""
    field = require_same_field(M, b)
    rows, cols = M.shape
    if b.shape != (rows, 1):
        raise ShapeError(f"right-hand side must be a {rows}x1 column, got {b.shape}")
    reduced, pivots, _ = rref(M.hstack(b))
    if cols in pivots:
        return None
    table = reduced.to_list()
    values = [field.zero] * cols
    for row, col in enumerate(pivots):
        values[col] = table[row][cols]
    return DomainMatrix([[v] for v in values], (cols, 1), field.domain)


def stack_rows(vectors: Sequence[Sequence[FieldValue]], width: int, field: ScalarField) -> Matrix:
    """Matrix whose rows are ``vectors``; an empty list gives a 0-row matrix."""
    if not vectors:
        return DomainMatrix([], (0, width), field.domain)
    return DomainMatrix([list(v) for v in vectors], (len(vectors), width), field.domain)


def span_rank(vectors: Sequence[Sequence[FieldValue]], width: int, field: ScalarField) -> int:
    basis = EchelonBasis(field, width)
    for vector in vectors:
        basis.add(vector)
    return basis.rank


class EchelonBasis:
    """
    Incrementally reduced list of vectors.

    Each stored row has a leading one at its pivot and zeros at the pivots of
    earlier rows, so reducing a candidate against the rows in insertion order
    leaves it zero exactly when it lies in their span.
    """

    def __init__(self, field: ScalarField, dimension: int):
        self.field = field
        self.dimension = dimension
        self._rows: List[Tuple[int, List[FieldValue]]] = []

    @property
    def rank(self) -> int:
        return len(self._rows)

    def reduce(self, vector: Sequence[FieldValue]) -> List[FieldValue]:
        if len(vector) != self.dimension:
            raise ShapeError(
                f"vector of length {len(vector)} in a space of dimension {self.dimension}"
            )
        residue = list(vector)
        for pivot, row in self._rows:
            factor = residue[pivot]
            if factor:
                residue = [a - factor * b for a, b in zip(residue, row)]
        return residue

    def contains(self, vector: Sequence[FieldValue]) -> bool:
        return not any(self.reduce(vector))

    def add(self, vector: Sequence[FieldValue]) -> bool:
        """Insert ``vector``; returns False when it was already in the span."""
        residue = self.reduce(vector)
        for pivot, value in enumerate(residue):
            if value:
                scale = self.field.one / value
                self._rows.append((pivot, [scale * a for a in residue]))
                return True
        return False
