"""
Points of the based Hilbert scheme: tuples (A_1..A_m, y) of n x n matrices
with a column vector, the GL_n action g.(A, y) = (g A g^-1, g y), the chart
determinants D_f = det(y, f_1(A)y, ..., f_{n-1}(A)y) and what is built on
them (slices, cocycles, semi-invariants, embedding coordinates).
"""
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import List, Sequence, Tuple

import sympy

from nchilbert.core_linear import (
    EchelonBasis,
    FieldValue,
    Matrix,
    ScalarField,
    column,
    column_entries,
    det,
    field_of,
    hstack,
    identity,
    inverse,
    is_zero_matrix,
    matrix_from_rows,
    require_same_field,
    require_square,
    rows_of,
)
from nchilbert.exceptions import (
    ArityError,
    FieldMismatchError,
    InvalidPointError,
    NotCoveredError,
    NotInChartError,
    ShapeError,
    SingularMatrixError,
)
from nchilbert.freealg import (
    EMPTY_WORD,
    AlgebraPresentation,
    NCPoly,
    Word,
    apply_to_vector,
    evaluate,
    lenlex_key,
    words_up_to,
)

logger = logging.getLogger("nc_hilbert.points")

ChartIndex = Tuple[NCPoly, ...]


@dataclass(frozen=True)
class PointData:
    """A tuple (A_1, ..., A_m, y); validity is checked by the operations."""

    algebra: AlgebraPresentation
    n: int
    matrices: Tuple[Matrix, ...]
    y: Matrix

    def __post_init__(self):
        if self.n < 1:
            raise ShapeError("n must be positive")
        if len(self.matrices) != self.algebra.m:
            raise ArityError(
                f"algebra has {self.algebra.m} generators but {len(self.matrices)} matrices given"
            )
        for index, M in enumerate(self.matrices):
            if M.shape != (self.n, self.n):
                raise ShapeError(f"matrix {index + 1} is {M.shape}, expected {self.n}x{self.n}")
        if self.y.shape != (self.n, 1):
            raise ShapeError(f"y is {self.y.shape}, expected {self.n}x1")
        for M in (*self.matrices, self.y):
            if field_of(M) != self.algebra.field:
                raise FieldMismatchError(
                    f"point entries over {field_of(M)}, algebra over {self.algebra.field}"
                )

    @classmethod
    def from_rows(cls, algebra: AlgebraPresentation, matrices, y) -> "PointData":
        field = algebra.field
        mats = tuple(matrix_from_rows(rows, field) for rows in matrices)
        n = mats[0].shape[0] if mats else len(y)
        return cls(algebra, n, mats, column(y, field))

    @property
    def field(self) -> ScalarField:
        return self.algebra.field

    @property
    def m(self) -> int:
        return self.algebra.m

    def key(self) -> tuple:
        encode = self.field.encode
        entries = tuple(
            tuple(encode(v) for row in rows_of(M) for v in row) for M in self.matrices
        )
        return (self.field.characteristic, self.n, entries, tuple(encode(v) for v in column_entries(self.y)))

    def __hash__(self) -> int:
        return hash(self.key())

    def with_algebra(self, algebra: AlgebraPresentation) -> "PointData":
        return PointData(algebra, self.n, self.matrices, self.y)


@dataclass(frozen=True)
class GroupElement:
    """An invertible n x n matrix g acting by conjugation and on y."""

    g: Matrix

    def __post_init__(self):
        require_square(self.g)
        if not det(self.g):
            raise SingularMatrixError("group elements must be invertible")

    @classmethod
    def identity(cls, n: int, field: ScalarField) -> "GroupElement":
        return cls(identity(n, field))

    @property
    def n(self) -> int:
        return self.g.shape[0]

    @property
    def field(self) -> ScalarField:
        return field_of(self.g)

    def inverse(self) -> "GroupElement":
        return GroupElement(inverse(self.g))

    def determinant(self) -> FieldValue:
        return det(self.g)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        require_same_field(self.g, other.g)
        return GroupElement(self.g * other.g)


def check_relations(p: PointData) -> bool:
    """True iff every relation evaluates to the zero matrix (p lies in Rep^[n]_A)."""
    for relation in p.algebra.relations:
        if not is_zero_matrix(evaluate(relation.coerce(p.field), p.matrices)):
            return False
    return True


def krylov_basis(p: PointData) -> Tuple[List[Word], List[Matrix]]:
    """
    Greedy breadth-first Krylov search. Words are visited in length-lex order,
    children of w are x_j.w, and a word is kept when its vector w(A)y is
    independent of the vectors kept before it.
    """
    basis = EchelonBasis(p.field, p.n)
    words: List[Word] = []
    vectors: List[Matrix] = []
    frontier: List[Tuple[Word, Matrix]] = [(EMPTY_WORD, p.y)]
    while frontier and len(words) < p.n:
        frontier.sort(key=lambda item: lenlex_key(item[0]))
        children: List[Tuple[Word, Matrix]] = []
        for word, vector in frontier:
            if len(words) == p.n:
                break
            if not basis.add(column_entries(vector)):
                continue
            words.append(word)
            vectors.append(vector)
            for letter in range(1, p.m + 1):
                children.append(((letter,) + word, p.matrices[letter - 1] * vector))
        frontier = children
    return words, vectors


def is_cyclic(p: PointData) -> bool:
    return len(krylov_basis(p)[0]) == p.n


def validate_point(p: PointData) -> None:
    if not check_relations(p):
        raise InvalidPointError("point does not satisfy the algebra relations")
    if not is_cyclic(p):
        raise InvalidPointError("y is not a cyclic vector")


def chart_from_words(words: Sequence[Word], field: ScalarField) -> ChartIndex:
    return tuple(NCPoly.monomial(field, tuple(w)) for w in words)


def krylov_chart(p: PointData) -> ChartIndex:
    """The chart spanned by the non-empty Krylov basis words."""
    words, _ = krylov_basis(p)
    if len(words) != p.n:
        raise NotCoveredError("y is not cyclic; no chart contains the point")
    return chart_from_words(words[1:], p.field)


def chart_family(m: int, n: int, max_length: int, field: ScalarField) -> List[ChartIndex]:
    """All (n-1)-tuples of words of length <= max_length."""
    words = words_up_to(m, max_length)
    return [chart_from_words(combo, field) for combo in product(words, repeat=n - 1)]


def chart_matrix(p: PointData, f: ChartIndex) -> Matrix:
    """M_f = (y, f_1(A)y, ..., f_{n-1}(A)y)."""
    if len(f) != p.n - 1:
        raise ArityError(f"chart index needs {p.n - 1} entries, got {len(f)}")
    columns = [p.y]
    for poly in f:
        columns.append(apply_to_vector(poly.coerce(p.field), p.matrices, p.y))
    return hstack(columns)


def chart_det(p: PointData, f: ChartIndex) -> FieldValue:
    return det(chart_matrix(p, f))


def in_chart(p: PointData, f: ChartIndex) -> bool:
    return bool(chart_det(p, f))


def gl_act(g: GroupElement, p: PointData) -> PointData:
    """g.(A_1..A_m, y) = (g A_1 g^-1, ..., g A_m g^-1, g y)."""
    if g.n != p.n:
        raise ShapeError(f"group element of size {g.n} acting on n = {p.n}")
    require_same_field(g.g, p.y)
    g_inv = inverse(g.g)
    matrices = tuple(g.g * A * g_inv for A in p.matrices)
    return PointData(p.algebra, p.n, matrices, g.g * p.y)


def _require_chart(p: PointData, f: ChartIndex) -> Matrix:
    M = chart_matrix(p, f)
    if not det(M):
        labels = ", ".join(str(poly) for poly in f) or "()"
        raise NotInChartError(f"D_f vanishes at the point for f = ({labels})")
    return M


def normalize_in_chart(p: PointData, f: ChartIndex) -> Tuple[PointData, GroupElement]:
    """Move p onto the slice chart_matrix = identity with g = M_f^-1."""
    g = GroupElement(inverse(_require_chart(p, f)))
    return gl_act(g, p), g


def transition_cocycle(p: PointData, f: ChartIndex, fprime: ChartIndex) -> GroupElement:
    """M_{f'}^-1 M_f at p."""
    M_f = _require_chart(p, f)
    M_fprime = _require_chart(p, fprime)
    return GroupElement(inverse(M_fprime) * M_f)


def determinant_cocycle(p: PointData, f: ChartIndex, fprime: ChartIndex) -> FieldValue:
    """D_f / D_f' at p: the transition function of the determinant line bundle."""
    return det(_require_chart(p, f)) / det(_require_chart(p, fprime))


def section_in_chart(p: PointData, f: ChartIndex, h: NCPoly) -> Matrix:
    """Coordinates M_f^-1 h(A) y of the section h.v in the chart trivialization."""
    M_f = _require_chart(p, f)
    return inverse(M_f) * apply_to_vector(h.coerce(p.field), p.matrices, p.y)


def semi_invariant_weight_check(charts: Sequence[ChartIndex], p: PointData, g: GroupElement) -> bool:
    """Checks prod D_{f_i}(g.p) = det(g)^k prod D_{f_i}(p), k = len(charts)."""
    moved = gl_act(g, p)
    lhs = p.field.one
    rhs = g.determinant() ** len(charts)
    for f in charts:
        lhs = lhs * chart_det(moved, f)
        rhs = rhs * chart_det(p, f)
    return lhs == rhs


@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    """Homogeneous coordinates; equality is up to a nonzero global scalar."""

    field: ScalarField
    coordinates: Tuple[FieldValue, ...]

    def normalized(self) -> Tuple[FieldValue, ...]:
        for value in self.coordinates:
            if value:
                scale = self.field.one / value
                return tuple(scale * c for c in self.coordinates)
        return self.coordinates

    def encoded(self) -> List:
        return [self.field.encode(c) for c in self.normalized()]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProjectivePoint):
            return NotImplemented
        return self.field == other.field and self.normalized() == other.normalized()

    def __hash__(self) -> int:
        return hash((self.field, tuple(self.encoded())))


def embedding_coordinates(p: PointData, family: Sequence[ChartIndex], power: int = 1) -> ProjectivePoint:
    """(D_{f(0)}(p)^power : ... : D_{f(N)}(p)^power)."""
    if power < 1:
        raise ArityError("the embedding power must be positive")
    coordinates = tuple(chart_det(p, f) ** power for f in family)
    if not any(coordinates):
        raise NotCoveredError("no chart of the family contains the point; enlarge the family")
    return ProjectivePoint(p.field, coordinates)


def veronese_bound(degrees: Sequence[int]) -> int:
    """2 * len(degrees) * prod(degrees): a Veronese degree generated in degree one."""
    if not degrees:
        raise ArityError("at least one generator degree is required")
    total = 1
    for d in degrees:
        if d < 1:
            raise ArityError(f"generator degrees must be positive, got {d}")
        total *= d
    return 2 * len(degrees) * total


@dataclass(frozen=True)
class ReducedPoint:
    point: PointData
    is_cyclic: bool


def reduce_point_mod_p(p: PointData, prime: int) -> ReducedPoint:
    """Entrywise reduction of a rational point; cyclicity is recomputed."""
    if p.field.characteristic != 0:
        raise FieldMismatchError(f"only points over Q can be reduced, got {p.field}")
    target = ScalarField.prime(prime)
    algebra = p.algebra.with_field(target)

    def reduce_matrix(M: Matrix) -> Matrix:
        rows = [[target.reduce(v, p.field) for v in row] for row in rows_of(M)]
        return matrix_from_rows(rows, target)

    reduced = PointData(
        algebra, p.n, tuple(reduce_matrix(M) for M in p.matrices), reduce_matrix(p.y)
    )
    cyclic = is_cyclic(reduced)
    if not cyclic:
        logger.info("Point lost cyclicity after reduction modulo %s", prime)
    return ReducedPoint(reduced, cyclic)


def abelianization_point(algebra: AlgebraPresentation, values: Sequence) -> PointData:
    """The n = 1 point (a_1, ..., a_m; y = 1)."""
    if len(values) != algebra.m:
        raise ArityError(f"need {algebra.m} scalars, got {len(values)}")
    return PointData.from_rows(algebra, [[[v]] for v in values], [1])


def random_point(algebra: AlgebraPresentation, n: int, rng: random.Random, bound: int = 3) -> PointData:
    field = algebra.field
    matrices = [
        [[field.random_element(rng, bound) for _ in range(n)] for _ in range(n)]
        for _ in range(algebra.m)
    ]
    y = [field.random_element(rng, bound) for _ in range(n)]
    return PointData.from_rows(algebra, matrices, y)


def sample_valid_point(
    algebra: AlgebraPresentation, n: int, rng: random.Random, bound: int = 3, attempts: int = 1000
) -> PointData:
    """Rejection sampling of a point passing check_relations and is_cyclic."""
    for _ in range(attempts):
        p = random_point(algebra, n, rng, bound)
        if check_relations(p) and is_cyclic(p):
            return p
    raise InvalidPointError(f"no valid point found in {attempts} attempts")


def random_group_element(n: int, field: ScalarField, rng: random.Random, bound: int = 3) -> GroupElement:
    while True:
        rows = [[field.random_element(rng, bound) for _ in range(n)] for _ in range(n)]
        M = matrix_from_rows(rows, field)
        if det(M):
            return GroupElement(M)


def coordinate_symbols(m: int, n: int) -> Tuple[List[List[List[sympy.Symbol]]], List[sympy.Symbol]]:
    """Coordinates t_s_i_j of the matrices and y_l of the vector (1-based)."""
    t = [
        [[sympy.Symbol(f"t_{s}_{i}_{j}") for j in range(1, n + 1)] for i in range(1, n + 1)]
        for s in range(1, m + 1)
    ]
    y = [sympy.Symbol(f"y_{l}") for l in range(1, n + 1)]
    return t, y


def _sympy_coefficient(field: ScalarField, value: FieldValue):
    if field.characteristic == 0:
        fraction = field.to_fraction(value)
        return sympy.Rational(fraction.numerator, fraction.denominator)
    return sympy.Integer(field.to_int(value))


def chart_det_polynomial(m: int, n: int, f: ChartIndex) -> sympy.Poly:
    """D_f as a polynomial in k[t^s_ij, y_l]."""
    if len(f) != n - 1:
        raise ArityError(f"chart index needs {n - 1} entries, got {len(f)}")
    field = f[0].field if f else ScalarField.rationals()
    t, y = coordinate_symbols(m, n)
    mats = [sympy.Matrix(t[s]) for s in range(m)]
    Y = sympy.Matrix(y)
    columns = [Y]
    for poly in f:
        vector = sympy.zeros(n, 1)
        for word, coefficient in poly.terms:
            if max(word, default=0) > m:
                raise ArityError(f"chart entry uses a letter beyond x_{m}")
            v = Y
            for letter in reversed(word):
                v = mats[letter - 1] * v
            vector += _sympy_coefficient(field, coefficient) * v
        columns.append(vector)
    expr = sympy.expand(sympy.Matrix.hstack(*columns).det(method="berkowitz"))
    gens = [sym for block in t for row in block for sym in row] + y
    if field.characteristic == 0:
        return sympy.Poly(expr, *gens, domain=sympy.QQ)
    return sympy.Poly(expr, *gens, modulus=field.characteristic)


def evaluate_det_polynomial(poly: sympy.Poly, p: PointData) -> FieldValue:
    """Substitute the coordinates of p into a polynomial from chart_det_polynomial."""
    t, y = coordinate_symbols(p.m, p.n)
    substitution = {}
    for s, M in enumerate(p.matrices):
        for i, row in enumerate(rows_of(M)):
            for j, value in enumerate(row):
                substitution[t[s][i][j]] = _sympy_coefficient(p.field, value)
    for l, value in enumerate(column_entries(p.y)):
        substitution[y[l]] = _sympy_coefficient(p.field, value)
    value = poly.as_expr().subs(substitution)
    rational = sympy.Rational(value)
    return p.field(Fraction(int(rational.p), int(rational.q)))
