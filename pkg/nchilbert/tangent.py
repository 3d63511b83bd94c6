"""
Tangent spaces at points of H^[n]_A.

The based tangent space is the solution space of the linearized relations in
the unknowns (A'_1..A'_m, y'). Hom_A(I, M) is computed from the long exact
sequence of 0 -> I -> A -> M -> 0 for the free algebra and by a degree
truncation otherwise; tangent_vector_to_hom links the two descriptions.
"""
import logging
from dataclasses import dataclass, field as dataclass_field
from typing import List, Optional, Sequence, Tuple

from nchilbert.core_linear import (
    EchelonBasis,
    FieldValue,
    Matrix,
    column,
    column_entries,
    commutator,
    hstack,
    inverse,
    kernel_basis,
    matrix_from_rows,
    rows_of,
    span_rank,
    stack_rows,
    unit_matrix,
    zero_matrix,
)
from nchilbert.exceptions import (
    ArityError,
    FieldMismatchError,
    FreeAlgebraRequiredError,
    LinearizedRelationError,
    RelationFailureError,
)
from nchilbert.freealg import NCPoly, apply_to_vector, differentiate, evaluate, iter_words_of_length
from nchilbert.orbits import IdealData, canonicalize, extract_ideal, normal_form_with_quotients
from nchilbert.points import PointData, krylov_basis, validate_point

logger = logging.getLogger("nc_hilbert.tangent")

STATUS_EXACT = "exact"
STATUS_TRUNCATED = "truncated"
STATUS_UNSTABLE = "unstable"


@dataclass(frozen=True)
class TangentVector:
    directions: Tuple[Matrix, ...]
    y: Matrix


@dataclass(frozen=True)
class BasedTangent:
    dimension: int
    basis: Tuple[TangentVector, ...]


@dataclass
class TangentReport:
    based_tangent_dim: int
    gl_dim: int
    hom_I_M_dim: Optional[int]
    hom_MM_dim: int
    ext1_MM_dim: Optional[int]
    status: str = STATUS_EXACT
    stabilization_degree: Optional[int] = None
    degree_dims: List[Tuple[int, int]] = dataclass_field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "based_tangent_dim": self.based_tangent_dim,
            "gl_dim": self.gl_dim,
            "hom_I_M_dim": self.hom_I_M_dim,
            "hom_MM_dim": self.hom_MM_dim,
            "ext1_MM_dim": self.ext1_MM_dim,
            "status": self.status,
            "stabilization_degree": self.stabilization_degree,
            "degree_dims": {str(d): dim for d, dim in self.degree_dims},
        }


def _flatten(matrices: Sequence[Matrix]) -> List[FieldValue]:
    return [value for M in matrices for row in rows_of(M) for value in row]


def _unit_directions(p: PointData, slot: int, i: int, j: int) -> List[Matrix]:
    directions = [zero_matrix(p.n, p.n, p.field) for _ in range(p.m)]
    directions[slot] = unit_matrix(p.n, p.n, i, j, p.field)
    return directions


def _linearized_relations(p: PointData, directions: Sequence[Matrix]) -> List[FieldValue]:
    return _flatten([differentiate(r.coerce(p.field), p.matrices, directions) for r in p.algebra.relations])


def _unpack(p: PointData, vector: Sequence[FieldValue]) -> TangentVector:
    n, size = p.n, p.n * p.n
    directions = tuple(
        matrix_from_rows(
            [list(vector[s * size + i * n: s * size + (i + 1) * n]) for i in range(n)], p.field
        )
        for s in range(p.m)
    )
    return TangentVector(directions, column(list(vector[p.m * size:]), p.field))


def based_tangent(p: PointData) -> BasedTangent:
    """Solutions (A', y') of d r(A)[A'] = 0 for every relation r; y' is unconstrained."""
    validate_point(p)
    unknowns = p.m * p.n * p.n + p.n
    field = p.field
    if p.algebra.is_free:
        vectors = []
        for index in range(unknowns):
            values = [field.zero] * unknowns
            values[index] = field.one
            vectors.append(values)
    else:
        columns = []
        for slot in range(p.m):
            for i in range(p.n):
                for j in range(p.n):
                    columns.append(_linearized_relations(p, _unit_directions(p, slot, i, j)))
        height = len(columns[0])
        columns.extend([[field.zero] * height for _ in range(p.n)])
        system = stack_rows(columns, height, field).transpose()
        vectors = [column_entries(v) for v in kernel_basis(system)]
    basis = tuple(_unpack(p, v) for v in vectors)
    return BasedTangent(len(basis), basis)


def _in_based_tangent(p: PointData, vector: TangentVector) -> bool:
    return not any(_linearized_relations(p, vector.directions))


def tangent_vector_to_hom(p: PointData, directions: Sequence[Matrix], y_prime: Matrix) -> List[Tuple[tuple, List[FieldValue]]]:
    """
    phi(g_b) = d g_b(A)[A'] y + g_b(A) y' for each border generator, in the
    basis {s(A)y : s in S} of M.
    """
    validate_point(p)
    if len(directions) != p.m:
        raise ArityError(f"need {p.m} direction matrices, got {len(directions)}")
    vector = TangentVector(tuple(directions), y_prime)
    if not _in_based_tangent(p, vector):
        raise LinearizedRelationError("(A', y') does not satisfy the linearized relations")
    return _hom_values(p, *_hom_frame(p), vector)


def _hom_frame(p: PointData) -> Tuple[IdealData, Matrix]:
    ideal = extract_ideal(canonicalize(p))
    return ideal, inverse(hstack(krylov_basis(p)[1]))


def _hom_values(p: PointData, ideal: IdealData, to_basis: Matrix, vector: TangentVector):
    values = []
    for b, g in ideal.generators:
        image = differentiate(g, p.matrices, vector.directions) * p.y + apply_to_vector(g, p.matrices, vector.y)
        values.append((b, column_entries(to_basis * image)))
    return values


def gl_direction_rank(p: PointData) -> int:
    """Rank of xi -> (([xi, A_s])_s, xi y) on gl_n."""
    vectors = []
    for i in range(p.n):
        for j in range(p.n):
            xi = unit_matrix(p.n, p.n, i, j, p.field)
            brackets = [commutator(xi, A) for A in p.matrices]
            vectors.append(_flatten(brackets) + column_entries(xi * p.y))
    return span_rank(vectors, p.m * p.n * p.n + p.n, p.field)


def gl_directions(p: PointData) -> List[TangentVector]:
    out = []
    for i in range(p.n):
        for j in range(p.n):
            xi = unit_matrix(p.n, p.n, i, j, p.field)
            out.append(TangentVector(tuple(commutator(xi, A) for A in p.matrices), xi * p.y))
    return out


def hom_route_rank(p: PointData) -> Tuple[int, int]:
    """Rank and kernel dimension of tangent_vector_to_hom on the based tangent space."""
    tangent = based_tangent(p)
    ideal, to_basis = _hom_frame(p)
    images = []
    for vector in tangent.basis:
        values = _hom_values(p, ideal, to_basis, vector)
        images.append([v for _, entries in values for v in entries])
    width = len(images[0]) if images else 0
    image_rank = span_rank(images, width, p.field) if images else 0
    return image_rank, tangent.dimension - image_rank


def _check_pair(p: PointData, q: PointData) -> None:
    if p.field != q.field:
        raise FieldMismatchError(f"modules over {p.field} and {q.field}")
    if p.m != q.m:
        raise ArityError(f"modules over algebras with {p.m} and {q.m} generators")


def _commutation_rank(p: PointData, q: PointData) -> int:
    """Rank of phi -> (A^q_s phi - phi A^p_s)_s on n_q x n_p matrices."""
    vectors = []
    for i in range(q.n):
        for j in range(p.n):
            phi = unit_matrix(q.n, p.n, i, j, p.field)
            vectors.append(_flatten([Aq * phi - phi * Ap for Ap, Aq in zip(p.matrices, q.matrices)]))
    return span_rank(vectors, p.m * q.n * p.n, p.field)


def hom_space_dim(p: PointData, q: PointData) -> int:
    """dim Hom_A(M_p, M_q): intertwiners phi with phi A^p_s = A^q_s phi."""
    _check_pair(p, q)
    if p.algebra != q.algebra:
        raise FieldMismatchError("modules over different algebras")
    return q.n * p.n - _commutation_rank(p, q)


def ext1_dim_free(p: PointData, q: PointData) -> int:
    """Cokernel dimension of the commutation map, i.e. Ext^1 over the free algebra."""
    _check_pair(p, q)
    if not (p.algebra.is_free and q.algebra.is_free):
        raise FreeAlgebraRequiredError("Ext^1 is only computed over the free algebra")
    return p.m * q.n * p.n - _commutation_rank(p, q)


def _relation_constraints(p: PointData, ideal: IdealData, relation: NCPoly, word) -> List[List[FieldValue]]:
    """Rows of sum_b h_b(A) phi_b where relation.word = sum_b h_b g_b."""
    product = relation * NCPoly.monomial(p.field, tuple(word))
    remainder, quotients = normal_form_with_quotients(product, ideal)
    if not remainder.is_zero():
        raise RelationFailureError("a relation does not lie in the ideal of the point")
    blocks = []
    for b, _ in ideal.generators:
        h = quotients.get(b)
        blocks.append(evaluate(h, p.matrices) if h is not None else zero_matrix(p.n, p.n, p.field))
    return rows_of(hstack(blocks))


def truncated_hom_dim(p: PointData, degree: int) -> int:
    """
    Dimension of the values (phi(g_b))_b in M with phi(r.v) = 0 for every
    relation r and word v with deg r + |v| <= degree.
    """
    return _truncated_dims(p, degree, degree)[-1][1]


def _truncated_dims(p: PointData, start: int, stop: int) -> List[Tuple[int, int]]:
    validate_point(p)
    ideal = extract_ideal(canonicalize(p))
    width = len(ideal.generators) * p.n
    relations = [r.coerce(p.field) for r in p.algebra.relations]
    constraints = EchelonBasis(p.field, width)
    added = {}
    dims = []
    for degree in range(0, stop + 1):
        for index, relation in enumerate(relations):
            length = degree - relation.degree
            if length < 0 or added.get(index, -1) >= length:
                continue
            for word in iter_words_of_length(p.m, length):
                for row in _relation_constraints(p, ideal, relation, word):
                    constraints.add(row)
            added[index] = length
        if degree >= start:
            dims.append((degree, width - constraints.rank))
    return dims


def tangent_dim(p: PointData, max_degree: Optional[int] = None) -> TangentReport:
    """
    Free algebra: hom_I_M = n - hom(M, M) + ext^1(M, M), always exact.
    With relations: the truncated Hom at d = n, n + 1, ... until two
    consecutive degrees agree, capped at max_degree (default 2n + 2).
    """
    validate_point(p)
    based = based_tangent(p).dimension
    hom_mm = hom_space_dim(p, p)
    if p.algebra.is_free:
        ext1 = ext1_dim_free(p, p)
        return TangentReport(based, p.n * p.n, p.n - hom_mm + ext1, hom_mm, ext1)

    cap = max_degree if max_degree is not None else 2 * p.n + 2
    dims = _truncated_dims(p, p.n, cap)
    for (degree, dim), (_, following) in zip(dims, dims[1:]):
        if dim == following:
            logger.debug("Truncated Hom stabilized at degree %d with dimension %d", degree, dim)
            return TangentReport(based, p.n * p.n, dim, hom_mm, None, STATUS_TRUNCATED, degree, dims)
    logger.warning("Truncated Hom did not stabilize up to degree %d", cap)
    return TangentReport(based, p.n * p.n, None, hom_mm, None, STATUS_UNSTABLE, None, dims)
