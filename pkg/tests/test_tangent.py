import pytest

from nchilbert.core_linear import column, matrix_from_rows, zero_matrix
from nchilbert.exceptions import (
    ArityError,
    FieldMismatchError,
    FreeAlgebraRequiredError,
    InvalidPointError,
    LinearizedRelationError,
)
from nchilbert.freealg import AlgebraPresentation, NCPoly
from nchilbert.orbits import canonicalize
from nchilbert.points import abelianization_point
from nchilbert.tangent import (
    STATUS_EXACT,
    STATUS_TRUNCATED,
    STATUS_UNSTABLE,
    based_tangent,
    ext1_dim_free,
    gl_direction_rank,
    gl_directions,
    hom_route_rank,
    hom_space_dim,
    tangent_dim,
    tangent_vector_to_hom,
    truncated_hom_dim,
)


@pytest.fixture
def commuting_point(Q, commutative_algebra, make_point):
    return make_point(commutative_algebra(2, Q), [[[0, 0], [0, 1]], [[2, 0], [0, 3]]], [1, 1])


@pytest.fixture
def canonical_nilpotent(Q, free_algebra, make_point):
    p = make_point(free_algebra(1, Q), [[[0, 1], [0, 0]]], [0, 1])
    return canonicalize(p).canonical_point


def _zero_directions(p):
    return [zero_matrix(p.n, p.n, p.field) for _ in range(p.m)]


def test_free_algebra_has_no_linearized_constraints(Q, free_algebra, sample_point):
    for m, n in [(1, 1), (2, 2), (3, 2)]:
        assert based_tangent(sample_point(free_algebra(m, Q), n)).dimension == m * n * n + n


def test_based_tangent_with_relations(Q, commutative_algebra, commuting_point):
    origin = abelianization_point(commutative_algebra(2, Q), [0, 0])
    assert based_tangent(origin).dimension == 3
    assert based_tangent(commuting_point).dimension == 8


def test_based_tangent_of_the_dual_numbers(Q, make_point):
    dual = AlgebraPresentation(1, Q, (NCPoly.monomial(Q, (1, 1)),))
    p = make_point(dual, [[[0, 1], [0, 0]]], [0, 1])
    # A A' + A' A = 0 leaves two directions for A' and all of y'
    assert based_tangent(p).dimension == 4
    report = tangent_dim(p)
    assert report.hom_I_M_dim == 0
    assert report.status == STATUS_TRUNCATED


def test_based_tangent_needs_a_valid_point(Q, free_algebra, make_point):
    with pytest.raises(InvalidPointError):
        based_tangent(make_point(free_algebra(1, Q), [[[1, 0], [0, 1]]], [1, 0]))


def test_hom_values_on_the_square_ideal(Q, canonical_nilpotent):
    # canonical point of k[x]/(x^2): A = e_2 e_1^T, y = e_1
    assert canonical_nilpotent.matrices[0] == matrix_from_rows([[0, 0], [1, 0]], Q)
    direction = matrix_from_rows([[0, 0], [0, 1]], Q)
    values = tangent_vector_to_hom(canonical_nilpotent, [direction], zero_matrix(2, 1, Q))
    assert values == [((1, 1), [Q(0), Q(1)])]


def test_zero_vector_gives_the_zero_map(F5, free_algebra, sample_point):
    p = sample_point(free_algebra(2, F5), 3)
    values = tangent_vector_to_hom(p, _zero_directions(p), zero_matrix(3, 1, F5))
    assert all(not any(entries) for _, entries in values)
    assert len(values) == 2 * 3 - 2


def test_gl_directions_map_to_zero(F5, free_algebra, sample_point, commuting_point):
    for p in (sample_point(free_algebra(2, F5), 2), commuting_point):
        for vector in gl_directions(p):
            values = tangent_vector_to_hom(p, vector.directions, vector.y)
            assert all(not any(entries) for _, entries in values)


def test_linearized_relations_are_enforced(Q, commuting_point):
    E12 = matrix_from_rows([[0, 1], [0, 0]], Q)
    with pytest.raises(LinearizedRelationError):
        tangent_vector_to_hom(commuting_point, [E12, zero_matrix(2, 2, Q)], column([0, 0], Q))
    with pytest.raises(ArityError):
        tangent_vector_to_hom(commuting_point, [E12], column([0, 0], Q))


def test_hom_space_dimensions(Q, free_algebra, make_point):
    algebra = free_algebra(1, Q)
    scalar = make_point(algebra, [[[5]]], [1])
    assert hom_space_dim(scalar, scalar) == 1
    nilpotent = make_point(algebra, [[[0, 1], [0, 0]]], [0, 1])
    assert hom_space_dim(nilpotent, nilpotent) == 2
    p = make_point(algebra, [[[0, 0], [0, 1]]], [1, 1])
    q = make_point(algebra, [[[2, 0], [0, 3]]], [1, 1])
    assert hom_space_dim(p, q) == 0
    assert ext1_dim_free(p, q) == 0


def test_hom_space_needs_matching_modules(Q, F3, free_algebra, commutative_algebra, make_point):
    p = make_point(free_algebra(2, Q), [[[1]], [[2]]], [1])
    with pytest.raises(FieldMismatchError):
        hom_space_dim(p, make_point(free_algebra(2, F3), [[[1]], [[2]]], [1]))
    with pytest.raises(ArityError):
        hom_space_dim(p, make_point(free_algebra(1, Q), [[[1]]], [1]))
    with pytest.raises(FieldMismatchError):
        hom_space_dim(p, make_point(commutative_algebra(2, Q), [[[1]], [[2]]], [1]))


def test_ext1_of_single_points(Q, free_algebra, make_point):
    p1 = make_point(free_algebra(1, Q), [[[4]]], [1])
    assert ext1_dim_free(p1, p1) == 1
    p2 = make_point(free_algebra(2, Q), [[[4]], [[-1]]], [1])
    assert hom_space_dim(p2, p2) == 1
    assert ext1_dim_free(p2, p2) == 2


def test_ext1_needs_the_free_algebra(commuting_point):
    with pytest.raises(FreeAlgebraRequiredError):
        ext1_dim_free(commuting_point, commuting_point)


def test_euler_form(F5, free_algebra, sample_point):
    for m in (1, 2, 3):
        for n_p, n_q in [(1, 2), (2, 2), (3, 1), (2, 3)]:
            p = sample_point(free_algebra(m, F5), n_p)
            q = sample_point(free_algebra(m, F5), n_q)
            assert hom_space_dim(p, q) - ext1_dim_free(p, q) == (1 - m) * n_p * n_q


def _check_smooth(p):
    m, n = p.m, p.n
    report = tangent_dim(p)
    assert report.status == STATUS_EXACT
    assert report.hom_I_M_dim == (m - 1) * n * n + n
    assert report.based_tangent_dim - gl_direction_rank(p) == report.hom_I_M_dim
    assert gl_direction_rank(p) == n * n
    image, kernel = hom_route_rank(p)
    assert image == report.hom_I_M_dim
    assert kernel == n * n


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_free_algebra_is_smooth(m, n, Q, F5, free_algebra, sample_point):
    for field in (Q, F5):
        for _ in range(2):
            _check_smooth(sample_point(free_algebra(m, field), n))


@pytest.mark.slow
@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_free_algebra_is_smooth_everywhere_sampled(m, n, F5, free_algebra, sample_point):
    for _ in range(100):
        _check_smooth(sample_point(free_algebra(m, F5), n))


def test_tangent_report_for_k_x_y(Q, commutative_algebra, commuting_point):
    report = tangent_dim(commuting_point)
    assert report.status == STATUS_TRUNCATED
    assert report.hom_I_M_dim == 4
    assert report.stabilization_degree == 2
    assert report.based_tangent_dim - report.gl_dim == report.hom_I_M_dim
    assert report.ext1_MM_dim is None
    assert report.as_dict()["degree_dims"]["2"] == 4

    origin = tangent_dim(abelianization_point(commutative_algebra(2, Q), [0, 0]))
    assert (origin.based_tangent_dim, origin.hom_I_M_dim) == (3, 2)


def test_truncated_hom_dims(commuting_point):
    # three border generators with values in k^2, no relation fits below degree 2
    assert truncated_hom_dim(commuting_point, 1) == 6
    assert truncated_hom_dim(commuting_point, 2) == 4


def test_unstable_truncation_is_reported(commuting_point):
    report = tangent_dim(commuting_point, max_degree=2)
    assert report.status == STATUS_UNSTABLE
    assert report.hom_I_M_dim is None
    assert report.as_dict()["status"] == "unstable"
