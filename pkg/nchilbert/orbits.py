"""
Canonical forms of GL_n-orbits and the left ideals they cut out.

canonicalize moves a valid point onto the slice where every Krylov basis
word s satisfies s(A)y = e_s; the remaining free data are the border
coefficients c_b of the words b = x_j.s that fall outside the basis. From a
canonical form the ideal generators g_b = b - sum c_{b,t} t are read off,
and point_from_ideal rebuilds the point from them.
"""
import logging
from dataclasses import dataclass, field as dataclass_field
from typing import Dict, List, Optional, Tuple

from nchilbert.core_linear import (
    FieldValue,
    entry,
    hstack,
    inverse,
    matrix_from_rows,
    standard_basis_vector,
)
from nchilbert.exceptions import (
    ArityError,
    FieldMismatchError,
    RelationFailureError,
    SupportConditionError,
)
from nchilbert.freealg import (
    EMPTY_WORD,
    AlgebraPresentation,
    NCPoly,
    Word,
    is_prefix_closed,
    lenlex_key,
    lenlex_less,
    sort_lenlex,
)
from nchilbert.points import (
    GroupElement,
    PointData,
    check_relations,
    gl_act,
    krylov_basis,
    validate_point,
)

logger = logging.getLogger("nc_hilbert.orbits")

Border = Tuple[Tuple[Word, Tuple[FieldValue, ...]], ...]


def border_words(basis_words, m: int) -> List[Word]:
    """Words x_j.s with s in S and x_j.s outside S, in length-lex order."""
    pool = set(basis_words)
    found = {
        (letter,) + s
        for s in basis_words
        for letter in range(1, m + 1)
        if (letter,) + s not in pool
    }
    return sort_lenlex(found)


@dataclass(frozen=True)
class CanonicalForm:
    algebra: AlgebraPresentation
    n: int
    basis_words: Tuple[Word, ...]
    border: Border
    canonical_point: Optional[PointData] = dataclass_field(default=None, compare=False, repr=False)

    @property
    def field(self):
        return self.algebra.field

    def border_map(self) -> Dict[Word, Tuple[FieldValue, ...]]:
        return dict(self.border)

    def coefficient(self, b: Word, t: Word) -> FieldValue:
        return self.border_map()[tuple(b)][self.basis_words.index(tuple(t))]


@dataclass(frozen=True)
class IdealData:
    """Generators g_b of the left ideal I = ker(A -> M, a -> a.v), keyed by border word."""

    algebra: AlgebraPresentation
    n: int
    basis_words: Tuple[Word, ...]
    generators: Tuple[Tuple[Word, NCPoly], ...]

    @property
    def field(self):
        return self.algebra.field

    def generator_map(self) -> Dict[Word, NCPoly]:
        return dict(self.generators)


def canonicalize(p: PointData) -> CanonicalForm:
    """Slice representative of the orbit of p and its border coefficients."""
    validate_point(p)
    words, vectors = krylov_basis(p)
    g = GroupElement(inverse(hstack(vectors)))
    q = gl_act(g, p)
    position = {w: index for index, w in enumerate(words)}
    border = []
    for b in border_words(words, p.m):
        letter, s = b[0], b[1:]
        # A'_j e_s = b(A')y' on the slice
        column = tuple(entry(q.matrices[letter - 1], i, position[s]) for i in range(p.n))
        border.append((b, column))
    return CanonicalForm(p.algebra, p.n, tuple(words), tuple(border), q)


def orbit_equal(p: PointData, q: PointData) -> bool:
    if p.field != q.field:
        raise FieldMismatchError(f"points over {p.field} and {q.field}")
    return canonicalize(p) == canonicalize(q)


def extract_ideal(c: CanonicalForm) -> IdealData:
    field = c.field
    generators = []
    for b, column in c.border:
        terms = [(b, field.one)]
        terms.extend((t, -value) for t, value in zip(c.basis_words, column))
        generators.append((b, NCPoly.from_terms(field, terms)))
    return IdealData(c.algebra, c.n, c.basis_words, tuple(generators))


def _split_at_border(word: Word, basis: set) -> Tuple[Word, Word]:
    """w = u.b with b the shortest suffix of w outside S."""
    for start in range(len(word) - 1, -1, -1):
        if word[start:] not in basis:
            return word[:start], word[start:]
    raise ValueError(f"{word} lies in the basis")


def _reduce(f: NCPoly, ideal: IdealData, quotients: Optional[Dict[Word, Dict[Word, FieldValue]]]) -> NCPoly:
    field = ideal.field
    if f.field != field:
        raise FieldMismatchError(f"polynomial over {f.field}, ideal over {field}")
    if f.max_letter() > ideal.algebra.m:
        raise ArityError(f"polynomial uses x_{f.max_letter()} but m = {ideal.algebra.m}")
    # rewriting only terminates when every g_b has terms t < b inside S
    rules = _check_support(ideal)
    basis = set(ideal.basis_words)
    current: Dict[Word, FieldValue] = f.as_dict()
    while True:
        reducible = [w for w in current if w not in basis]
        if not reducible:
            break
        w = max(reducible, key=lenlex_key)
        coefficient = current.pop(w)
        u, b = _split_at_border(w, basis)
        if quotients is not None:
            h = quotients.setdefault(b, {})
            h[u] = h.get(u, field.zero) + coefficient
        for t, c in rules[b].items():
            key = u + t
            value = current.get(key, field.zero) + coefficient * c
            if value:
                current[key] = value
            else:
                current.pop(key, None)
    return NCPoly._normalized(field, current)


def normal_form(f: NCPoly, ideal: IdealData) -> NCPoly:
    """
    Rewrites the length-lex-largest term outside S until none is left; every
    step replaces u.b by sum c_{b,t} u.t with t < b. The result is supported
    on S and is zero iff f lies in the ideal.
    """
    return _reduce(f, ideal, None)


def normal_form_with_quotients(f: NCPoly, ideal: IdealData) -> Tuple[NCPoly, Dict[Word, NCPoly]]:
    """Remainder r and quotients h_b with f = sum h_b g_b + r."""
    collected: Dict[Word, Dict[Word, FieldValue]] = {}
    remainder = _reduce(f, ideal, collected)
    field = ideal.field
    quotients = {b: NCPoly._normalized(field, h) for b, h in collected.items()}
    return remainder, {b: h for b, h in quotients.items() if not h.is_zero()}


def _check_support(ideal: IdealData) -> Dict[Word, Dict[Word, FieldValue]]:
    basis = ideal.basis_words
    if len(basis) != ideal.n or len(set(basis)) != ideal.n:
        raise SupportConditionError(f"expected {ideal.n} distinct basis words, got {len(basis)}")
    if EMPTY_WORD not in basis:
        raise SupportConditionError("the empty word must be a basis word")
    if not is_prefix_closed(basis):
        raise SupportConditionError("basis words must be closed under deleting the leftmost letter")
    if list(basis) != sort_lenlex(basis):
        raise SupportConditionError("basis words must be listed in length-lex order")
    expected = border_words(basis, ideal.algebra.m)
    given = ideal.generator_map()
    if set(given) != set(expected):
        missing = [b for b in expected if b not in given]
        extra = [b for b in given if b not in expected]
        raise SupportConditionError(f"generators do not match the border (missing {missing}, extra {extra})")
    pool = set(basis)
    coefficients = {}
    for b in expected:
        g = given[b]
        if g.field != ideal.field:
            raise FieldMismatchError(f"generator for {b} over {g.field}, ideal over {ideal.field}")
        if g.coefficient(b) != ideal.field.one:
            raise SupportConditionError(f"generator for {b} must have leading term exactly {b}")
        row = {}
        for w, c in g.terms:
            if w == b:
                continue
            if w not in pool or not lenlex_less(w, b):
                raise SupportConditionError(
                    f"generator for {b} has a term {w} outside the basis words below it"
                )
            row[w] = -c
        coefficients[b] = row
    return coefficients


def point_from_ideal(ideal: IdealData) -> PointData:
    """
    A_j e_s = e_{x_j s} when x_j s is a basis word, the border column c_b
    otherwise, and y = e_1. Fails on support violations and, for algebras
    with relations, when the matrices do not satisfy them.
    """
    coefficients = _check_support(ideal)
    field = ideal.field
    n = ideal.n
    position = {w: index for index, w in enumerate(ideal.basis_words)}
    matrices = []
    for letter in range(1, ideal.algebra.m + 1):
        rows = [[field.zero] * n for _ in range(n)]
        for s, col in position.items():
            target = (letter,) + s
            if target in position:
                rows[position[target]][col] = field.one
            else:
                for t, c in coefficients[target].items():
                    rows[position[t]][col] = c
        matrices.append(matrix_from_rows(rows, field))
    y = standard_basis_vector(n, 0, field)
    p = PointData(ideal.algebra, n, tuple(matrices), y)
    if not check_relations(p):
        raise RelationFailureError("the ideal does not define a module over the algebra")
    logger.debug("Rebuilt point from %d generators", len(ideal.generators))
    return p


def evaluate_on_canonical(c: CanonicalForm, f: NCPoly) -> List[FieldValue]:
    """Coordinates of f(A)y on the canonical point, read through the normal form."""
    reduced = normal_form(f.coerce(c.field), extract_ideal(c))
    return [reduced.coefficient(s) for s in c.basis_words]
