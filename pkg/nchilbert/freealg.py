"""
Words and noncommutative polynomials in the free algebra F_m = k<x_1..x_m>.

A word is a tuple of 1-based generator indices written left to right. The
word x_{i1}...x_{ik} evaluates to the product A_{i1}...A_{ik} and acts on a
vector with its rightmost letter first. Word trees grow by prepending a
letter, so "prefix-closed" means closed under deleting the leftmost letter.
"""
from dataclasses import dataclass, field as dataclass_field
from itertools import product
from typing import Dict, Iterable, Iterator, List, Mapping, Sequence, Tuple

from nchilbert.core_linear import (
    FieldValue,
    Matrix,
    ScalarField,
    identity,
    require_same_field,
    require_square,
    zero_matrix,
)
from nchilbert.exceptions import ArityError, FieldMismatchError, ShapeError

Word = Tuple[int, ...]

EMPTY_WORD: Word = ()


def lenlex_key(word: Word) -> Tuple[int, Word]:
    """Sort key of the length-lex order: shorter first, then x_1 < ... < x_m."""
    return (len(word), word)


def lenlex_less(u: Word, v: Word) -> bool:
    return lenlex_key(u) < lenlex_key(v)


def sort_lenlex(words: Iterable[Word]) -> List[Word]:
    return sorted(words, key=lenlex_key)


def words_up_to(m: int, max_length: int) -> List[Word]:
    """All words of length <= max_length, in length-lex order."""
    words: List[Word] = []
    for length in range(max_length + 1):
        words.extend(product(range(1, m + 1), repeat=length))
    return words


def is_prefix_closed(words: Iterable[Word]) -> bool:
    """Closed under deleting the leftmost letter."""
    pool = set(words)
    return all(w[1:] in pool for w in pool if w)


def validate_word(word: Sequence[int], m: int) -> Word:
    word = tuple(int(letter) for letter in word)
    for letter in word:
        if not 1 <= letter <= m:
            raise ArityError(f"letter x_{letter} outside x_1..x_{m}")
    return word


def format_word(word: Word) -> str:
    if not word:
        return "1"
    return "*".join(f"x{letter}" for letter in word)


@dataclass(frozen=True)
class NCPoly:
    """Finite k-linear combination of words; terms are kept length-lex sorted."""

    field: ScalarField
    terms: Tuple[Tuple[Word, FieldValue], ...] = ()

    @classmethod
    def from_mapping(cls, field: ScalarField, mapping: Mapping[Word, FieldValue]) -> "NCPoly":
        merged: Dict[Word, FieldValue] = {}
        for word, coefficient in mapping.items():
            merged[tuple(word)] = field(coefficient)
        return cls._normalized(field, merged)

    @classmethod
    def from_terms(cls, field: ScalarField, terms: Iterable[Tuple[Word, FieldValue]]) -> "NCPoly":
        merged: Dict[Word, FieldValue] = {}
        for word, coefficient in terms:
            word = tuple(word)
            merged[word] = merged.get(word, field.zero) + field(coefficient)
        return cls._normalized(field, merged)

    @classmethod
    def _normalized(cls, field: ScalarField, mapping: Mapping[Word, FieldValue]) -> "NCPoly":
        kept = [(w, c) for w, c in mapping.items() if c]
        kept.sort(key=lambda item: lenlex_key(item[0]))
        return cls(field, tuple(kept))

    @classmethod
    def monomial(cls, field: ScalarField, word: Word, coefficient: FieldValue = 1) -> "NCPoly":
        return cls.from_terms(field, [(word, coefficient)])

    @classmethod
    def zero(cls, field: ScalarField) -> "NCPoly":
        return cls(field, ())

    def as_dict(self) -> Dict[Word, FieldValue]:
        return dict(self.terms)

    def words(self) -> List[Word]:
        return [w for w, _ in self.terms]

    def coefficient(self, word: Word) -> FieldValue:
        return self.as_dict().get(tuple(word), self.field.zero)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def leading_word(self) -> Word:
        if not self.terms:
            raise ValueError("the zero polynomial has no leading word")
        return self.terms[-1][0]

    @property
    def degree(self) -> int:
        return max((len(w) for w, _ in self.terms), default=0)

    def max_letter(self) -> int:
        return max((max(w) for w, _ in self.terms if w), default=0)

    def _check(self, other: "NCPoly") -> None:
        if other.field != self.field:
            raise FieldMismatchError(f"polynomials over {self.field} and {other.field}")

    def __add__(self, other: "NCPoly") -> "NCPoly":
        self._check(other)
        return NCPoly.from_terms(self.field, list(self.terms) + list(other.terms))

    def __neg__(self) -> "NCPoly":
        return NCPoly(self.field, tuple((w, -c) for w, c in self.terms))

    def __sub__(self, other: "NCPoly") -> "NCPoly":
        return self + (-other)

    def __mul__(self, other: "NCPoly") -> "NCPoly":
        self._check(other)
        return NCPoly.from_terms(
            self.field,
            [(u + v, a * b) for u, a in self.terms for v, b in other.terms],
        )

    def scale(self, scalar: FieldValue) -> "NCPoly":
        return NCPoly._normalized(self.field, {w: scalar * c for w, c in self.terms})

    def left_multiply_word(self, word: Word) -> "NCPoly":
        return NCPoly(self.field, tuple(sorted(
            ((tuple(word) + w, c) for w, c in self.terms),
            key=lambda item: lenlex_key(item[0]),
        )))

    def coerce(self, target: ScalarField) -> "NCPoly":
        """Reinterpret the coefficients in ``target`` (identity or Q -> F_p)."""
        if target == self.field:
            return self
        return NCPoly._normalized(
            target, {w: target.reduce(c, self.field) for w, c in self.terms}
        )

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for word, coefficient in reversed(self.terms):
            scalar = self.field.encode(coefficient)
            parts.append(f"{scalar}*{format_word(word)}")
        return " + ".join(parts)


@dataclass(frozen=True)
class AlgebraPresentation:
    """A = F_m / R for a finite list of relations over a field."""

    m: int
    field: ScalarField
    relations: Tuple[NCPoly, ...] = dataclass_field(default=())

    def __post_init__(self):
        if self.m < 1:
            raise ArityError("an algebra needs at least one generator")
        for index, relation in enumerate(self.relations):
            if relation.is_zero():
                raise ArityError(f"relation {index} is the zero polynomial")
            if relation.field != self.field:
                raise FieldMismatchError(
                    f"relation {index} is over {relation.field}, algebra over {self.field}"
                )
            if relation.max_letter() > self.m:
                raise ArityError(
                    f"relation {index} uses x_{relation.max_letter()} but m = {self.m}"
                )

    @classmethod
    def free(cls, m: int, field: ScalarField) -> "AlgebraPresentation":
        return cls(m, field, ())

    @property
    def is_free(self) -> bool:
        return not self.relations

    def with_field(self, target: ScalarField) -> "AlgebraPresentation":
        """The same presentation with coefficients reduced into ``target``."""
        if target == self.field:
            return self
        return AlgebraPresentation(
            self.m, target, tuple(r.coerce(target) for r in self.relations)
        )


def commutative_polynomial_ring(m: int, field: ScalarField) -> AlgebraPresentation:
    """k[x_1..x_m] presented by the commutators x_i x_j - x_j x_i, i < j."""
    relations = [
        NCPoly.from_terms(field, [((i, j), 1), ((j, i), -1)])
        for i in range(1, m + 1)
        for j in range(i + 1, m + 1)
    ]
    return AlgebraPresentation(m, field, tuple(relations))


def _check_tuple(matrices: Sequence[Matrix], needed: int) -> Tuple[int, ScalarField]:
    if not matrices:
        raise ArityError("at least one matrix is required")
    if needed > len(matrices):
        raise ArityError(f"word uses x_{needed} but only {len(matrices)} matrices given")
    field = require_same_field(*matrices)
    size = require_square(matrices[0])
    for M in matrices:
        if M.shape != (size, size):
            raise ShapeError("all matrices must share one square shape")
    return size, field


def evaluate_word(word: Word, matrices: Sequence[Matrix]) -> Matrix:
    size, field = _check_tuple(matrices, max(word, default=0))
    result = identity(size, field)
    for letter in word:
        result = result * matrices[letter - 1]
    return result


def evaluate(f: NCPoly, matrices: Sequence[Matrix]) -> Matrix:
    """f(A_1, ..., A_m); the empty word evaluates to the identity."""
    size, field = _check_tuple(matrices, f.max_letter())
    if f.field != field:
        raise FieldMismatchError(f"polynomial over {f.field}, matrices over {field}")
    total = zero_matrix(size, size, field)
    for word, coefficient in f.terms:
        total = total + evaluate_word(word, matrices).mul(coefficient)
    return total


def apply_word_to_vector(word: Word, matrices: Sequence[Matrix], y: Matrix) -> Matrix:
    """w(A) y, folding letters from the rightmost one leftward."""
    size, field = _check_tuple(matrices, max(word, default=0))
    require_same_field(matrices[0], y)
    if y.shape != (size, 1):
        raise ShapeError(f"vector must be {size}x1, got {y.shape}")
    vector = y
    for letter in reversed(word):
        vector = matrices[letter - 1] * vector
    return vector


def apply_to_vector(f: NCPoly, matrices: Sequence[Matrix], y: Matrix) -> Matrix:
    size, field = _check_tuple(matrices, f.max_letter())
    if f.field != field:
        raise FieldMismatchError(f"polynomial over {f.field}, matrices over {field}")
    total = zero_matrix(size, 1, field)
    for word, coefficient in f.terms:
        total = total + apply_word_to_vector(word, matrices, y).mul(coefficient)
    return total


def differentiate_word(word: Word, matrices: Sequence[Matrix], directions: Sequence[Matrix]) -> Matrix:
    """
    Directional derivative of w(A) along A':
    sum over positions j of A_{i1}..A_{i(j-1)} A'_{ij} A_{i(j+1)}..A_{ik}.
    """
    if len(matrices) != len(directions):
        raise ArityError(f"{len(matrices)} matrices but {len(directions)} directions")
    size, field = _check_tuple(matrices, max(word, default=0))
    _check_tuple(list(matrices) + list(directions), 0)
    total = zero_matrix(size, size, field)
    # prefix[j] = A_{i1}..A_{ij}; suffix products are rebuilt right to left
    prefixes = [identity(size, field)]
    for letter in word:
        prefixes.append(prefixes[-1] * matrices[letter - 1])
    suffix = identity(size, field)
    for position in range(len(word) - 1, -1, -1):
        letter = word[position]
        total = total + prefixes[position] * directions[letter - 1] * suffix
        suffix = matrices[letter - 1] * suffix
    return total


def differentiate(f: NCPoly, matrices: Sequence[Matrix], directions: Sequence[Matrix]) -> Matrix:
    size, field = _check_tuple(list(matrices), f.max_letter())
    if f.field != field:
        raise FieldMismatchError(f"polynomial over {f.field}, matrices over {field}")
    total = zero_matrix(size, size, field)
    for word, coefficient in f.terms:
        total = total + differentiate_word(word, matrices, directions).mul(coefficient)
    return total


def iter_words_of_length(m: int, length: int) -> Iterator[Word]:
    return product(range(1, m + 1), repeat=length)
