"""
Cells of H^[n]_{F_m}, their point-count polynomial and the finite-field
census that checks it.
"""
import logging
from dataclasses import dataclass, field as dataclass_field
from itertools import product
from typing import Dict, Iterator, List, Sequence, Tuple

from nchilbert.census import CensusResult, gl_order, run_census
from nchilbert.core_linear import ScalarField
from nchilbert.exceptions import ArityError, NotAQuotientError, UnsupportedFieldError
from nchilbert.freealg import EMPTY_WORD, AlgebraPresentation, NCPoly, Word, lenlex_key, lenlex_less
from nchilbert.orbits import IdealData, border_words
from nchilbert.points import check_relations

logger = logging.getLogger("nc_hilbert.cells")

__all__ = [
    "Cell",
    "CountPolynomial",
    "FitReport",
    "EmbeddingReport",
    "enumerate_cells",
    "cell_dimension",
    "count_polynomial",
    "census",
    "gl_order",
    "cell_ideals",
    "polynomial_fit",
    "polynomial_fit_check",
    "check_closed_embedding",
]


@dataclass(frozen=True)
class Cell:
    basis_words: Tuple[Word, ...]
    dimension: int

    def as_dict(self) -> dict:
        return {"basis_words": [list(w) for w in self.basis_words], "dimension": self.dimension}


@dataclass(frozen=True)
class CountPolynomial:
    """Integer polynomial in q, stored as (exponent, coefficient) pairs by decreasing exponent."""

    coefficients: Tuple[Tuple[int, int], ...]

    @classmethod
    def from_exponents(cls, exponents: Sequence[int]) -> "CountPolynomial":
        counts: Dict[int, int] = {}
        for e in exponents:
            counts[e] = counts.get(e, 0) + 1
        return cls(tuple(sorted(counts.items(), reverse=True)))

    def evaluate(self, q: int) -> int:
        return sum(c * q ** e for e, c in self.coefficients)

    @property
    def degree(self) -> int:
        return self.coefficients[0][0] if self.coefficients else 0

    @property
    def leading_coefficient(self) -> int:
        return self.coefficients[0][1] if self.coefficients else 0

    def as_dict(self) -> Dict[str, int]:
        return {str(e): c for e, c in self.coefficients}

    def __str__(self) -> str:
        parts = []
        for e, c in self.coefficients:
            monomial = "1" if e == 0 else ("q" if e == 1 else f"q^{e}")
            parts.append(monomial if c == 1 else f"{c}*{monomial}")
        return " + ".join(parts) or "0"


def cell_dimension(basis_words: Sequence[Word], m: int) -> int:
    """Sum over border words b of #{t in S : t < b}."""
    return sum(
        sum(1 for t in basis_words if lenlex_less(t, b))
        for b in border_words(basis_words, m)
    )


def _grow(current: List[Word], n: int, m: int) -> Iterator[Tuple[Word, ...]]:
    # words are added in increasing length-lex order, each a child of an earlier one
    if len(current) == n:
        yield tuple(current)
        return
    top = lenlex_key(current[-1])
    children = sorted(
        {
            (letter,) + s
            for s in current
            for letter in range(1, m + 1)
            if lenlex_key((letter,) + s) > top
        },
        key=lenlex_key,
    )
    for child in children:
        yield from _grow(current + [child], n, m)


def enumerate_cells(m: int, n: int) -> List[Cell]:
    """All prefix-closed n-sets of words containing the empty word."""
    if m < 1 or n < 1:
        raise ArityError("m and n must be positive")
    cells = [Cell(words, cell_dimension(words, m)) for words in _grow([EMPTY_WORD], n, m)]
    cells.sort(key=lambda c: [lenlex_key(w) for w in c.basis_words])
    return cells


def count_polynomial(m: int, n: int) -> CountPolynomial:
    return CountPolynomial.from_exponents([c.dimension for c in enumerate_cells(m, n)])


def census(algebra: AlgebraPresentation, n: int, q: int, **options) -> CensusResult:
    return run_census(algebra, n, q, **options)


def cell_ideals(cell: Cell, m: int, field: ScalarField) -> Iterator[IdealData]:
    """Every ideal of the cell over a finite field, free coefficients in odometer order."""
    if not field.is_finite:
        raise UnsupportedFieldError("cells are only enumerated over finite fields")
    algebra = AlgebraPresentation.free(m, field)
    borders = border_words(cell.basis_words, m)
    slots = [(b, t) for b in borders for t in cell.basis_words if lenlex_less(t, b)]
    for values in product(list(field.elements()), repeat=len(slots)):
        terms: Dict[Word, List[Tuple[Word, object]]] = {b: [(b, field.one)] for b in borders}
        for (b, t), value in zip(slots, values):
            terms[b].append((t, -value))
        generators = tuple((b, NCPoly.from_terms(field, terms[b])) for b in borders)
        yield IdealData(algebra, len(cell.basis_words), cell.basis_words, generators)


@dataclass
class FitReport:
    m: int
    n: int
    polynomial: CountPolynomial
    rows: List[Tuple[int, int, int]] = dataclass_field(default_factory=list)

    def __bool__(self) -> bool:
        return all(counted == predicted for _, counted, predicted in self.rows)

    def as_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "polynomial": self.polynomial.as_dict(),
            "primes": {str(q): {"census": c, "polynomial": p} for q, c, p in self.rows},
            "fits": bool(self),
        }


def polynomial_fit(m: int, n: int, primes: Sequence[int], **options) -> FitReport:
    polynomial = count_polynomial(m, n)
    report = FitReport(m, n, polynomial)
    for q in primes:
        algebra = AlgebraPresentation.free(m, ScalarField.prime(q))
        counted = run_census(algebra, n, q, **options).orbit_count
        report.rows.append((q, counted, polynomial.evaluate(q)))
        logger.info("q=%d census %d polynomial %d", q, counted, polynomial.evaluate(q))
    return report


def polynomial_fit_check(m: int, n: int, primes: Sequence[int], **options) -> bool:
    return bool(polynomial_fit(m, n, primes, **options))


def _monic(relation: NCPoly) -> NCPoly:
    return relation.scale(relation.field.one / relation.terms[-1][1])


@dataclass
class EmbeddingReport:
    orbit_count_a: int
    orbit_count_b: int
    forms_checked: int
    failures: int

    def __bool__(self) -> bool:
        return self.failures == 0 and self.orbit_count_b <= self.orbit_count_a

    def as_dict(self) -> dict:
        return {
            "orbit_count_a": self.orbit_count_a,
            "orbit_count_b": self.orbit_count_b,
            "forms_checked": self.forms_checked,
            "failures": self.failures,
            "closed_embedding": bool(self),
        }


def check_closed_embedding(
    algebra_a: AlgebraPresentation, algebra_b: AlgebraPresentation, n: int, q: int, **options
) -> EmbeddingReport:
    """
    B = A / (extra relations): every orbit found by the census of B must be
    a point of A, and B cannot have more orbits than A.
    """
    target = ScalarField.prime(q)
    a = algebra_a.with_field(target)
    b = algebra_b.with_field(target)
    if a.m != b.m:
        raise NotAQuotientError(f"algebras with {a.m} and {b.m} generators")
    relations_b = {_monic(r) for r in b.relations}
    missing = [r for r in a.relations if _monic(r) not in relations_b]
    if missing:
        raise NotAQuotientError(f"relation {missing[0]} of A is not a relation of B")
    options = dict(options, collect_forms=True)
    result_b = run_census(b, n, q, **options)
    failures = sum(1 for form in result_b.forms if not check_relations(form.with_algebra(a)))
    result_a = run_census(a, n, q, **{k: v for k, v in options.items() if k != "collect_forms"})
    return EmbeddingReport(result_a.orbit_count, result_b.orbit_count, len(result_b.forms), failures)
