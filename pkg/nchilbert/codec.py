"""
JSON forms of the domain values.

Scalars are "a/b" strings over Q and residues over F_p, words are arrays of
1-based generator indices, polynomials are lists of {"coeff", "word"} terms in
length-lex order. Decoders report the JSON path of the offending value.
"""
from typing import Any, Dict, List

from nchilbert.core_linear import ScalarField, column, column_entries, matrix_from_rows, rows_of
from nchilbert.exceptions import DocumentError, HilbertError
from nchilbert.freealg import AlgebraPresentation, NCPoly, Word
from nchilbert.orbits import CanonicalForm, IdealData
from nchilbert.points import ChartIndex, PointData


def _expect(value: Any, kind, path: str, label: str):
    if not isinstance(value, kind) or isinstance(value, bool):
        raise DocumentError(f"expected {label}", path)
    return value


def _scalar(field: ScalarField, value: Any, path: str):
    try:
        return field(value)
    except HilbertError as exc:
        raise type(exc)(exc.message, path) from exc


def unwrap(document: Any) -> Any:
    """Strips a {"status", "payload", "diagnostics"} command envelope."""
    if isinstance(document, dict) and "payload" in document and "status" in document:
        return document["payload"]
    return document


def encode_field(field: ScalarField) -> Dict[str, Any]:
    if field.is_finite:
        return {"kind": "Fp", "p": field.characteristic}
    return {"kind": "Q"}


def decode_field(data: Any, path: str = "$.field") -> ScalarField:
    if data is None:
        return ScalarField.rationals()
    _expect(data, dict, path, "an object with a 'kind'")
    kind = data.get("kind")
    if kind == "Q":
        return ScalarField.rationals()
    if kind == "Fp":
        p = _expect(data.get("p"), int, f"{path}.p", "an integer prime")
        try:
            return ScalarField.prime(p)
        except HilbertError as exc:
            raise type(exc)(exc.message, f"{path}.p") from exc
    raise DocumentError(f"unknown field kind {kind!r}", f"{path}.kind")


def encode_word(word: Word) -> List[int]:
    return list(word)


def decode_word(data: Any, m: int, path: str) -> Word:
    _expect(data, list, path, "an array of generator indices")
    word = []
    for index, letter in enumerate(data):
        _expect(letter, int, f"{path}[{index}]", "an integer generator index")
        if not 1 <= letter <= m:
            raise DocumentError(f"generator index {letter} outside 1..{m}", f"{path}[{index}]")
        word.append(letter)
    return tuple(word)


def encode_poly(f: NCPoly) -> List[Dict[str, Any]]:
    return [{"coeff": f.field.encode(c), "word": encode_word(w)} for w, c in f.terms]


def decode_poly(data: Any, field: ScalarField, m: int, path: str) -> NCPoly:
    _expect(data, list, path, "an array of terms")
    terms = []
    for index, term in enumerate(data):
        here = f"{path}[{index}]"
        _expect(term, dict, here, "a term object with 'coeff' and 'word'")
        if "coeff" not in term or "word" not in term:
            raise DocumentError("terms need 'coeff' and 'word'", here)
        terms.append((decode_word(term["word"], m, f"{here}.word"), _scalar(field, term["coeff"], f"{here}.coeff")))
    return NCPoly.from_terms(field, terms)


def encode_algebra(algebra: AlgebraPresentation) -> Dict[str, Any]:
    return {
        "m": algebra.m,
        "field": encode_field(algebra.field),
        "relations": [encode_poly(r) for r in algebra.relations],
    }


def decode_algebra(data: Any, path: str = "$") -> AlgebraPresentation:
    data = unwrap(data)
    _expect(data, dict, path, "an algebra object")
    if "m" not in data and "algebra" in data:
        return decode_algebra(data["algebra"], f"{path}.algebra")
    m = _expect(data.get("m"), int, f"{path}.m", "a positive integer 'm'")
    if m < 1:
        raise DocumentError("m must be positive", f"{path}.m")
    field = decode_field(data.get("field"), f"{path}.field")
    raw = _expect(data.get("relations", []), list, f"{path}.relations", "an array of relations")
    relations = tuple(decode_poly(r, field, m, f"{path}.relations[{i}]") for i, r in enumerate(raw))
    try:
        return AlgebraPresentation(m, field, relations)
    except HilbertError as exc:
        raise type(exc)(exc.message, f"{path}.relations") from exc


def encode_matrix(M, field: ScalarField) -> List[List[Any]]:
    return [[field.encode(v) for v in row] for row in rows_of(M)]


def encode_point(p: PointData) -> Dict[str, Any]:
    return {
        "algebra": encode_algebra(p.algebra),
        "n": p.n,
        "matrices": [encode_matrix(M, p.field) for M in p.matrices],
        "y": [p.field.encode(v) for v in column_entries(p.y)],
    }


def _decode_rows(data: Any, field: ScalarField, n: int, path: str):
    _expect(data, list, path, f"an {n}x{n} array")
    if len(data) != n:
        raise DocumentError(f"expected {n} rows, got {len(data)}", path)
    rows = []
    for i, row in enumerate(data):
        _expect(row, list, f"{path}[{i}]", f"a row of length {n}")
        if len(row) != n:
            raise DocumentError(f"expected {n} entries, got {len(row)}", f"{path}[{i}]")
        rows.append([_scalar(field, v, f"{path}[{i}][{j}]") for j, v in enumerate(row)])
    return matrix_from_rows(rows, field)


def decode_point(data: Any, path: str = "$") -> PointData:
    """Accepts a point, a canonical form, or a command result carrying either."""
    data = unwrap(data)
    _expect(data, dict, path, "a point object")
    if "point" in data:
        return decode_point(data["point"], f"{path}.point")
    if "canonical_form" in data:
        return decode_point(data["canonical_form"], f"{path}.canonical_form")
    if "canonical_point" in data:
        return decode_point(data["canonical_point"], f"{path}.canonical_point")
    algebra = decode_algebra(data.get("algebra"), f"{path}.algebra")
    n = _expect(data.get("n"), int, f"{path}.n", "a positive integer 'n'")
    if n < 1:
        raise DocumentError("n must be positive", f"{path}.n")
    raw = _expect(data.get("matrices"), list, f"{path}.matrices", "an array of matrices")
    if len(raw) != algebra.m:
        raise DocumentError(f"expected {algebra.m} matrices, got {len(raw)}", f"{path}.matrices")
    field = algebra.field
    matrices = tuple(_decode_rows(M, field, n, f"{path}.matrices[{s}]") for s, M in enumerate(raw))
    y = _expect(data.get("y"), list, f"{path}.y", f"an array of length {n}")
    if len(y) != n:
        raise DocumentError(f"expected {n} entries, got {len(y)}", f"{path}.y")
    vector = column([_scalar(field, v, f"{path}.y[{i}]") for i, v in enumerate(y)], field)
    return PointData(algebra, n, matrices, vector)


def encode_canonical_form(c: CanonicalForm) -> Dict[str, Any]:
    field = c.field
    data = {
        "algebra": encode_algebra(c.algebra),
        "n": c.n,
        "basis_words": [encode_word(w) for w in c.basis_words],
        "border": [
            {"word": encode_word(b), "coefficients": [field.encode(v) for v in col]}
            for b, col in c.border
        ],
    }
    if c.canonical_point is not None:
        data["canonical_point"] = encode_point(c.canonical_point)
    return data


def encode_ideal(ideal: IdealData) -> Dict[str, Any]:
    return {
        "algebra": encode_algebra(ideal.algebra),
        "n": ideal.n,
        "basis_words": [encode_word(w) for w in ideal.basis_words],
        "generators": [{"border": encode_word(b), "poly": encode_poly(g)} for b, g in ideal.generators],
    }


def decode_ideal(data: Any, path: str = "$") -> IdealData:
    data = unwrap(data)
    _expect(data, dict, path, "an ideal object")
    if "ideal" in data:
        return decode_ideal(data["ideal"], f"{path}.ideal")
    algebra = decode_algebra(data.get("algebra"), f"{path}.algebra")
    m, field = algebra.m, algebra.field
    n = _expect(data.get("n"), int, f"{path}.n", "a positive integer 'n'")
    raw_words = _expect(data.get("basis_words"), list, f"{path}.basis_words", "an array of words")
    words = tuple(decode_word(w, m, f"{path}.basis_words[{i}]") for i, w in enumerate(raw_words))
    raw = _expect(data.get("generators"), list, f"{path}.generators", "an array of generators")
    generators = []
    for i, item in enumerate(raw):
        here = f"{path}.generators[{i}]"
        _expect(item, dict, here, "an object with 'border' and 'poly'")
        border = decode_word(item.get("border"), m, f"{here}.border")
        generators.append((border, decode_poly(item.get("poly"), field, m, f"{here}.poly")))
    return IdealData(algebra, n, words, tuple(generators))


def decode_chart(data: Any, field: ScalarField, m: int, path: str = "$") -> ChartIndex:
    """A chart is an array of polynomials; a bare word array is read as a monomial."""
    data = unwrap(data)
    _expect(data, list, path, "an array of polynomials")
    chart = []
    for i, entry in enumerate(data):
        here = f"{path}[{i}]"
        if isinstance(entry, list) and all(isinstance(v, int) and not isinstance(v, bool) for v in entry):
            chart.append(NCPoly.monomial(field, decode_word(entry, m, here)))
        else:
            chart.append(decode_poly(entry, field, m, here))
    return tuple(chart)
