import logging
from typing import Any, Dict, List

from connectors import AppConfigClient, DocumentClient
from constants import (
    CENSUS_BATCH_SIZE,
    CENSUS_BUDGET,
    CENSUS_PROGRESS,
    CENSUS_RETRY_ATTEMPTS,
    CENSUS_SHARDS,
    CENSUS_WORKERS,
    INTEGER_LIST_REGEX,
    TANGENT_MAX_DEGREE,
)
from nchilbert import cells, codec, orbits, points, tangent
from nchilbert.census import run_census
from nchilbert.exceptions import UsageError
from telemetry import Telemetry

logger = logging.getLogger("nc_hilbert.app")
tracer = Telemetry.get_tracer("nc_hilbert.app")

Payload = Dict[str, Any]


def _load(path: str) -> Any:
    return DocumentClient(path).load()


def parse_integer_list(text: str, flag: str) -> List[int]:
    if not INTEGER_LIST_REGEX.match(text or ""):
        raise UsageError(f"{flag} expects comma-separated positive integers, got '{text}'")
    return [int(item) for item in text.split(",")]


def _census_options(config: AppConfigClient) -> Dict[str, Any]:
    return {
        "budget": config.get(CENSUS_BUDGET, type=int),
        "shards": config.get(CENSUS_SHARDS, type=int),
        "workers": config.get(CENSUS_WORKERS, type=int),
        "batch_size": config.get(CENSUS_BATCH_SIZE, type=int),
        "progress": config.get(CENSUS_PROGRESS, type=bool),
        "retry_attempts": config.get(CENSUS_RETRY_ATTEMPTS, type=int),
    }


def check_command(args, config: AppConfigClient, diagnostics: List[str]) -> Payload:
    p = codec.decode_point(_load(args.point))
    words, _ = points.krylov_basis(p)
    relations_hold = points.check_relations(p)
    cyclic = len(words) == p.n
    if not relations_hold:
        diagnostics.append("the matrices do not satisfy the algebra relations")
    if not cyclic:
        diagnostics.append(f"y spans a {len(words)}-dimensional submodule only")
    return {
        "relations_hold": relations_hold,
        "is_cyclic": cyclic,
        "valid": relations_hold and cyclic,
        "krylov_words": [codec.encode_word(w) for w in words],
    }


def canon_command(args, config, diagnostics) -> Payload:
    form = orbits.canonicalize(codec.decode_point(_load(args.point)))
    return {"canonical_form": codec.encode_canonical_form(form)}


def orbit_eq_command(args, config, diagnostics) -> Payload:
    p = codec.decode_point(_load(args.point))
    q = codec.decode_point(_load(args.other))
    return {"orbit_equal": orbits.orbit_equal(p, q)}


def ideal_command(args, config, diagnostics) -> Payload:
    form = orbits.canonicalize(codec.decode_point(_load(args.point)))
    return {"ideal": codec.encode_ideal(orbits.extract_ideal(form))}


def from_ideal_command(args, config, diagnostics) -> Payload:
    ideal = codec.decode_ideal(_load(args.ideal))
    return {"point": codec.encode_point(orbits.point_from_ideal(ideal))}


def normal_form_command(args, config, diagnostics) -> Payload:
    ideal = codec.decode_ideal(_load(args.ideal))
    if args.poly:
        f = codec.decode_poly(codec.unwrap(_load(args.poly)), ideal.field, ideal.algebra.m, "$")
    elif args.word is not None:
        word = tuple(parse_integer_list(args.word, "--word")) if args.word else ()
        f = codec.decode_poly([{"coeff": 1, "word": list(word)}], ideal.field, ideal.algebra.m, "--word")
    else:
        raise UsageError("normal-form needs --poly or --word")
    reduced = orbits.normal_form(f, ideal)
    return {"normal_form": codec.encode_poly(reduced), "in_ideal": reduced.is_zero()}


def cells_command(args, config, diagnostics) -> Payload:
    found = cells.enumerate_cells(args.m, args.n)
    polynomial = cells.count_polynomial(args.m, args.n)
    return {"cells": [c.as_dict() for c in found], "polynomial": polynomial.as_dict()}


def count_command(args, config, diagnostics) -> Payload:
    return {"polynomial": cells.count_polynomial(args.m, args.n).as_dict()}


def census_command(args, config, diagnostics) -> Payload:
    algebra = codec.decode_algebra(_load(args.algebra))
    result = run_census(algebra, args.n, args.q, **_census_options(config))
    census = result.as_dict()
    if algebra.is_free:
        predicted = cells.count_polynomial(algebra.m, args.n).evaluate(args.q)
        census["polynomial_value"] = predicted
        if predicted != result.orbit_count:
            diagnostics.append(f"cell polynomial predicts {predicted} orbits")
    return {"census": census}


def fit_command(args, config, diagnostics) -> Payload:
    primes = parse_integer_list(args.primes, "--primes")
    report = cells.polynomial_fit(args.m, args.n, primes, **_census_options(config))
    return {"fit": report.as_dict()}


def embed_command(args, config, diagnostics) -> Payload:
    p = codec.decode_point(_load(args.point))
    if args.charts:
        raw = codec.unwrap(_load(args.charts))
        if not isinstance(raw, list):
            raise UsageError("--charts expects an array of charts")
        family = [codec.decode_chart(c, p.field, p.m, f"$[{i}]") for i, c in enumerate(raw)]
    else:
        length = args.max_length if args.max_length is not None else p.n - 1
        family = points.chart_family(p.m, p.n, length, p.field)
    coordinates = points.embedding_coordinates(p, family, args.power)
    return {
        "coordinates": coordinates.encoded(),
        "family_size": len(family),
        "power": args.power,
    }


def tangent_command(args, config, diagnostics) -> Payload:
    p = codec.decode_point(_load(args.point))
    max_degree = config.get_value(TANGENT_MAX_DEGREE, allow_none=True, type=int) if args.max_degree is None else args.max_degree
    with tracer.start_as_current_span("tangent") as span:
        span.set_attribute("n", p.n)
        span.set_attribute("m", p.m)
        report = tangent.tangent_dim(p, max_degree)
    if report.status == tangent.STATUS_UNSTABLE:
        diagnostics.append("truncated Hom did not stabilize; raise --max-degree")
    return {"tangent": report.as_dict()}


def reduce_mod_p_command(args, config, diagnostics) -> Payload:
    reduced = points.reduce_point_mod_p(codec.decode_point(_load(args.point)), args.p)
    if not reduced.is_cyclic:
        diagnostics.append(f"the reduced point is not cyclic over F_{args.p}")
    return {"point": codec.encode_point(reduced.point), "is_cyclic": reduced.is_cyclic}


def veronese_command(args, config, diagnostics) -> Payload:
    return {"bound": points.veronese_bound(parse_integer_list(args.degrees, "--degrees"))}


def embed_check_command(args, config, diagnostics) -> Payload:
    algebra_a = codec.decode_algebra(_load(args.algebra))
    algebra_b = codec.decode_algebra(_load(args.quotient))
    options = _census_options(config)
    report = cells.check_closed_embedding(algebra_a, algebra_b, args.n, args.q, **options)
    return {"embedding": report.as_dict()}


HANDLERS = {
    "check": check_command,
    "canon": canon_command,
    "orbit-eq": orbit_eq_command,
    "ideal": ideal_command,
    "from-ideal": from_ideal_command,
    "normal-form": normal_form_command,
    "cells": cells_command,
    "count": count_command,
    "census": census_command,
    "fit": fit_command,
    "embed": embed_command,
    "tangent": tangent_command,
    "reduce-mod-p": reduce_mod_p_command,
    "veronese": veronese_command,
    "embed-check": embed_check_command,
}
