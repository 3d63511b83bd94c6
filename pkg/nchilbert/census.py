"""
Brute-force census of cyclic tuples over F_q.

The tuple space (A_1..A_m, y) is enumerated as an odometer over the matrix
entries (row-major, A_1 first) followed by y, the last position moving
fastest. Each shard is a contiguous index range and is processed in numpy
batches: relation check, then greedy Krylov elimination over all words of
length <= n - 1 in length-lex order.
"""
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from concurrent.futures.process import BrokenProcessPool
from dataclasses import dataclass, field as dataclass_field
from typing import List, Tuple

import numpy as np
from opentelemetry import trace
from tenacity import retry, retry_if_exception_type, stop_after_attempt, wait_random_exponential
from tqdm import tqdm

from nchilbert.core_linear import ScalarField
from nchilbert.exceptions import BudgetExceededError, FieldMismatchError, FreeActionViolation
from nchilbert.freealg import AlgebraPresentation, Word, words_up_to
from nchilbert.points import PointData

logger = logging.getLogger("nc_hilbert.census")
tracer = trace.get_tracer("nc_hilbert.census")

DEFAULT_BUDGET = 10 ** 8
DEFAULT_BATCH_SIZE = 65536

# relation -> ((word, coefficient mod q), ...)
IntRelation = Tuple[Tuple[Word, int], ...]


def gl_order(n: int, q: int) -> int:
    """|GL_n(F_q)| = prod_{i<n} (q^n - q^i)."""
    order = 1
    for i in range(n):
        order *= q ** n - q ** i
    return order


def tuple_space_size(m: int, n: int, q: int) -> int:
    return q ** (m * n * n + n)


@dataclass(frozen=True)
class CensusJob:
    """Picklable description of a census; relations are plain residues."""

    m: int
    n: int
    q: int
    relations: Tuple[IntRelation, ...] = ()
    batch_size: int = DEFAULT_BATCH_SIZE
    collect_forms: bool = False

    @classmethod
    def for_algebra(cls, algebra: AlgebraPresentation, n: int, q: int, **kwargs) -> "CensusJob":
        target = ScalarField.prime(q)
        if algebra.field.is_finite and algebra.field != target:
            raise FieldMismatchError(f"algebra over {algebra.field} cannot be counted over F_{q}")
        reduced = algebra.with_field(target)
        relations = tuple(
            tuple((word, target.to_int(c)) for word, c in r.terms) for r in reduced.relations
        )
        return cls(algebra.m, n, q, relations, **kwargs)

    @property
    def positions(self) -> int:
        return self.m * self.n * self.n + self.n

    @property
    def total(self) -> int:
        return self.q ** self.positions


@dataclass
class ShardResult:
    start: int
    stop: int
    cyclic_count: int = 0
    slice_count: int = 0
    slice_indices: List[int] = dataclass_field(default_factory=list)


def decode_digits(indices: np.ndarray, q: int, positions: int) -> np.ndarray:
    """Odometer digits of each index, most significant position first."""
    digits = np.empty((len(indices), positions), dtype=np.int64)
    rest = indices.copy()
    for k in range(positions - 1, -1, -1):
        digits[:, k] = rest % q
        rest //= q
    return digits


def _matmul_mod(X: np.ndarray, Y: np.ndarray, q: int) -> np.ndarray:
    return np.matmul(X, Y) % q


def _relations_hold(mats: np.ndarray, job: CensusJob) -> np.ndarray:
    batch, n = mats.shape[0], job.n
    ok = np.ones(batch, dtype=bool)
    eye = np.broadcast_to(np.eye(n, dtype=np.int64), (batch, n, n))
    for relation in job.relations:
        total = np.zeros((batch, n, n), dtype=np.int64)
        for word, coefficient in relation:
            product = eye
            for letter in word:
                product = _matmul_mod(product, mats[:, letter - 1], job.q)
            total = (total + coefficient * product) % job.q
        ok &= ~total.reshape(batch, -1).any(axis=1)
    return ok


def _krylov_batch(mats: np.ndarray, y: np.ndarray, job: CensusJob) -> Tuple[np.ndarray, np.ndarray]:
    """Greedy Krylov rank per row and whether the accepted vectors are e_0..e_{n-1} in order."""
    q, n = job.q, job.n
    batch = y.shape[0]
    rows = np.arange(batch)
    inverses = np.array([pow(a, q - 2, q) if a else 0 for a in range(q)], dtype=np.int64)
    identity = np.eye(n, dtype=np.int64)

    echelon = np.zeros((batch, n, n), dtype=np.int64)
    pivots = np.zeros((batch, n), dtype=np.int64)
    rank = np.zeros(batch, dtype=np.int64)
    on_slice = np.ones(batch, dtype=bool)

    vectors = {(): y}
    accepted = {}
    for word in words_up_to(job.m, n - 1):
        if word:
            parent = word[1:]
            vector = np.einsum("bij,bj->bi", mats[:, word[0] - 1], vectors[parent]) % q
            candidate = accepted[parent] & (rank < n)
        else:
            vector = y
            candidate = np.ones(batch, dtype=bool)
        vectors[word] = vector

        residue = vector.copy()
        for k in range(n):
            active = rank > k
            factor = np.where(active, residue[rows, pivots[:, k]], 0)
            residue = (residue - factor[:, None] * echelon[:, k, :]) % q
        independent = candidate & residue.any(axis=1)
        accepted[word] = independent

        if independent.any():
            chosen = rows[independent]
            slot = rank[chosen]
            lead = np.argmax(residue[chosen] != 0, axis=1)
            scale = inverses[residue[chosen, lead]]
            echelon[chosen, slot, :] = (residue[chosen] * scale[:, None]) % q
            pivots[chosen, slot] = lead
            on_slice[chosen] &= (vector[chosen] == identity[slot]).all(axis=1)
            rank[chosen] += 1
    return rank, on_slice


def count_shard(job: CensusJob, start: int, stop: int) -> ShardResult:
    """Counts cyclic tuples and slice points with index in [start, stop)."""
    result = ShardResult(start, stop)
    m, n = job.m, job.n
    split = m * n * n
    for low in range(start, stop, job.batch_size):
        high = min(stop, low + job.batch_size)
        indices = np.arange(low, high, dtype=np.int64)
        digits = decode_digits(indices, job.q, job.positions)
        mats = digits[:, :split].reshape(-1, m, n, n)
        y = digits[:, split:]
        valid = _relations_hold(mats, job) if job.relations else np.ones(len(indices), dtype=bool)
        rank, on_slice = _krylov_batch(mats, y, job)
        valid &= rank == n
        result.cyclic_count += int(valid.sum())
        slices = valid & on_slice
        result.slice_count += int(slices.sum())
        if job.collect_forms:
            result.slice_indices.extend(int(i) for i in indices[slices])
    return result


def _count_shard_args(args) -> ShardResult:
    return count_shard(*args)


def shard_bounds(total: int, shards: int) -> List[Tuple[int, int]]:
    shards = max(1, min(shards, total))
    cuts = [total * k // shards for k in range(shards + 1)]
    return [(cuts[k], cuts[k + 1]) for k in range(shards)]


def _log_retry(retry_state):
    logger.warning("Census worker pool broke; retry attempt %d", retry_state.attempt_number)


def _run_pool(job: CensusJob, bounds, workers: int, progress: bool) -> List[ShardResult]:
    results = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        mapped = pool.map(_count_shard_args, [(job, a, b) for a, b in bounds])
        for shard in tqdm(mapped, total=len(bounds), disable=not progress, desc="census", unit="shard"):
            results.append(shard)
    return results


def _run_inline(job: CensusJob, bounds, progress: bool) -> List[ShardResult]:
    results = []
    for a, b in tqdm(bounds, disable=not progress, desc="census", unit="shard"):
        with tracer.start_as_current_span("census_shard") as span:
            span.set_attribute("start", a)
            span.set_attribute("stop", b)
            results.append(count_shard(job, a, b))
    return results


@dataclass
class CensusResult:
    algebra: AlgebraPresentation
    n: int
    q: int
    tuples: int
    cyclic_count: int
    orbit_count: int
    slice_count: int
    shards: int
    forms: List[PointData] = dataclass_field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "cyclic_count": self.cyclic_count,
            "orbit_count": self.orbit_count,
            "slice_count": self.slice_count,
            "gl_order": gl_order(self.n, self.q),
            "tuples": self.tuples,
            "m": self.algebra.m,
            "n": self.n,
            "q": self.q,
        }


def point_at_index(algebra: AlgebraPresentation, n: int, q: int, index: int) -> PointData:
    """The tuple with the given odometer index, as a point of the algebra reduced mod q."""
    algebra = algebra.with_field(ScalarField.prime(q))
    m = algebra.m
    digits = decode_digits(np.array([index], dtype=np.int64), q, m * n * n + n)[0].tolist()
    split = m * n * n
    matrices = [
        [digits[s * n * n + i * n: s * n * n + (i + 1) * n] for i in range(n)] for s in range(m)
    ]
    return PointData.from_rows(algebra, matrices, digits[split:])


def run_census(
    algebra: AlgebraPresentation,
    n: int,
    q: int,
    budget: int = DEFAULT_BUDGET,
    shards: int = 1,
    workers: int = 0,
    batch_size: int = DEFAULT_BATCH_SIZE,
    progress: bool = False,
    collect_forms: bool = False,
    retry_attempts: int = 3,
) -> CensusResult:
    """
    Counts all cyclic tuples satisfying the relations and divides by
    |GL_n(F_q)|. The division must be exact and must agree with the number of
    slice points; anything else raises FreeActionViolation.
    """
    job = CensusJob.for_algebra(algebra, n, q, batch_size=batch_size, collect_forms=collect_forms)
    total = job.total
    if total > budget:
        raise BudgetExceededError(
            f"census over {total} tuples exceeds the budget of {budget}; raise it explicitly"
        )
    bounds = shard_bounds(total, shards)
    if workers == 0:
        workers = min(len(bounds), os.cpu_count() or 1)

    with tracer.start_as_current_span("census") as span:
        span.set_attribute("m", algebra.m)
        span.set_attribute("n", n)
        span.set_attribute("q", q)
        span.set_attribute("shards", len(bounds))
        span.set_attribute("tuples", total)
        logger.info("Census m=%d n=%d q=%d over %d tuples in %d shards", algebra.m, n, q, total, len(bounds))
        if workers > 1 and len(bounds) > 1:
            runner = retry(
                retry=retry_if_exception_type(BrokenProcessPool),
                wait=wait_random_exponential(multiplier=1, max=5),
                stop=stop_after_attempt(retry_attempts),
                before_sleep=_log_retry,
                reraise=True,
            )(_run_pool)
            results = runner(job, bounds, workers, progress)
        else:
            results = _run_inline(job, bounds, progress)

    cyclic = sum(r.cyclic_count for r in results)
    slices = sum(r.slice_count for r in results)
    order = gl_order(n, q)
    if cyclic % order:
        raise FreeActionViolation(f"{cyclic} cyclic tuples are not divisible by |GL_{n}(F_{q})| = {order}")
    orbits = cyclic // order
    if slices != orbits:
        raise FreeActionViolation(f"{slices} slice points but {orbits} orbits")
    forms = []
    if collect_forms:
        indices = sorted(i for r in results for i in r.slice_indices)
        forms = [point_at_index(algebra, n, q, i) for i in indices]
    logger.info("Census found %d cyclic tuples, %d orbits", cyclic, orbits)
    return CensusResult(algebra, n, q, total, cyclic, orbits, slices, len(bounds), forms)
