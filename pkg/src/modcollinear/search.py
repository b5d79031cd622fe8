"""Minimizing the triple count over permutations, and surveys of general
point sets of a given size."""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Literal, Optional

import numpy as np

from . import _kernels
from .counting import count_fast_pointset, count_naive
from .errors import BudgetExceeded, TheoremViolation
from .plane import Permutation, PointSet, PrimeModulus, make_modulus, normalize

DEFAULT_BUDGET = 50_000_000
WORKERS_ENV = "MODCOLLINEAR_WORKERS"


def default_workers() -> int:
    value = os.environ.get(WORKERS_ENV)
    if not value:
        return 1
    workers = int(value)
    if workers < 1:
        raise ValueError(f"{WORKERS_ENV} must be a positive integer")
    return workers


def lower_bound(n: int) -> int:
    return -(-(n - 1) // 4)


def _run_tasks(fn: Callable, tasks: list, workers: int) -> list:
    """Map ``fn`` over ``tasks`` in order, in-process or on a process pool."""
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(fn, tasks))


@dataclass
class SearchConfig:
    modulus: PrimeModulus
    mode: Literal["exhaustive", "anneal"] = "exhaustive"
    seed: int = 0
    restarts: int = 10
    steps: int = 10_000
    initial_temperature: float = 2.0
    cooling: float = 0.9995
    workers: int = 1
    witness_cap: int = 16
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        self.modulus = make_modulus(self.modulus)
        if self.mode not in ("exhaustive", "anneal"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not 0 < self.cooling < 1:
            raise ValueError("cooling factor must lie in (0, 1)")
        if self.initial_temperature <= 0:
            raise ValueError("initial temperature must be positive")
        for name in ("restarts", "steps", "workers", "budget"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.witness_cap < 0:
            raise ValueError("witness_cap must be non-negative")


@dataclass
class SearchResult:
    modulus: PrimeModulus
    mode: str
    min_psi: int
    witnesses: list[Permutation]
    evaluated: int
    lower_bound: int
    conjecture_value: int
    elapsed: float
    minimizers: Optional[int] = None
    seed: Optional[int] = None

    @property
    def n(self) -> int:
        return self.modulus.n


# -- symmetry classes ---------------------------------------------------------

def canonical_key(p: Permutation) -> tuple[int, ...]:
    """Lexicographically least image over the orbit of ``p``.

    The orbit is generated by affine maps on each axis and the coordinate
    swap.  For a fixed x-side map and orientation, the least y-side image is
    the one sending alpha(0), alpha(1) to 0, 1, so only 2 n (n-1) candidates
    need checking.
    """
    n = p.n
    a = np.arange(1, n, dtype=np.int64)
    b = np.arange(n, dtype=np.int64)
    inv = np.array([pow(int(v), -1, n) for v in a], dtype=np.int64)
    y = np.arange(n, dtype=np.int64)
    # source x for target y under x -> a*x + b is a^-1 (y - b)
    src = (inv[:, None, None] * (y[None, None, :] - b[None, :, None])) % n
    src = src.reshape(-1, n)
    best = None
    for alpha in (p.as_array(), p.inverse().as_array()):
        rows = alpha[src]
        scale = np.array([pow(int(d), -1, n) for d in (rows[:, 1] - rows[:, 0]) % n], dtype=np.int64)
        rows = ((rows - rows[:, :1]) * scale[:, None]) % n
        order = np.lexsort(rows.T[::-1])
        cand = tuple(rows[order[0]].tolist())
        if best is None or cand < best:
            best = cand
    return best


def _distinct_classes(perms: Iterable[Permutation], cap: int) -> list[Permutation]:
    out, seen = [], set()
    for p in perms:
        if len(out) >= cap:
            break
        key = canonical_key(p)
        if key not in seen:
            seen.add(key)
            out.append(p)
    return out


# -- exhaustive ---------------------------------------------------------------

def _exhaustive_task(args):
    n, third, keep = args
    rest = [v for v in range(2, n) if v != third]
    image = np.array([0, 1, third] + rest, dtype=np.int64)[:n]
    visited, _, best, n_best, buf, rows = _kernels.sweep_permutations(image, 3, n, keep)
    return int(visited), int(best), int(n_best), buf[:rows].copy()


def exhaustive_min(cfg: SearchConfig) -> SearchResult:
    """Exact minimum over permutations with alpha(0) = 0 and alpha(1) = 1.

    Every permutation is a symmetry image of one of these, so the minimum
    is global.  Work is split on the value of alpha(2); the merge keeps the
    overall minimum and the lexicographically least witnesses, so the result
    does not depend on the worker count.
    """
    n = cfg.modulus.n
    size = math.factorial(n - 2)
    if size > cfg.budget:
        raise BudgetExceeded(f"(n-2)! = {size} normalized permutations exceed the budget {cfg.budget}")
    start = time.perf_counter()
    keep = max(64, 4 * cfg.witness_cap)
    tasks = [(n, third, keep) for third in range(2, n)]
    parts = _run_tasks(_exhaustive_task, tasks, cfg.workers)

    best = min(p[1] for p in parts)
    evaluated = sum(p[0] for p in parts)
    assert evaluated == size
    minimizers = sum(p[2] for p in parts if p[1] == best)
    rows = sorted(tuple(r.tolist()) for p in parts if p[1] == best for r in p[3])[:keep]
    witnesses = _distinct_classes((Permutation(r, cfg.modulus) for r in rows), cfg.witness_cap)
    return SearchResult(
        modulus=cfg.modulus,
        mode="exhaustive",
        min_psi=best,
        witnesses=witnesses,
        evaluated=evaluated,
        lower_bound=lower_bound(n),
        conjecture_value=(n - 1) // 2,
        elapsed=time.perf_counter() - start,
        minimizers=minimizers,
    )


# -- annealing ----------------------------------------------------------------

def _anneal_task(args):
    n, child_seed, steps, t0, cooling = args
    rng = np.random.Generator(np.random.PCG64(child_seed))
    image = rng.permutation(n).astype(np.int64)
    pos_i = rng.integers(0, n, size=steps, dtype=np.int64)
    pos_j = rng.integers(0, n - 1, size=steps, dtype=np.int64)
    pos_j += pos_j >= pos_i
    u = rng.random(steps)
    temps = t0 * cooling ** np.arange(steps, dtype=np.float64)
    best, best_image, _, _ = _kernels.anneal_restart(image, n, pos_i, pos_j, u, temps)
    return int(best), tuple(best_image.tolist())


def anneal_min(cfg: SearchConfig) -> SearchResult:
    """Simulated annealing over transpositions; the result is an upper bound.

    Restart r draws all of its randomness from child r of the seed's
    ``SeedSequence``, so results depend only on the configuration.
    """
    n = cfg.modulus.n
    start = time.perf_counter()
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    tasks = [(n, child, cfg.steps, cfg.initial_temperature, cfg.cooling) for child in children]
    parts = _run_tasks(_anneal_task, tasks, cfg.workers)
    best = min(p[0] for p in parts)
    found = sorted({normalize(Permutation(img, cfg.modulus)).image for b, img in parts if b == best})
    witnesses = _distinct_classes((Permutation(r, cfg.modulus) for r in found), max(cfg.witness_cap, 1))
    return SearchResult(
        modulus=cfg.modulus,
        mode="anneal",
        min_psi=best,
        witnesses=witnesses,
        evaluated=cfg.restarts * cfg.steps,
        lower_bound=lower_bound(n),
        conjecture_value=(n - 1) // 2,
        elapsed=time.perf_counter() - start,
        seed=cfg.seed,
    )


def run_search(cfg: SearchConfig) -> SearchResult:
    return exhaustive_min(cfg) if cfg.mode == "exhaustive" else anneal_min(cfg)


@dataclass(frozen=True)
class BoundsReport:
    n: int
    mode: str
    value: int
    lower_bound: int
    conjecture_value: int
    lower_bound_holds: bool
    status: str

    def to_dict(self) -> dict:
        return dict(self.__dict__)

    def __str__(self):
        rel = ">=" if self.lower_bound_holds else "<"
        return (f"n={self.n} {self.mode}: psi={self.value} {rel} ceil((n-1)/4)={self.lower_bound}; "
                f"(n-1)/2={self.conjecture_value}: {self.status}")


def verify_bounds(r: SearchResult) -> BoundsReport:
    """Compare a search result with the proven bound and the conjectured value.

    An exhaustive minimum below ceil((n-1)/4) is a bug and raises.  An
    exhaustive minimum different from (n-1)/2 refutes the conjecture.  An
    annealing value is only an upper bound: below (n-1)/2 its witness is a
    counterexample, otherwise nothing is decided.
    """
    n = r.n
    holds = r.min_psi >= r.lower_bound
    if r.mode == "exhaustive":
        if not holds:
            raise TheoremViolation(f"exhaustive minimum {r.min_psi} below proven bound {r.lower_bound} at n={n}")
        status = "conjecture-consistent" if r.min_psi == r.conjecture_value else "counterexample"
    else:
        status = "counterexample" if r.min_psi < r.conjecture_value else "inconclusive-upper-bound"
    return BoundsReport(n, r.mode, r.min_psi, r.lower_bound, r.conjecture_value, holds, status)


# -- point-set surveys ----------------------------------------------------------

@dataclass
class SubsetSurveyResult:
    modulus: PrimeModulus
    size: int
    mode: str
    min_psi: int
    witness: Optional[PointSet]
    zero_count: Optional[int]
    evaluated: int
    seed: Optional[int] = None
    elapsed: float = 0.0

    @property
    def n(self) -> int:
        return self.modulus.n


def _index_points(idx, n) -> tuple:
    return tuple((int(p) // n, int(p) % n) for p in idx)


def _survey_task(args):
    n, size, s = args
    visited, best, witness, zeros = _kernels.survey_smallest(n, size, s)
    return int(visited), int(best), tuple(witness.tolist()), int(zeros)


def subset_survey(
    m: int | PrimeModulus,
    size: int,
    mode: Literal["full", "sample"] = "full",
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    samples: int = 10_000,
    workers: int = 1,
) -> SubsetSurveyResult:
    """Minimum triple count over subsets of Z_n x Z_n with ``size`` points.

    ``full`` walks every subset in revolving-door order, split by smallest
    point, with O(n) incremental updates per step; ``sample`` draws
    ``samples`` uniform subsets.
    """
    m = make_modulus(m)
    n = m.n
    npts = n * n
    if not 0 <= size <= npts:
        raise ValueError(f"size must lie in 0..{npts}")
    start = time.perf_counter()
    if mode == "full":
        total = math.comb(npts, size)
        if total > budget:
            raise BudgetExceeded(f"C({npts}, {size}) = {total} subsets exceed the budget {budget}")
        if size == 0:
            return SubsetSurveyResult(m, 0, "full", 0, PointSet((), m), 1, 1)
        tasks = [(n, size, s) for s in range(npts - size + 1)]
        parts = _run_tasks(_survey_task, tasks, workers)
        evaluated = sum(p[0] for p in parts)
        assert evaluated == total
        best = min(p[1] for p in parts)
        witness = min(p[2] for p in parts if p[1] == best)
        zeros = sum(p[3] for p in parts)
        return SubsetSurveyResult(m, size, "full", best, PointSet.from_points(_index_points(witness, n), m),
                                  zeros, evaluated, elapsed=time.perf_counter() - start)
    if mode != "sample":
        raise ValueError(f"unknown survey mode {mode!r}")
    if samples < 1:
        raise ValueError("samples must be at least 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    best, witness, zeros = None, None, 0
    for _ in range(samples):
        idx = tuple(sorted(rng.choice(npts, size=size, replace=False).tolist()))
        g = PointSet.from_points(_index_points(idx, n), m)
        psi = count_fast_pointset(g).total
        zeros += psi == 0
        if best is None or psi < best or (psi == best and idx < witness):
            best, witness = psi, idx
    return SubsetSurveyResult(m, size, "sample", best, PointSet.from_points(_index_points(witness, n), m),
                              zeros, samples, seed=seed, elapsed=time.perf_counter() - start)


def recount(witness: Permutation | PointSet) -> int:
    """Independent recount of a witness with the definitional counter."""
    return count_naive(witness).total
