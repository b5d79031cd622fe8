"""Slope-class and line profiles of permutation graphs, a step-by-step checker
for the lower bound ceil((n-1)/4), and the mean triple count over all
permutations."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _kernels
from .counting import perm_line_counts
from .errors import CapExceeded, ProofAssertionFailure, SlopeOutOfRange
from .plane import Permutation, PrimeModulus, make_modulus

DEFAULT_ENUMERATE_CAP = 7


def _ceil_div(a, b):
    """Exact ceiling of a/b for integers (arrays allowed), b > 0."""
    return -((-a) // b)


@dataclass(frozen=True)
class SlopeClassProfile:
    """Pair counts per slope.  Index ``k - 1`` holds slope k."""

    modulus: PrimeModulus
    sizes: tuple[int, ...]
    excess: tuple[int, ...]

    def size(self, k: int) -> int:
        return self.sizes[k - 1]

    def b(self, k: int) -> int:
        return self.excess[k - 1]


@dataclass(frozen=True)
class LineProfile:
    """Occupancy of the n parallel lines of one slope.

    ``v[s]`` counts graph points on y = k*x + s; ``m[i]`` counts lines
    holding exactly i points, for i = 0..n.
    """

    slope: int
    v: tuple[int, ...]
    m: tuple[int, ...]

    def triples(self) -> int:
        return sum(math.comb(i, 3) * mi for i, mi in enumerate(self.m))


@lru_cache(maxsize=64)
def _pair_index(n: int):
    i, j = np.triu_indices(n, k=1)
    inv = np.zeros(n, dtype=np.int64)
    for a in range(1, n):
        inv[a] = pow(a, -1, n)
    return i.astype(np.int64), j.astype(np.int64), inv


def _pair_slopes(img: np.ndarray, n: int) -> np.ndarray:
    i, j, inv = _pair_index(n)
    return ((img[j] - img[i]) * inv[j - i]) % n


def slope_profile(p: Permutation) -> SlopeClassProfile:
    """Sort the C(n, 2) point pairs of the graph by slope."""
    n = p.n
    slopes = _pair_slopes(p.as_array(), n)
    assert not (slopes == 0).any()
    sizes = np.bincount(slopes, minlength=n)[1:]
    excess = sizes - (n - 1) // 2
    return SlopeClassProfile(p.modulus, tuple(sizes.tolist()), tuple(excess.tolist()))


def _spectra(v: np.ndarray, top: int) -> np.ndarray:
    """Row-wise histogram of line occupancies: out[r, i] = #{s : v[r, s] = i}, i <= top."""
    rows = v.shape[0]
    flat = v + (top + 1) * np.arange(rows, dtype=np.int64)[:, None]
    return np.bincount(flat.ravel(), minlength=rows * (top + 1)).reshape(rows, top + 1)


def line_profile(p: Permutation, k: int) -> LineProfile:
    n = p.n
    if not 1 <= k <= n - 1:
        raise SlopeOutOfRange(f"slope {k} outside 1..{n - 1}")
    img = p.as_array()
    v = np.bincount((img - k * np.arange(n)) % n, minlength=n)
    m = np.bincount(v, minlength=n + 1)
    return LineProfile(k, tuple(v.tolist()), tuple(m.tolist()))


def line_profiles(p: Permutation) -> list[LineProfile]:
    v = perm_line_counts(p)
    m = _spectra(v, p.n)
    return [LineProfile(k, tuple(v[k - 1].tolist()), tuple(m[k - 1].tolist()))
            for k in range(1, p.n)]


# -- the lower-bound argument, step by step ---------------------------------

@dataclass
class Step:
    """One identity or inequality evaluated on a concrete permutation.

    ``lhs`` and ``rhs`` are integer arrays (one entry per slope in
    ``slopes``, or a single entry for aggregate steps); the compared values
    are ``lhs / scale`` and ``rhs / scale``.
    """

    label: str
    relation: str
    lhs: np.ndarray
    rhs: np.ndarray
    slopes: np.ndarray | None = None
    scale: int = 1
    passed: bool = field(init=False)

    def __post_init__(self):
        self.lhs = np.atleast_1d(np.asarray(self.lhs, dtype=np.int64))
        self.rhs = np.atleast_1d(np.asarray(self.rhs, dtype=np.int64))
        if self.relation == "=":
            ok = self.lhs == self.rhs
        elif self.relation == ">=":
            ok = self.lhs >= self.rhs
        else:
            raise ValueError(self.relation)
        self.passed = bool(ok.all())

    def first_failure(self):
        bad = np.flatnonzero(self.lhs != self.rhs if self.relation == "=" else self.lhs < self.rhs)
        if len(bad) == 0:
            return None
        t = int(bad[0])
        slope = None if self.slopes is None else int(self.slopes[t])
        return (Fraction(int(self.lhs[t]), self.scale), Fraction(int(self.rhs[t]), self.scale), slope)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "relation": self.relation,
            "slopes": None if self.slopes is None else self.slopes.tolist(),
            "scale": self.scale,
            "lhs": self.lhs.tolist(),
            "rhs": self.rhs.tolist(),
            "passed": self.passed,
        }


@dataclass
class ProofTrace:
    """Every step of the lower-bound argument for one permutation."""

    perm: Permutation
    excess: np.ndarray
    spectra: np.ndarray
    psi_by_slope: np.ndarray
    steps: list[Step]
    positive_excess_sum: int
    half_ceiling_sum: int
    bound: int
    psi: int
    # keeping m_1 in the per-slope estimate; recorded, never asserted
    singleton_bound_sum: int

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.steps)

    def failures(self) -> list[Step]:
        return [s for s in self.steps if not s.passed]

    def raise_on_failure(self) -> None:
        for s in self.steps:
            if not s.passed:
                lhs, rhs, slope = s.first_failure()
                raise ProofAssertionFailure(s.label, lhs, rhs, slope)

    def to_dict(self) -> dict:
        n = self.perm.n
        return {
            "permutation": list(self.perm.image),
            "modulus": n,
            "slopes": [
                {
                    "slope": k,
                    "excess": int(self.excess[k - 1]),
                    "spectrum": self.spectra[k - 1].tolist(),
                    "psi": int(self.psi_by_slope[k - 1]),
                }
                for k in range(1, n)
            ],
            "steps": [s.to_dict() for s in self.steps],
            "aggregate": {
                "positive_excess_sum": self.positive_excess_sum,
                "half_ceiling_sum": self.half_ceiling_sum,
                "singleton_bound_sum": self.singleton_bound_sum,
                "bound": self.bound,
                "psi": self.psi,
            },
            "passed": self.passed,
        }


@lru_cache(maxsize=64)
def _ratio_steps(n: int) -> tuple[Step, Step]:
    i = np.arange(3, n + 1, dtype=np.int64)
    c3 = i * (i - 1) * (i - 2) // 6
    lin = 2 * (i * (i - 1) // 2) - i
    return (
        Step("ratio: 6 C(i,3) = (i-1)(2C(i,2)-i) for 3 <= i <= n", "=", 6 * c3, (i - 1) * lin),
        # C(i,3)/(2C(i,2)-i) >= 1/3, cross-multiplied
        Step("ratio: C(i,3)/(2C(i,2)-i) >= 1/3 for 3 <= i <= n", ">=", 3 * c3, lin),
    )


def proof_trace(p: Permutation, strict: bool = True) -> ProofTrace:
    """Evaluate each identity and inequality of the lower-bound argument.

    With ``strict`` the first failing step raises ProofAssertionFailure.
    """
    n = p.n
    half = (n - 1) // 2
    ks = np.arange(1, n, dtype=np.int64)

    sizes = np.bincount(_pair_slopes(p.as_array(), n), minlength=n)[1:]
    excess = sizes - half
    v = perm_line_counts(p)
    # sized past n only so that a corrupted count reports instead of crashing
    top = max(n, int(v.max()))
    m = _spectra(v, top)

    i = np.arange(top + 1, dtype=np.int64)
    ci2 = i * (i - 1) // 2
    ci3 = i * (i - 1) * (i - 2) // 6
    lin = 2 * ci2 - i
    lin[:3] = 0
    m1 = m[:, 1]

    psi_v = ci3[v].sum(axis=1)
    psi_m = m @ ci3
    lin_sum = m @ lin

    steps = [
        Step("sum of points: sum_s V_s = n", "=", v.sum(axis=1), np.full(n - 1, n), ks),
        Step("sum of pairs: sum_s C(V_s,2) = #S_k", "=", ci2[v].sum(axis=1), sizes, ks),
        Step("triples: sum_s C(V_s,3) = sum_i m_i C(i,3)", "=", psi_v, psi_m, ks),
        Step("spectrum points: sum_i i m_i = n", "=", m @ i, np.full(n - 1, n), ks),
        Step("spectrum pairs: sum_{i>=2} m_i C(i,2) = (n-1)/2 + B_k", "=", m @ ci2, half + excess, ks),
        Step("doubled difference: sum_{i>=3} (2C(i,2)-i) m_i = 2B_k - 1 + m_1", "=",
             lin_sum, 2 * excess - 1 + m1, ks),
    ]

    pos = excess > 0
    kp = ks[pos]
    bp = excess[pos]
    psi_p = psi_m[pos]
    lower = _ceil_div(2 * bp - 1, 3)
    steps += [
        *_ratio_steps(n),
        Step("key estimate: sum m_i C(i,3) >= (1/3) sum (2C(i,2)-i) m_i", ">=",
             3 * psi_p, lin_sum[pos], kp, scale=3),
        Step("key estimate: (1/3) sum (2C(i,2)-i) m_i >= (2B_k - 1 + m_1)/3", ">=",
             lin_sum[pos], 2 * bp - 1 + m1[pos], kp, scale=3),
        Step("key estimate: (2B_k - 1 + m_1)/3 >= (2B_k - 1)/3", ">=",
             2 * bp - 1 + m1[pos], 2 * bp - 1, kp, scale=3),
        Step("integer rounding: psi_k >= ceil((2B_k - 1)/3)", ">=", psi_p, lower, kp),
        Step("integer rounding: ceil((2B_k - 1)/3) >= ceil(B_k/2)", ">=", lower, _ceil_div(bp, 2), kp),
    ]

    pos_sum = int(bp.sum())
    half_ceil = int(_ceil_div(bp, 2).sum())
    ceil_of_half = -((-pos_sum) // 2)
    bound = -((-(n - 1)) // 4)
    psi = int(psi_v.sum())
    steps += [
        Step("total pairs: sum_k #S_k = C(n,2)", "=", int(sizes.sum()), n * (n - 1) // 2),
        Step("excess sum: sum_k B_k = (n-1)/2", "=", int(excess.sum()), half),
        Step("positive parts: sum_{B_k>0} B_k >= (n-1)/2", ">=", pos_sum, half),
        Step("sum of ceilings: sum ceil(B_k/2) >= ceil(sum B_k/2)", ">=", half_ceil, ceil_of_half),
        Step("halving: ceil(sum_{B_k>0} B_k/2) >= ceil((n-1)/4)", ">=", ceil_of_half, bound),
        Step("total: psi >= sum_{B_k>0} ceil(B_k/2)", ">=", psi, half_ceil),
        Step("final: psi >= ceil((n-1)/4)", ">=", psi, bound),
    ]

    trace = ProofTrace(
        perm=p,
        excess=excess,
        spectra=m,
        psi_by_slope=psi_m,
        steps=steps,
        positive_excess_sum=pos_sum,
        half_ceiling_sum=half_ceil,
        bound=bound,
        psi=psi,
        singleton_bound_sum=int(_ceil_div(2 * bp - 1 + m1[pos], 3).sum()),
    )
    if strict:
        trace.raise_on_failure()
    return trace


def render_trace(trace: ProofTrace) -> str:
    """Plain-text table of a trace, one row per step."""
    n = trace.perm.n
    lines = [f"permutation {trace.perm} (mod {n})",
             f"{'step':<72} {'slopes':>7} {'result':>6}"]
    for s in trace.steps:
        where = "all" if s.slopes is None else str(len(s.slopes))
        lines.append(f"{s.label:<72} {where:>7} {'pass' if s.passed else 'FAIL':>6}")
        if not s.passed:
            lhs, rhs, slope = s.first_failure()
            lines.append(f"    first violation at slope {slope}: {lhs} vs {rhs}")
    positive = ", ".join(f"B_{k}={int(b)}" for k, b in enumerate(trace.excess, start=1) if b > 0)
    lines.append(f"positive excesses: {positive}")
    lines.append(f"final: {trace.psi} >= {trace.bound}")
    return "\n".join(lines)


# -- mean triple count --------------------------------------------------------

def expected_exact(m: int | PrimeModulus) -> Fraction:
    """C(n,3) * P(n,2) * (n-3)! / n!, which reduces to n(n-1)/6."""
    n = make_modulus(m).n
    value = Fraction(math.comb(n, 3) * math.perm(n, 2) * math.factorial(n - 3), math.factorial(n))
    assert value == Fraction(n * (n - 1), 6)
    return value


def expected_enumerate(m: int | PrimeModulus, cap: int = DEFAULT_ENUMERATE_CAP) -> Fraction:
    """Exact mean of the triple count over all n! permutations.

    Walks the permutations in plain-changes order with incremental updates.
    """
    n = make_modulus(m).n
    if n > cap:
        raise CapExceeded(f"n = {n} exceeds the enumeration cap {cap}")
    image = np.arange(n, dtype=np.int64)
    visited, acc, *_ = _kernels.sweep_permutations(image, 0, n, 0)
    assert visited == math.factorial(n)
    return Fraction(int(acc), int(visited))


@dataclass(frozen=True)
class SampleEstimate:
    mean: float
    stderr: float
    samples: int
    seed: int

    def to_dict(self) -> dict:
        return {"mean": self.mean, "stderr": self.stderr, "samples": self.samples, "seed": self.seed}


SAMPLE_CHUNK = 4096


def sample_permutations(n: int, samples: int, seed: int):
    """Yield uniformly random permutation images in fixed-size chunks.

    Uses numpy's PCG64 generator seeded with ``seed``; each chunk is a
    Fisher-Yates shuffle of every row, so output depends only on (n, seed).
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    left = samples
    while left > 0:
        rows = min(SAMPLE_CHUNK, left)
        base = np.broadcast_to(np.arange(n, dtype=np.int64), (rows, n))
        yield np.ascontiguousarray(rng.permuted(base, axis=1))
        left -= rows


def expected_sample(m: int | PrimeModulus, samples: int, seed: int) -> SampleEstimate:
    n = make_modulus(m).n
    if samples < 1:
        raise ValueError("samples must be at least 1")
    psi = np.concatenate([_kernels.batch_psi(chunk, n) for chunk in sample_permutations(n, samples, seed)])
    mean = float(psi.mean())
    stderr = float(psi.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return SampleEstimate(mean, stderr, samples, seed)
