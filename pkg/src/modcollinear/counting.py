"""Counting collinear triples: a definitional oracle, slope-bucket counters,
and an incremental counter for transposition moves."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Union

import numpy as np

from . import _kernels
from .errors import SamePosition
from .plane import Permutation, PointSet, PrimeModulus

VERTICAL = "vertical"

Direction = Union[int, str]


@dataclass(frozen=True)
class TripleCount:
    """Total triple count plus its split by line direction.

    For permutation graphs the directions are the slopes 1..n-1; for general
    point sets they are ``"vertical"`` followed by slopes 0..n-1.
    """

    total: int
    per_slope: dict = field(default_factory=dict)

    def __post_init__(self):
        assert self.total == sum(self.per_slope.values())

    def items(self):
        return self.per_slope.items()


def _perm_directions(n: int) -> list[Direction]:
    return list(range(1, n))


def _set_directions(n: int) -> list[Direction]:
    return [VERTICAL] + list(range(n))


@lru_cache(maxsize=32)
def _triples(size: int) -> np.ndarray:
    if size < 3:
        return np.zeros((0, 3), dtype=np.int64)
    return np.array(list(combinations(range(size), 3)), dtype=np.int64).reshape(-1, 3)


@lru_cache(maxsize=32)
def _inverses(n: int) -> np.ndarray:
    inv = np.zeros(n, dtype=np.int64)
    for a in range(1, n):
        inv[a] = pow(a, -1, n)
    return inv


def count_naive(g: PointSet | Permutation) -> TripleCount:
    """Check every 3-subset with the determinant test.

    Permutation graphs are classified into slopes 1..n-1, other sets into
    vertical and slopes 0..n-1.
    """
    is_perm = isinstance(g, Permutation)
    n = g.modulus.n
    pts = np.array(g.points() if is_perm else g.points, dtype=np.int64).reshape(-1, 2)
    tri = _triples(len(pts))
    labels = _perm_directions(n) if is_perm else _set_directions(n)
    per = dict.fromkeys(labels, 0)
    if len(tri) == 0:
        return TripleCount(0, per)

    p, q, r = pts[tri[:, 0]], pts[tri[:, 1]], pts[tri[:, 2]]
    det = (q[:, 0] - p[:, 0]) * (r[:, 1] - p[:, 1]) - (r[:, 0] - p[:, 0]) * (q[:, 1] - p[:, 1])
    hit = det % n == 0
    p, q, r = p[hit], q[hit], r[hit]

    # classify each collinear triple by a pair with distinct x, if any
    dx = (q[:, 0] - p[:, 0]) % n
    dy = (q[:, 1] - p[:, 1]) % n
    alt = dx == 0
    dx = np.where(alt, (r[:, 0] - p[:, 0]) % n, dx)
    dy = np.where(alt, (r[:, 1] - p[:, 1]) % n, dy)
    vertical = dx == 0
    slopes = (dy * _inverses(n)[dx]) % n

    if is_perm:
        assert not vertical.any() and (slopes != 0).all()
    else:
        per[VERTICAL] = int(vertical.sum())
    counts = np.bincount(slopes[~vertical], minlength=n)
    for k in range(0 if not is_perm else 1, n):
        per[k] = int(counts[k])
    return TripleCount(int(hit.sum()), per)


@lru_cache(maxsize=64)
def _choose3(n: int) -> np.ndarray:
    return _kernels.choose_table(n, 3)


def perm_line_counts(p: Permutation) -> np.ndarray:
    """Array V with V[k-1, s] = #{i : alpha(i) - k*i = s (mod n)}."""
    n = p.n
    img = p.as_array()
    k = np.arange(1, n, dtype=np.int64)[:, None]
    residues = (img[None, :] - k * np.arange(n, dtype=np.int64)[None, :]) % n
    flat = residues + n * np.arange(n - 1, dtype=np.int64)[:, None]
    return np.bincount(flat.ravel(), minlength=n * (n - 1)).reshape(n - 1, n)


def count_fast_permutation(p: Permutation) -> TripleCount:
    """Sum C(V_s, 3) over the n parallel lines of each slope 1..n-1."""
    n = p.n
    per_k = _choose3(n)[perm_line_counts(p)].sum(axis=1)
    per = {k: int(per_k[k - 1]) for k in range(1, n)}
    return TripleCount(int(per_k.sum()), per)


def pointset_line_counts(g: PointSet) -> np.ndarray:
    """Array V with V[0, x] for vertical lines and V[k+1, s] for y = k*x + s."""
    n = g.n
    out = np.zeros((n + 1, n), dtype=np.int64)
    if len(g) == 0:
        return out
    pts = np.array(g.points, dtype=np.int64)
    x, y = pts[:, 0], pts[:, 1]
    out[0] = np.bincount(x, minlength=n)
    k = np.arange(n, dtype=np.int64)[:, None]
    flat = (y[None, :] - k * x[None, :]) % n + n * k
    out[1:] = np.bincount(flat.ravel(), minlength=n * n).reshape(n, n)
    return out


def count_fast_pointset(g: PointSet) -> TripleCount:
    n = g.n
    per_d = _choose3(max(n, len(g)))[pointset_line_counts(g)].sum(axis=1)
    labels = _set_directions(n)
    per = {lab: int(v) for lab, v in zip(labels, per_d)}
    return TripleCount(int(per_d.sum()), per)


def count_fast(g: PointSet | Permutation) -> TripleCount:
    if isinstance(g, Permutation):
        return count_fast_permutation(g)
    return count_fast_pointset(g)


class IncrementalCounter:
    """Mutable triple count of a permutation graph under transpositions.

    Keeps one residue histogram per slope (O(n^2) memory), so a swap costs
    O(n).  Owned by one worker at a time.
    """

    def __init__(self, p: Permutation):
        self.modulus: PrimeModulus = p.modulus
        n = p.n
        self.image = p.as_array().copy()
        self.buckets, total = _kernels.perm_buckets(self.image, n)
        self.total = int(total)
        self._c2 = _kernels.choose_table(n, 2)

    @property
    def n(self) -> int:
        return self.modulus.n

    @property
    def perm(self) -> Permutation:
        return Permutation(tuple(self.image.tolist()), self.modulus)

    def swap(self, i: int, j: int) -> int:
        n = self.n
        if i == j:
            raise SamePosition(f"cannot swap position {i} with itself")
        if not (0 <= i < n and 0 <= j < n):
            raise IndexError(f"positions must lie in [0, {n})")
        delta = int(_kernels.swap_delta(self.image, self.buckets, self._c2, i, j, n))
        self.total += delta
        return delta

    def check(self) -> None:
        """Assert the bucket invariants against the current image."""
        n = self.n
        assert (self.buckets.sum(axis=1) == n).all()
        assert self.total == int(_choose3(n)[self.buckets].sum())
        fresh, _ = _kernels.perm_buckets(self.image, n)
        assert np.array_equal(fresh, self.buckets)


def incr_init(p: Permutation) -> IncrementalCounter:
    return IncrementalCounter(p)


def incr_swap(state: IncrementalCounter, i: int, j: int) -> int:
    return state.swap(i, j)
