"""Points, permutations and affine symmetries of the plane Z_n x Z_n, n prime."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence, Union

import numpy as np

from .errors import DuplicatePoint, Even, InvalidPermutation, NotPrime, TooSmall


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


@dataclass(frozen=True)
class PrimeModulus:
    n: int

    def __post_init__(self):
        n = self.n
        if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
            raise TypeError(f"modulus must be an integer, got {n!r}")
        object.__setattr__(self, "n", int(n))
        if n < 2:
            raise TooSmall(f"modulus {n} is below 3")
        if n == 2:
            # 2 is prime but not an odd prime >= 3
            raise TooSmall("modulus 2 is below 3 (odd primes only)")
        if n % 2 == 0:
            raise Even(f"modulus {n} is even")
        if not is_prime(n):
            raise NotPrime(f"modulus {n} is composite")

    def __int__(self):
        return self.n

    def inv(self, a: int) -> int:
        """Multiplicative inverse of a nonzero residue."""
        return pow(a % self.n, -1, self.n)

    @property
    def half(self) -> int:
        """(n - 1) / 2 as an exact integer."""
        return (self.n - 1) // 2


def make_modulus(n: int | PrimeModulus) -> PrimeModulus:
    if isinstance(n, PrimeModulus):
        return n
    return PrimeModulus(n)


class Point(NamedTuple):
    x: int
    y: int


def collinear(p: Point, q: Point, r: Point, m: PrimeModulus | int) -> bool:
    """True iff the three distinct points lie on one line of the plane mod n."""
    n = make_modulus(m).n
    p, q, r = Point(*p), Point(*q), Point(*r)
    if (p.x - q.x) % n == 0 and (p.y - q.y) % n == 0 \
            or (p.x - r.x) % n == 0 and (p.y - r.y) % n == 0 \
            or (q.x - r.x) % n == 0 and (q.y - r.y) % n == 0:
        raise DuplicatePoint(f"points must be pairwise distinct: {p}, {q}, {r}")
    det = (q.x - p.x) * (r.y - p.y) - (r.x - p.x) * (q.y - p.y)
    return det % n == 0


@dataclass(frozen=True)
class Permutation:
    """A bijection of Z_n given by its image sequence: ``image[i] == alpha(i)``."""

    image: tuple[int, ...]
    modulus: PrimeModulus

    def __post_init__(self):
        image = tuple(int(v) for v in self.image)
        object.__setattr__(self, "image", image)
        n = self.modulus.n
        if len(image) != n:
            raise InvalidPermutation(f"image has length {len(image)}, expected {n}")
        if sorted(image) != list(range(n)):
            raise InvalidPermutation(f"image {image} is not a bijection on Z_{n}")

    @classmethod
    def from_image(cls, image: Sequence[int], n: int | PrimeModulus | None = None) -> Permutation:
        if n is None:
            n = len(image)
        return cls(tuple(image), make_modulus(n))

    @classmethod
    def identity(cls, m: int | PrimeModulus) -> Permutation:
        m = make_modulus(m)
        return cls(tuple(range(m.n)), m)

    @classmethod
    def random(cls, m: int | PrimeModulus, rng: np.random.Generator) -> Permutation:
        m = make_modulus(m)
        return cls(tuple(rng.permutation(m.n).tolist()), m)

    @property
    def n(self) -> int:
        return self.modulus.n

    def __len__(self):
        return self.modulus.n

    def __getitem__(self, i):
        return self.image[i]

    def inverse(self) -> Permutation:
        inv = [0] * self.n
        for i, v in enumerate(self.image):
            inv[v] = i
        return Permutation(tuple(inv), self.modulus)

    def points(self) -> tuple[Point, ...]:
        return tuple(Point(i, v) for i, v in enumerate(self.image))

    def graph(self) -> PointSet:
        return PointSet(self.points(), self.modulus)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.image, dtype=np.int64)

    def __str__(self):
        return ",".join(map(str, self.image))


@dataclass(frozen=True)
class PointSet:
    """A duplicate-free collection of points of Z_n x Z_n.

    Point order is kept as given so that files round-trip byte for byte.
    """

    points: tuple[Point, ...]
    modulus: PrimeModulus

    def __post_init__(self):
        n = self.modulus.n
        pts = tuple(Point(int(x), int(y)) for x, y in self.points)
        for p in pts:
            if not (0 <= p.x < n and 0 <= p.y < n):
                raise ValueError(f"point {tuple(p)} is not reduced modulo {n}")
        if len(set(pts)) != len(pts):
            seen = set()
            for p in pts:
                if p in seen:
                    raise DuplicatePoint(f"repeated point {tuple(p)}")
                seen.add(p)
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_points(cls, points: Iterable[Sequence[int]], n: int | PrimeModulus) -> PointSet:
        return cls(tuple(Point(*p) for p in points), make_modulus(n))

    @property
    def n(self) -> int:
        return self.modulus.n

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def as_set(self) -> frozenset[Point]:
        return frozenset(self.points)

    def same_points(self, other: PointSet) -> bool:
        return self.modulus == other.modulus and self.as_set() == other.as_set()


@dataclass(frozen=True)
class AffineSymmetry:
    """(x, y) -> (a*x + b, c*y + d), optionally after swapping the coordinates.

    Each axis is mapped by an invertible affine map, so lines go to lines and
    permutation graphs stay permutation graphs.
    """

    a: int = 1
    b: int = 0
    c: int = 1
    d: int = 0
    transpose: bool = False

    def check(self, n: int) -> None:
        if self.a % n == 0 or self.c % n == 0:
            raise ValueError(f"a and c must be nonzero modulo {n}")

    @classmethod
    def random(cls, m: int | PrimeModulus, rng: np.random.Generator) -> AffineSymmetry:
        n = make_modulus(m).n
        a, c = (int(v) for v in rng.integers(1, n, size=2))
        b, d = (int(v) for v in rng.integers(0, n, size=2))
        return cls(a, b, c, d, bool(rng.integers(0, 2)))

    def map_point(self, p: Point, n: int) -> Point:
        x, y = (p.y, p.x) if self.transpose else (p.x, p.y)
        return Point((self.a * x + self.b) % n, (self.c * y + self.d) % n)


Graph = Union[PointSet, Permutation]


def apply_symmetry(s: AffineSymmetry, g: Graph) -> Graph:
    n = g.modulus.n
    s.check(n)
    if isinstance(g, Permutation):
        alpha = g.inverse() if s.transpose else g
        out = [0] * n
        for x, y in enumerate(alpha.image):
            out[(s.a * x + s.b) % n] = (s.c * y + s.d) % n
        return Permutation(tuple(out), g.modulus)
    return PointSet(tuple(s.map_point(p, n) for p in g.points), g.modulus)


def normalize(p: Permutation) -> Permutation:
    """The y-affine image of ``p`` with alpha(0) = 0 and alpha(1) = 1."""
    n = p.n
    a0, a1 = p.image[0], p.image[1]
    scale = pow(a1 - a0, -1, n)
    return Permutation(tuple(((v - a0) * scale) % n for v in p.image), p.modulus)
