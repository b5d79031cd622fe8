"""Point-set files, permutation literals, result records, the named example
registry, and the best-known witness store."""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .errors import CorruptStore, InvalidPermutation, ModulusError, ParseError
from .plane import Permutation, Point, PointSet, make_modulus

SCHEMA_VERSION = 1


# -- point-set files ------------------------------------------------------------

def serialize_pointset(g: PointSet) -> str:
    lines = [f"modulus: {g.n}"]
    lines += [f"{p.x},{p.y}" for p in g.points]
    return "\n".join(lines) + "\n"


def parse_pointset(text: str) -> PointSet:
    """Parse the ``modulus: n`` header followed by one ``x,y`` point per line.

    Blank lines and ``#`` comments are ignored.  Errors carry 1-based line
    numbers.
    """
    modulus = None
    points: list[Point] = []
    seen: dict[Point, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if modulus is None:
            key, sep, value = line.partition(":")
            if not sep or key.strip() != "modulus":
                raise ParseError("expected header 'modulus: <n>'", lineno)
            try:
                modulus = make_modulus(int(value.strip()))
            except ValueError as exc:
                raise ParseError(f"bad modulus: {exc}", lineno) from None
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ParseError(f"expected 'x,y', got {line!r}", lineno)
        try:
            x, y = (int(v.strip()) for v in parts)
        except ValueError:
            raise ParseError(f"non-integer coordinate in {line!r}", lineno) from None
        if not (0 <= x < modulus.n and 0 <= y < modulus.n):
            raise ParseError(f"point ({x},{y}) is not reduced modulo {modulus.n}", lineno)
        p = Point(x, y)
        if p in seen:
            raise ParseError(f"duplicate point ({x},{y}), first seen on line {seen[p]}", lineno)
        seen[p] = lineno
        points.append(p)
    if modulus is None:
        raise ParseError("missing 'modulus: <n>' header")
    return PointSet(tuple(points), modulus)


def read_pointset(path: str | os.PathLike) -> PointSet:
    return parse_pointset(Path(path).read_text())


def write_pointset(g: PointSet, path: str | os.PathLike) -> None:
    Path(path).write_text(serialize_pointset(g))


def parse_permutation(literal: str, modulus: Optional[int] = None) -> Permutation:
    """Parse a comma-separated image sequence such as ``0,2,4,1,3``."""
    try:
        image = [int(v) for v in literal.replace(" ", "").split(",") if v != ""]
    except ValueError:
        raise ParseError(f"permutation literal {literal!r} is not a list of integers") from None
    if modulus is not None and len(image) != modulus:
        raise ParseError(f"permutation has {len(image)} entries but modulus is {modulus}")
    try:
        return Permutation.from_image(image)
    except (ModulusError, InvalidPermutation) as exc:
        raise ParseError(str(exc)) from None


# -- named examples -------------------------------------------------------------

# the two 5 x 5 examples showing the n + 2 point bound is sharp
REGISTRY: dict[str, tuple[str, tuple[tuple[int, int], ...]]] = {
    "gamma1": (
        "6 points mod 5 with no collinear triple",
        ((0, 0), (0, 1), (1, 2), (1, 3), (2, 2), (4, 1)),
    ),
    "gamma2": (
        "gamma1 plus (2,1): 7 points mod 5 with exactly 2 collinear triples",
        ((0, 0), (0, 1), (1, 2), (1, 3), (2, 2), (4, 1), (2, 1)),
    ),
}


def registry_pointset(name: str) -> PointSet:
    try:
        _, pts = REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown example {name!r}; known: {', '.join(sorted(REGISTRY))}") from None
    return PointSet.from_points(pts, 5)


def registry_file(name: str) -> str:
    return serialize_pointset(registry_pointset(name))


# -- result records -------------------------------------------------------------

@dataclass
class ResultRecord:
    command: str
    modulus: Optional[int]
    inputs: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    seed: Optional[int] = None
    elapsed: Optional[float] = None
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "command": self.command,
            "modulus": self.modulus,
            "inputs": self.inputs,
            "results": self.results,
            "seed": self.seed,
            "elapsed": self.elapsed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> ResultRecord:
        if "schema_version" not in d:
            raise ParseError("result record lacks schema_version")
        if d["schema_version"] != SCHEMA_VERSION:
            raise ParseError(f"unsupported schema_version {d['schema_version']}")
        return cls(
            command=d["command"],
            modulus=d.get("modulus"),
            inputs=d.get("inputs", {}),
            results=d.get("results", {}),
            seed=d.get("seed"),
            elapsed=d.get("elapsed"),
            schema_version=d["schema_version"],
        )

    @classmethod
    def from_json(cls, text: str) -> ResultRecord:
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
        return cls.from_dict(d)

    def save(self, path: str | os.PathLike) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path: str | os.PathLike) -> ResultRecord:
        return cls.from_json(Path(path).read_text())


def jsonable(value: Any) -> Any:
    """Convert tuples, numpy scalars and non-string dict keys for JSON."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


# -- best-known store -----------------------------------------------------------

@dataclass(frozen=True)
class StoreEntry:
    n: int
    problem: str
    psi: int
    witness: list

    @property
    def key(self) -> tuple[int, str]:
        return (self.n, self.problem)


class BestKnownStore:
    """Append-only log of the best witness per (n, problem).

    Reading keeps the first entry with the smallest psi for each key, so
    stored optima never regress.  Any unreadable line is reported instead of
    being skipped or overwritten.
    """

    def __init__(self, path: str | os.PathLike):
        self.path = Path(path)

    def load(self) -> dict[tuple[int, str], StoreEntry]:
        best: dict[tuple[int, str], StoreEntry] = {}
        if not self.path.exists():
            return best
        for lineno, line in enumerate(self.path.read_text().splitlines(), start=1):
            if not line.strip():
                continue
            try:
                d = json.loads(line)
                if d.get("schema_version") != SCHEMA_VERSION:
                    raise ValueError("bad schema_version")
                entry = StoreEntry(int(d["n"]), str(d["problem"]), int(d["psi"]), d["witness"])
            except (ValueError, KeyError, TypeError) as exc:
                raise CorruptStore(f"{self.path}:{lineno}: unreadable entry ({exc})") from None
            old = best.get(entry.key)
            if old is None or entry.psi < old.psi:
                best[entry.key] = entry
        return best

    def get(self, n: int, problem: str) -> Optional[StoreEntry]:
        return self.load().get((n, problem))

    def offer(self, n: int, problem: str, psi: int, witness: list) -> bool:
        """Append the witness if it beats the stored one; return whether it did."""
        old = self.get(n, problem)
        if old is not None and old.psi <= psi:
            return False
        line = json.dumps({"schema_version": SCHEMA_VERSION, "n": n, "problem": problem,
                           "psi": psi, "witness": witness}, sort_keys=True)
        with self.path.open("a") as fh:
            fh.write(line + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        return True

    def compact(self) -> None:
        """Rewrite the log with one entry per key, atomically."""
        best = self.load()
        lines = [json.dumps({"schema_version": SCHEMA_VERSION, "n": e.n, "problem": e.problem,
                             "psi": e.psi, "witness": e.witness}, sort_keys=True)
                 for e in sorted(best.values(), key=lambda e: e.key)]
        fd, tmp = tempfile.mkstemp(dir=self.path.parent, prefix=self.path.name, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            fh.write("".join(line + "\n" for line in lines))
        os.replace(tmp, self.path)

