"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline; they are
also repeated in the terminal summary.
"""

from fractions import Fraction
from itertools import permutations
from math import ceil, factorial

import numpy as np
import pytest

from modcollinear.counting import IncrementalCounter, count_fast, count_naive
from modcollinear.formats import registry_pointset
from modcollinear.plane import Permutation, PointSet
from modcollinear.profile import expected_enumerate, expected_exact, proof_trace
from modcollinear.search import SearchConfig, anneal_min, exhaustive_min, subset_survey, verify_bounds

pytestmark = pytest.mark.acceptance

RESULTS: dict[int, str] = {}


def report(k: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}"
    RESULTS[k] = line
    print(line)
    assert ok, line


def test_criterion_1_expected_value():
    bad = []
    for n in (3, 5, 7, 101):
        if expected_exact(n) != Fraction(n * (n - 1), 6):
            bad.append(f"exact n={n}")
    for n in (3, 5, 7):
        if expected_enumerate(n) != Fraction(n * (n - 1), 6):
            bad.append(f"enumerate n={n}")
    report(1, not bad, "E = n(n-1)/6 exactly for n in {3,5,7,101}, enumeration agrees for n <= 7"
           + (f"; mismatches {bad}" if bad else ""))


def test_criterion_2_named_examples():
    values = {}
    for name in ("gamma1", "gamma2"):
        g = registry_pointset(name)
        values[name] = (count_naive(g).total, count_fast(g).total)
    ok = values == {"gamma1": (0, 0), "gamma2": (2, 2)}
    report(2, ok, f"(naive, fast) psi: gamma1 {values['gamma1']}, gamma2 {values['gamma2']}")


def test_criterion_3_lower_bound_small_n():
    checked, worst = 0, []
    for n in (5, 7):
        bound = ceil((n - 1) / 4)
        lo = min(count_naive(Permutation.from_image(p)).total for p in permutations(range(n)))
        checked += factorial(n)
        worst.append((n, lo, bound))
    ok = checked == 120 + 5040 and all(lo >= b for _, lo, b in worst)
    report(3, ok, f"{checked} permutations; (n, min psi, bound) = {worst}")


@pytest.mark.slow
def test_criterion_4_proof_tracer():
    rng = np.random.Generator(np.random.PCG64(4))
    per_n, failures = 10_000, []
    labels = set()
    for n in (5, 7, 11, 13, 101):
        for _ in range(per_n):
            t = proof_trace(Permutation.random(n, rng), strict=False)
            labels.update(s.label for s in t.steps)
            if not t.passed:
                failures.append((n, t.perm, [s.label for s in t.failures()]))
    required = ("sum of points", "sum of pairs", "triples", "spectrum points", "spectrum pairs",
                "doubled difference", "ratio", "key estimate", "integer rounding",
                "positive parts", "final")
    missing = [r for r in required if not any(r in label for label in labels)]
    ok = not failures and not missing
    report(4, ok, f"{5 * per_n} traces over n in {{5,7,11,13,101}}, {len(labels)} step kinds, "
           f"{len(failures)} failures" + (f", missing steps {missing}" if missing else ""))


@pytest.mark.slow
def test_criterion_5_oracle_equivalence():
    problems = []
    for p in permutations(range(5)):
        perm = Permutation.from_image(p)
        if count_naive(perm) != count_fast(perm):
            problems.append(("perm", p))
    rng = np.random.Generator(np.random.PCG64(5))
    sets = 0
    for n in (5, 7, 11):
        for _ in range(1000):
            size = int(rng.integers(0, min(3 * n, n * n) + 1))
            idx = rng.choice(n * n, size=size, replace=False)
            g = PointSet.from_points([(int(i) // n, int(i) % n) for i in idx], n)
            sets += 1
            if count_naive(g) != count_fast(g):
                problems.append(("set", n, g.points))
    for n in (11, 101):
        counter = IncrementalCounter(Permutation.random(n, rng))
        for _ in range(10_000):
            i, j = rng.choice(n, size=2, replace=False)
            counter.swap(int(i), int(j))
        if counter.total != count_naive(counter.perm).total:
            problems.append(("incremental", n))
    report(5, not problems, f"120 permutations, {sets} point sets, 2 x 10^4 swaps; "
           f"{len(problems)} disagreements")


def test_criterion_6_conjecture_probe():
    rows, ok = [], True
    for n in (3, 5, 7, 11):
        r = exhaustive_min(SearchConfig(n))
        rep = verify_bounds(r)
        lo, hi = ceil((n - 1) / 4), (n - 1) // 2
        ok &= lo <= r.min_psi <= hi and rep.status == "conjecture-consistent"
        ok &= all(count_naive(w).total == r.min_psi for w in r.witnesses)
        rows.append((n, r.min_psi, rep.status))
    minima = {n: m for n, m, _ in rows}
    ok &= minima[3] == 1 and minima[5] == 2 and minima[7] == 3
    report(6, ok, "exhaustive minima " + ", ".join(f"n={n}: {m} ({s})" for n, m, s in rows))


def test_criterion_7_subset_thresholds():
    got = {size: subset_survey(5, size, mode="full") for size in (6, 7, 8)}
    ok = (got[6].min_psi == 0 and got[7].min_psi == 2 == ceil((5 + 1) / 4) and got[8].min_psi >= 1)
    ok &= all(count_naive(r.witness).total == r.min_psi for r in got.values())
    ok &= [r.evaluated for r in got.values()] == [177_100, 480_700, 1_081_575]
    report(7, ok, "n=5 full enumeration min psi: "
           + ", ".join(f"{s} points -> {r.min_psi}" for s, r in got.items()))


def _exhaustive_fingerprint(workers):
    r = exhaustive_min(SearchConfig(11, workers=workers))
    return r.min_psi, r.minimizers, r.evaluated, [w.image for w in r.witnesses]


def _survey_fingerprint(workers, mode="full", seed=0):
    r = subset_survey(5, 7, mode=mode, workers=workers, seed=seed, samples=2000)
    return r.min_psi, r.witness.points, r.zero_count, r.evaluated


def _anneal_fingerprint(workers, seed):
    r = anneal_min(SearchConfig(13, mode="anneal", seed=seed, restarts=4, steps=20_000, workers=workers))
    return r.min_psi, [w.image for w in r.witnesses], r.evaluated


@pytest.mark.slow
def test_criterion_8_determinism():
    checks = {
        "exhaustive": [_exhaustive_fingerprint(1), _exhaustive_fingerprint(1), _exhaustive_fingerprint(2)],
        "survey full": [_survey_fingerprint(1), _survey_fingerprint(1), _survey_fingerprint(2)],
        "survey sample": [_survey_fingerprint(1, "sample", 8), _survey_fingerprint(1, "sample", 8)],
        "anneal": [_anneal_fingerprint(1, 9), _anneal_fingerprint(1, 9), _anneal_fingerprint(2, 9)],
    }
    unstable = [k for k, v in checks.items() if any(x != v[0] for x in v[1:])]
    report(8, not unstable,
           "reruns and worker counts 1/2 identical for " + ", ".join(checks)
           + (f"; unstable: {unstable}" if unstable else ""))
