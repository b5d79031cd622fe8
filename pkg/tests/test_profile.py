from fractions import Fraction
from itertools import combinations, permutations
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import modcollinear.profile as prof
from modcollinear.counting import count_fast_permutation
from modcollinear.errors import CapExceeded, ProofAssertionFailure, SlopeOutOfRange
from modcollinear.plane import Permutation
from modcollinear.profile import (expected_enumerate, expected_exact, expected_sample, line_profile,
                                  line_profiles, proof_trace, slope_profile)


def pair_sizes(image, n):
    sizes = [0] * n
    for i, j in combinations(range(n), 2):
        sizes[((image[j] - image[i]) * pow(j - i, -1, n)) % n] += 1
    return sizes[1:]


def test_slope_profile_identity():
    sp = slope_profile(Permutation.identity(5))
    assert sp.sizes == (10, 0, 0, 0)
    assert sp.excess == (8, -2, -2, -2)
    assert sum(sp.excess) == 2


def test_slope_profile_transposition():
    sp = slope_profile(Permutation.from_image((1, 0, 2, 3, 4)))
    assert sp.sizes == (3, 2, 2, 3)
    assert sp.excess == (1, 0, 0, 1)


@settings(max_examples=150, deadline=None)
@given(st.sampled_from([3, 5, 7, 11, 13, 31, 101]), st.randoms(use_true_random=False))
def test_slope_profile_sums(n, r):
    image = list(range(n))
    r.shuffle(image)
    sp = slope_profile(Permutation.from_image(image))
    assert sum(sp.sizes) == comb(n, 2)
    assert sum(sp.excess) == (n - 1) // 2
    if n <= 31:
        assert list(sp.sizes) == pair_sizes(image, n)


def test_line_profile_examples():
    ident = Permutation.identity(5)
    lp = line_profile(ident, 1)
    assert sorted(lp.v) == [0, 0, 0, 0, 5]
    assert lp.m[5] == 1 and lp.m[0] == 4
    lp = line_profile(ident, 2)
    assert lp.v == (1, 1, 1, 1, 1)
    assert lp.m[1] == 5
    with pytest.raises(SlopeOutOfRange):
        line_profile(ident, 0)
    with pytest.raises(SlopeOutOfRange):
        line_profile(ident, 5)


@pytest.mark.parametrize("n", [5, 7, 11, 13, 101])
def test_line_profile_identities(n, rng):
    for _ in range(20):
        p = Permutation.random(n, rng)
        sp = slope_profile(p)
        per = count_fast_permutation(p).per_slope
        for lp in line_profiles(p):
            k = lp.slope
            assert lp == line_profile(p, k)
            assert sum(lp.v) == n
            assert sum(i * mi for i, mi in enumerate(lp.m)) == n
            assert sum(comb(v, 2) for v in lp.v) == sp.size(k)
            assert sum(mi * comb(i, 2) for i, mi in enumerate(lp.m)) == (n - 1) // 2 + sp.b(k)
            assert lp.triples() == per[k] == sum(comb(v, 3) for v in lp.v)


def test_ratio_fact():
    for n in (5, 101):
        for i in range(3, n + 1):
            ratio = Fraction(comb(i, 3), 2 * comb(i, 2) - i)
            assert ratio == Fraction(i - 1, 6) >= Fraction(1, 3)


def test_trace_identity():
    t = proof_trace(Permutation.identity(5))
    assert t.passed
    assert list(t.excess) == [8, -2, -2, -2]
    assert int(t.psi_by_slope[0]) == 10
    assert t.positive_excess_sum == 8
    assert t.half_ceiling_sum == 4
    assert t.bound == 1 and t.psi == 10
    assert "final: 10 >= 1" in prof.render_trace(t)


def test_trace_transposition():
    t = proof_trace(Permutation.from_image((1, 0, 2, 3, 4)))
    assert t.passed and t.psi == 2 and t.bound == 1
    assert t.positive_excess_sum == 2 and t.half_ceiling_sum == 2


def test_trace_covers_every_step():
    labels = [s.label for s in proof_trace(Permutation.identity(7)).steps]
    for fragment in ("sum of points", "sum of pairs", "triples", "spectrum points", "spectrum pairs",
                     "doubled difference", "ratio", "key estimate", "integer rounding",
                     "positive parts", "final"):
        assert any(fragment in label for label in labels), fragment


def test_trace_detects_tampering(monkeypatch):
    real = prof.perm_line_counts

    def broken(p):
        v = real(p).copy()
        v[0, 0] += 1
        return v

    monkeypatch.setattr(prof, "perm_line_counts", broken)
    p = Permutation.identity(5)
    with pytest.raises(ProofAssertionFailure) as info:
        proof_trace(p)
    assert info.value.label.startswith("sum of points")
    assert info.value.slope == 1
    t = proof_trace(p, strict=False)
    assert not t.passed


@pytest.mark.parametrize("n", [5, 7, 11, 13, 101])
def test_trace_random(n, rng):
    for _ in range(300):
        t = proof_trace(Permutation.random(n, rng))
        assert t.psi >= t.half_ceiling_sum >= t.bound
        assert t.singleton_bound_sum >= t.half_ceiling_sum


def test_trace_exhaustive_s7():
    for image in permutations(range(7)):
        assert proof_trace(Permutation.from_image(image), strict=False).passed


def test_trace_record_round_trips_to_json():
    import json

    d = proof_trace(Permutation.identity(5)).to_dict()
    assert json.loads(json.dumps(d)) == d


@pytest.mark.parametrize("n, expected", [(3, Fraction(1)), (5, Fraction(10, 3)), (7, Fraction(7)),
                                         (101, Fraction(101 * 100, 6))])
def test_expected_exact(n, expected):
    assert expected_exact(n) == expected


def test_expected_enumerate():
    assert expected_enumerate(3) == 1
    assert expected_enumerate(5) == Fraction(400, 120) == Fraction(10, 3)
    assert expected_enumerate(7) == 7
    with pytest.raises(CapExceeded):
        expected_enumerate(11)


def test_expected_sample_three_is_exact():
    est = expected_sample(3, 500, seed=3)
    assert est.mean == 1.0 and est.stderr == 0.0


def test_expected_sample_reproducible():
    a = expected_sample(5, 100_000, seed=11)
    b = expected_sample(5, 100_000, seed=11)
    assert a == b
    assert expected_sample(5, 1000, seed=12) != expected_sample(5, 1000, seed=13)


def test_expected_sample_large_n():
    est = expected_sample(101, 100_000, seed=1)
    assert abs(est.mean - 101 * 100 / 6) <= 4 * est.stderr


def test_sample_stream_is_uniform_shuffle():
    rows = np.concatenate(list(prof.sample_permutations(5, 12_000, seed=5)))
    assert rows.shape == (12_000, 5)
    assert (np.sort(rows, axis=1) == np.arange(5)).all()
    counts = np.bincount(rows[:, 0], minlength=5)
    assert counts.min() > 2200 and counts.max() < 2600
