"""Collinear triples modulo a prime n in permutation graphs and point sets."""

from .counting import (IncrementalCounter, TripleCount, count_fast, count_fast_permutation,
                       count_fast_pointset, count_naive, incr_init, incr_swap)
from .plane import (AffineSymmetry, Permutation, Point, PointSet, PrimeModulus, apply_symmetry,
                    collinear, make_modulus, normalize)
from .profile import (LineProfile, ProofTrace, SlopeClassProfile, expected_enumerate,
                      expected_exact, expected_sample, line_profile, proof_trace, slope_profile)
from .search import (SearchConfig, SearchResult, SubsetSurveyResult, anneal_min, canonical_key,
                     exhaustive_min, subset_survey, verify_bounds)

__version__ = "0.1.0"
