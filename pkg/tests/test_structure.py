import numpy as np
import pytest

from sneakpath import ChannelParams, SFPattern, compute_sp_indicators, sample_data
from sneakpath.channel import InfeasibleSFError, place_sfs
from sneakpath.structure import (
    COMPLETE,
    EVENT_FORMS,
    INCOMPLETE,
    NON_SP,
    classify_line_types,
    estimate_event_frequency,
    event_is_lower_bound,
    event_probability,
    sp_supports,
    verify_intersection_correspondence,
)


def rng_of(seed):
    return np.random.default_rng(seed)


def random_double_instance(n, q, rng):
    while True:
        x = sample_data(n, q, rng)
        try:
            sf = place_sfs(x, 2, rng)
        except InfeasibleSFError:
            continue
        return x, sf, compute_sp_indicators(x, sf)


class TestSupports:
    def test_demo_array(self, demo_x):
        sup = sp_supports(demo_x, SFPattern(((0, 3),)))
        # Failure row 0 holds a support at column 1; failure column 3 at rows 2, 3.
        assert np.array_equal(np.argwhere(sup.cells), [[0, 1], [2, 3], [3, 3]])
        assert sup.row_counts.tolist() == [1, 0, 1, 1]
        assert sup.col_counts.tolist() == [0, 1, 0, 2]

    def test_no_failures(self, demo_x):
        sup = sp_supports(demo_x, SFPattern(()))
        assert sup.cells.sum() == 0
        assert sup.row_counts.sum() == 0

    def test_saturated_array(self):
        x = np.ones((6, 6), dtype=np.uint8)
        sup = sp_supports(x, SFPattern(((2, 4),)))
        assert sup.row_counts[2] == 5
        assert sup.col_counts[4] == 5


class TestClassification:
    def test_no_failures_all_clear(self, demo_x):
        e = np.zeros_like(demo_x)
        types = classify_line_types(demo_x, e, SFPattern(()))
        assert np.all(types.row_types == NON_SP)
        assert np.all(types.col_types == NON_SP)

    def test_single_failure_never_partial(self):
        rng = rng_of(2)
        for _ in range(50):
            x = sample_data(12, 0.5, rng)
            try:
                sf = place_sfs(x, 1, rng)
            except InfeasibleSFError:
                continue
            e = compute_sp_indicators(x, sf)
            types = classify_line_types(x, e, sf)
            assert INCOMPLETE not in types.row_types
            assert INCOMPLETE not in types.col_types

    def test_single_failure_lines_clear(self):
        rng = rng_of(3)
        for _ in range(50):
            x = sample_data(12, 0.5, rng)
            sf = place_sfs(x, 1, rng)
            (i, j) = sf.pairs[0]
            e = compute_sp_indicators(x, sf)
            types = classify_line_types(x, e, sf)
            assert types.row_types[i] == NON_SP
            assert types.col_types[j] == NON_SP

    def test_handcrafted_partial_lines(self):
        # Two failures at (0,0) and (1,1); row 4 is supported only via
        # column 0, column 5 only via row 1, and they cross at a stored 0
        # that closes no path: both lines are partially affected.
        x = np.zeros((6, 6), dtype=np.uint8)
        for cell in [(0, 0), (1, 1), (4, 0), (0, 2), (2, 1), (1, 5)]:
            x[cell] = 1
        sf = SFPattern(((0, 0), (1, 1)))
        e = compute_sp_indicators(x, sf)
        types = classify_line_types(x, e, sf)
        assert types.row_types.tolist() == [0, 0, INCOMPLETE, 0, INCOMPLETE, 0]
        assert types.col_types.tolist() == [0, 0, INCOMPLETE, 0, 0, INCOMPLETE]

    def test_partial_lines_single_supported(self):
        # Deterministic half of the support-count correspondence.
        rng = rng_of(4)
        for _ in range(40):
            x, sf, e = random_double_instance(10, 0.5, rng)
            sup = sp_supports(x, sf)
            types = classify_line_types(x, e, sf)
            for m in np.flatnonzero(types.row_types == INCOMPLETE):
                assert sup.row_counts[m] == 1
            for n in np.flatnonzero(types.col_types == INCOMPLETE):
                assert sup.col_counts[n] == 1

    def test_sp_lines_are_supported(self):
        rng = rng_of(5)
        for _ in range(40):
            x, sf, e = random_double_instance(10, 0.4, rng)
            sup = sp_supports(x, sf)
            assert np.all(sup.cells.any(axis=1)[e.any(axis=1)])
            assert np.all(sup.cells.any(axis=0)[e.any(axis=0)])

    def test_same_failure_support_equivalence(self):
        # A stored 0 is a sneak-path cell iff its row and column both hold
        # a support attributed to one common failure.
        rng = rng_of(6)
        for _ in range(40):
            x, sf, e = random_double_instance(10, 0.5, rng)
            sup = sp_supports(x, sf)
            common = np.zeros(x.shape, dtype=bool)
            for k in range(len(sf)):
                common |= sup.row_has_from[k][:, None] & sup.col_has_from[k][None, :]
            assert np.array_equal(e == 1, (x == 0) & common)


class TestIntersectionCorrespondence:
    def test_requires_double(self, demo_x):
        types = classify_line_types(demo_x, np.zeros_like(demo_x), SFPattern(()))
        with pytest.raises(ValueError):
            verify_intersection_correspondence(demo_x, SFPattern(((0, 3),)), types)

    def test_random_instances_consistent(self):
        rng = rng_of(7)
        for _ in range(60):
            x, sf, e = random_double_instance(12, 0.5, rng)
            types = classify_line_types(x, e, sf)
            report = verify_intersection_correspondence(x, sf, types)
            assert report.ok, report.violations

    def test_zero_crossing_forces_clear_lines(self):
        rng = rng_of(8)
        seen = 0
        for _ in range(60):
            x, sf, e = random_double_instance(12, 0.5, rng)
            (i, j), (ip, jp) = sf.pairs
            types = classify_line_types(x, e, sf)
            if x[i, jp] == 0:
                seen += 1
                assert types.row_types[i] == NON_SP
                assert types.col_types[jp] == NON_SP
        assert seen > 5

    def test_complete_line_forces_one_crossing(self):
        rng = rng_of(9)
        seen = 0
        for _ in range(60):
            x, sf, e = random_double_instance(12, 0.5, rng)
            (i, j), (ip, jp) = sf.pairs
            types = classify_line_types(x, e, sf)
            if types.row_types[i] == COMPLETE:
                seen += 1
                assert x[i, jp] == 1
        assert seen > 5


class TestEventProbability:
    def test_known_values(self):
        assert event_probability("single_sf_supported_line_complete", 0.5, 4) == pytest.approx(0.578125, abs=1e-15)
        assert event_probability("double_sf_double_supported_complete", 0.5, 3) == pytest.approx(0.375, abs=1e-15)

    def test_limits(self):
        for event in ("single_sf_supported_line_complete",
                      "double_sf_double_supported_complete",
                      "double_sf_cross_one_line_complete"):
            assert event_probability(event, 0.5, 500) == pytest.approx(1.0, abs=1e-9)

    def test_unknown_event(self):
        with pytest.raises(KeyError):
            event_probability("nope", 0.5, 8)

    def test_validation(self):
        with pytest.raises(ValueError):
            event_probability("single_sf_supported_line_complete", 0.0, 8)
        with pytest.raises(ValueError):
            event_probability("single_sf_supported_line_complete", 0.5, 2)

    def test_bound_flags(self):
        assert not event_is_lower_bound("single_sf_supported_line_complete")
        assert event_is_lower_bound("double_sf_single_supported_incomplete")


class TestEventFrequencies:
    def test_all_events_behave_at_small_scale(self):
        # Smoke-scale version of the full check; 4 standard errors of slack
        # keeps the flake rate negligible at 20k trials.
        for k, event in enumerate(sorted(EVENT_FORMS)):
            est = estimate_event_frequency(event, 16, 0.5, 20000, seed=100 + k)
            assert est.samples > 1000
            assert est.within(4.0), (event, est.frequency, est.predicted, est.z)

    def test_estimate_reproducible(self):
        a = estimate_event_frequency("single_sf_supported_line_complete", 12, 0.5, 5000, seed=3)
        b = estimate_event_frequency("single_sf_supported_line_complete", 12, 0.5, 5000, seed=3)
        assert (a.samples, a.successes) == (b.samples, b.successes)
