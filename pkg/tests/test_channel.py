import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracle_sp import brute_force_sp_cells
from sneakpath import (
    ChannelParams,
    InfeasibleSFError,
    SFPattern,
    compute_sp_indicators,
    resistance,
    resistance_map,
    sample_data,
    sample_instance,
    sample_readout,
    sample_sf_pattern,
)
from sneakpath.channel import place_sfs, sample_sf_count


def rng_of(seed):
    return np.random.default_rng(seed)


class TestChannelParams:
    def test_reference_values(self, ref_params):
        assert ref_params.r0_prime == pytest.approx(200.0, abs=1e-12)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(r0=100.0, r1=100.0),
            dict(r0=50.0, r1=100.0),
            dict(rs=0.0),
            dict(sigma=0.0),
            dict(q=0.0),
            dict(q=1.0),
        ],
    )
    def test_invalid_params_rejected(self, kwargs):
        with pytest.raises(ValueError):
            ChannelParams(**kwargs)


class TestSampleData:
    def test_degenerate_all_ones(self):
        assert sample_data(4, 1.0, rng_of(0)).min() == 1

    def test_zero_probability_rejected(self):
        with pytest.raises(ValueError):
            sample_data(4, 0.0, rng_of(0))

    def test_tiny_dimension_rejected(self):
        with pytest.raises(ValueError):
            sample_data(1, 0.5, rng_of(0))

    def test_bernoulli_mean_concentrates(self):
        # 3-sigma band for 128^2 fair draws.
        bits = sample_data(128, 0.5, rng_of(42))
        assert 0.47 <= bits.mean() <= 0.53

    def test_deterministic_given_stream(self):
        a = sample_data(32, 0.5, rng_of(7))
        b = sample_data(32, 0.5, rng_of(7))
        assert np.array_equal(a, b)


class TestSFPattern:
    def test_cardinality_capped(self):
        with pytest.raises(ValueError):
            SFPattern(((0, 0), (1, 1), (2, 2)))

    def test_shared_line_rejected(self):
        with pytest.raises(ValueError):
            SFPattern(((0, 0), (0, 3)))
        with pytest.raises(ValueError):
            SFPattern(((0, 2), (3, 2)))

    def test_must_sit_on_ones(self, demo_x):
        SFPattern(((0, 3),)).validate_against(demo_x)
        with pytest.raises(ValueError):
            SFPattern(((0, 0),)).validate_against(demo_x)


class TestSampleSFPattern:
    def test_forced_empty(self, demo_x):
        assert len(sample_sf_pattern(demo_x, (1.0, 0.0, 0.0), rng_of(0))) == 0

    def test_single_lands_on_a_one(self, demo_x):
        ones = {tuple(c) for c in np.argwhere(demo_x == 1)}
        for seed in range(20):
            sf = sample_sf_pattern(demo_x, (0.0, 1.0, 0.0), rng_of(seed))
            assert sf.pairs[0] in ones

    def test_infeasible_double_signaled(self):
        x = np.zeros((4, 4), dtype=np.uint8)
        x[1, 2] = 1
        with pytest.raises(InfeasibleSFError):
            sample_sf_pattern(x, (0.0, 0.0, 1.0), rng_of(0))

    def test_unnormalized_distribution_rejected(self, demo_x):
        with pytest.raises(ValueError):
            sample_sf_pattern(demo_x, (0.5, 0.4, 0.2), rng_of(0))

    def test_double_respects_constraints(self):
        rng = rng_of(3)
        x = sample_data(8, 0.5, rng)
        for _ in range(50):
            sf = place_sfs(x, 2, rng)
            (i, j), (ip, jp) = sf.pairs
            assert i != ip and j != jp
            assert x[i, j] == 1 and x[ip, jp] == 1

    def test_count_marginals(self):
        rng = rng_of(11)
        counts = [0, 0, 0]
        for _ in range(3000):
            counts[sample_sf_count((0.5, 0.4, 0.1), rng)] += 1
        assert abs(counts[0] / 3000 - 0.5) < 0.03
        assert abs(counts[2] / 3000 - 0.1) < 0.02


class TestSPIndicators:
    def test_demo_array_sneak_paths(self, demo_x):
        e = compute_sp_indicators(demo_x, SFPattern(((0, 3),)))
        expected = np.zeros((4, 4), dtype=np.uint8)
        expected[2, 1] = 1
        expected[3, 1] = 1
        assert np.array_equal(e, expected)

    def test_no_failures_no_sneak_paths(self, demo_x):
        assert compute_sp_indicators(demo_x, SFPattern(())).sum() == 0

    def test_matches_brute_force_oracle(self):
        rng = rng_of(5)
        for _ in range(60):
            x = sample_data(8, 0.5, rng)
            try:
                sf = place_sfs(x, 2, rng)
            except InfeasibleSFError:
                continue
            got = compute_sp_indicators(x, sf)
            want = np.array(brute_force_sp_cells(x.tolist(), list(sf.pairs)), dtype=np.uint8)
            assert np.array_equal(got, want)

    def test_only_zero_cells_marked(self):
        rng = rng_of(6)
        for _ in range(20):
            x = sample_data(10, 0.6, rng)
            sf = place_sfs(x, 2, rng)
            e = compute_sp_indicators(x, sf)
            assert not np.any((e == 1) & (x == 1))

    def test_monotone_in_failures(self):
        rng = rng_of(9)
        for _ in range(20):
            x = sample_data(10, 0.5, rng)
            sf2 = place_sfs(x, 2, rng)
            sf1 = SFPattern((sf2.pairs[0],))
            e1 = compute_sp_indicators(x, sf1)
            e2 = compute_sp_indicators(x, sf2)
            assert np.all(e2 >= e1)

    def test_single_failure_closed_form(self):
        rng = rng_of(13)
        for _ in range(20):
            x = sample_data(9, 0.5, rng)
            sf = place_sfs(x, 1, rng)
            (i, j) = sf.pairs[0]
            want = ((x == 0) & (np.outer(x[:, j], x[i, :]) == 1)).astype(np.uint8)
            assert np.array_equal(compute_sp_indicators(x, sf), want)

    def test_double_failure_closed_form(self):
        rng = rng_of(14)
        for _ in range(20):
            x = sample_data(9, 0.5, rng)
            sf = place_sfs(x, 2, rng)
            (i, j), (ip, jp) = sf.pairs
            u = (np.outer(x[:, j], x[i, :]) | np.outer(x[:, jp], x[ip, :])) == 1
            want = ((x == 0) & u).astype(np.uint8)
            assert np.array_equal(compute_sp_indicators(x, sf), want)


class TestResistance:
    def test_reference_levels(self, ref_params):
        assert resistance(1, 0, ref_params) == 100.0
        assert resistance(0, 0, ref_params) == 1000.0

    def test_sneak_path_level(self):
        params = ChannelParams(r0=1000.0, r1=100.0, rs=250.0, sigma=1.0, q=0.5)
        assert resistance(0, 1, params) == pytest.approx(200.0, abs=1e-12)

    def test_map_matches_scalar(self, demo_x, ref_params):
        e = compute_sp_indicators(demo_x, SFPattern(((0, 3),)))
        r = resistance_map(demo_x, e, ref_params)
        for m in range(4):
            for n in range(4):
                assert r[m, n] == resistance(demo_x[m, n], e[m, n], ref_params)


class TestReadout:
    def test_vanishing_noise(self, demo_x, ref_params):
        params = ref_params.with_sigma(1e-12)
        e = compute_sp_indicators(demo_x, SFPattern(((0, 3),)))
        y = sample_readout(demo_x, e, params, rng_of(0))
        assert np.max(np.abs(y - resistance_map(demo_x, e, params))) < 1e-9

    def test_demo_levels(self, demo_x, ref_params):
        params = ref_params.with_sigma(1e-9)
        e = compute_sp_indicators(demo_x, SFPattern(((0, 3),)))
        y = sample_readout(demo_x, e, params, rng_of(1))
        assert y[2, 1] == pytest.approx(200.0, abs=1e-6)
        assert y[2, 0] == pytest.approx(1000.0, abs=1e-6)
        assert y[2, 3] == pytest.approx(100.0, abs=1e-6)

    def test_mean_concentration(self, ref_params):
        # 16 cells at r1: sample mean within 100 +- 3*30/4.
        x = np.ones((4, 4), dtype=np.uint8)
        e = np.zeros((4, 4), dtype=np.uint8)
        y = sample_readout(x, e, ref_params, rng_of(2))
        assert abs(y.mean() - 100.0) <= 22.5

    def test_shape_mismatch_rejected(self, ref_params):
        with pytest.raises(ValueError):
            sample_readout(np.zeros((4, 4), np.uint8), np.zeros((3, 3), np.uint8),
                           ref_params, rng_of(0))


class TestInstanceGeneration:
    def test_reproducible_end_to_end(self, ref_params):
        seq = lambda: np.random.default_rng(np.random.SeedSequence(entropy=123, spawn_key=(0, 5)))
        a = sample_instance(16, ref_params, (0.5, 0.4, 0.1), seq())
        b = sample_instance(16, ref_params, (0.5, 0.4, 0.1), seq())
        assert np.array_equal(a[0], b[0])
        assert a[1].pairs == b[1].pairs
        assert np.array_equal(a[2], b[2])
        assert np.array_equal(a[3], b[3])

    def test_indicators_consistent(self, ref_params):
        rng = rng_of(21)
        for _ in range(10):
            x, sf, e, y = sample_instance(12, ref_params, (0.2, 0.4, 0.4), rng)
            assert np.array_equal(e, compute_sp_indicators(x, sf))
            assert y.shape == x.shape


@given(st.integers(2, 10), st.floats(0.05, 0.95), st.integers(0, 2**31 - 1))
@settings(max_examples=40, deadline=None)
def test_sampled_bits_are_binary(n, q, seed):
    bits = sample_data(n, q, rng_of(seed))
    assert bits.shape == (n, n)
    assert set(np.unique(bits)) <= {0, 1}
