import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from normwalk.errors import DomainError
from normwalk.montecarlo import (
    Ecdf,
    bernstein_bound,
    correlation_band,
    correlation_band_check,
    ks_critical_value,
    ks_distance,
    log_binomial,
    long_pattern_tail_check,
    overstep_tail_check,
    sample_distribution,
)
from normwalk.sequence import SeedSpec

samples = st.lists(st.integers(-20, 20).map(lambda x: x / 4), min_size=1, max_size=60)


class TestEcdf:
    def test_single_value(self):
        e = Ecdf([0.5])
        assert e.cdf(0.49) == 0.0 and e.cdf(0.5) == 1.0
        assert e.quantile(0.0) == e.quantile(1.0) == 0.5

    def test_quantile_and_cdf(self):
        e = Ecdf([3.0, 1.0, 2.0, 2.0])
        assert e.cdf(2.0) == 0.75
        assert e.quantile(0.5) == 2.0
        assert e.quantile(0.76) == 3.0
        assert e.cdf([0.0, 10.0]).tolist() == [0.0, 1.0]

    def test_empty(self):
        with pytest.raises(DomainError):
            Ecdf([])

    def test_csv_round_trip(self, tmp_path):
        e = Ecdf([0.1, 1 / 3, 2.5], {"kind": "normality", "N": 8})
        path = tmp_path / "e.csv"
        e.to_csv(path)
        text = path.read_text()
        assert text.startswith("# kind=normality\n# N=8\nvalue\n")
        back = Ecdf.from_csv(path)
        assert np.array_equal(back.values, e.values)
        assert back.metadata == {"kind": "normality", "N": "8"}


class TestKs:
    def test_identical(self):
        assert ks_distance(Ecdf([1.0, 2.0]), Ecdf([2.0, 1.0])) == 0

    def test_disjoint(self):
        assert ks_distance(Ecdf([1.0, 2.0]), Ecdf([3.0, 4.0, 5.0])) == 1

    def test_small_example(self):
        assert ks_distance(Ecdf([1.0, 3.0]), Ecdf([2.0])) == 0.5

    @given(samples, samples)
    def test_matches_scipy(self, a, b):
        ref = stats.ks_2samp(a, b).statistic
        assert ks_distance(Ecdf(a), Ecdf(b)) == pytest.approx(ref, abs=1e-12)

    @given(samples, samples, samples)
    def test_metric_properties(self, a, b, c):
        A, B, C = Ecdf(a), Ecdf(b), Ecdf(c)
        assert ks_distance(A, A) == 0
        assert ks_distance(A, B) == ks_distance(B, A)
        assert ks_distance(A, C) <= ks_distance(A, B) + ks_distance(B, C) + 1e-12
        assert 0 <= ks_distance(A, B) <= 1

    def test_critical_value(self):
        # c(0.01) = 1.6276 for the Kolmogorov distribution
        assert ks_critical_value(2000, 2000) == pytest.approx(1.62762 * math.sqrt(2 / 2000), rel=1e-4)
        assert ks_critical_value(100, 100, 0.05) < ks_critical_value(100, 100, 0.01)


class TestBernstein:
    def test_t_zero(self):
        assert bernstein_bound(0, 10, 1.0) == 2.0

    def test_value(self):
        assert bernstein_bound(300, 10**4, 1.0) == pytest.approx(2 * math.exp(-90000 / 20200))

    def test_monotone_in_t(self):
        values = [bernstein_bound(t, 1000, 1.0) for t in range(0, 400, 20)]
        assert values == sorted(values, reverse=True)

    def test_invalid(self):
        with pytest.raises(DomainError):
            bernstein_bound(-1, 10, 1.0)

    def test_dominates_simulated_maximum(self):
        N, paths, t = 10**4, 10**4, 300
        hits = 0
        for b in range(10):
            steps = SeedSpec(606, b).generator().integers(0, 2, size=(paths // 10, N), dtype=np.int8) * 2 - 1
            walk = np.cumsum(steps, axis=1, dtype=np.int32)
            hits += int(np.count_nonzero(np.abs(walk).max(axis=1) > t))
        assert hits / paths <= bernstein_bound(t, N, 1.0)


@pytest.mark.parametrize("N, k", [(n, k) for n in range(0, 61, 3) for k in sorted({0, 1, 2, n // 2, n}) if k <= n])
def test_log_binomial(N, k):
    assert log_binomial(N, k) == pytest.approx(math.log(math.comb(N, k)), abs=1e-10)


class TestSampling:
    def test_thread_count_does_not_change_values(self):
        base = sample_distribution("normality", 256, 40, seed=9, workers=1)
        for w in (4, 16):
            assert np.array_equal(sample_distribution("normality", 256, 40, seed=9, workers=w).values, base.values)

    def test_kinds(self):
        e = sample_distribution("restricted", 64, 5, seed=1, d=4)
        assert e.metadata["d"] == 4
        assert sample_distribution("well-distribution", 64, 5).count == 5
        with pytest.raises(DomainError):
            sample_distribution("restricted", 63, 5, d=4)
        with pytest.raises(DomainError):
            sample_distribution("bogus", 64, 5)

    def test_values_are_normalised(self):
        e = sample_distribution("normality", 1024, 50, seed=3)
        assert 0.2 < e.quantile(0.5) < 2.0


class TestTailChecks:
    def test_overstep_report(self):
        r = overstep_tail_check(4, 256, samples=1000, seed=1)
        d = r.to_dict()
        assert d["lemma"] == "overstep" and d["bound"] == pytest.approx(1 / 15)
        assert d["threshold"] == pytest.approx(6 * 16 * math.sqrt(math.log(4)) / 2)
        assert d["verdict"] in ("pass", "fail") and r.passed == (d["verdict"] == "pass")

    def test_overstep_frequency_not_increasing_in_d(self):
        r4 = overstep_tail_check(4, 1024, samples=1000, seed=2)
        r8 = overstep_tail_check(8, 1024, samples=1000, seed=2)
        assert r8.frequency <= r4.frequency + 3 * math.hypot(r4.stderr, r8.stderr)

    def test_overstep_preconditions(self):
        with pytest.raises(DomainError):
            overstep_tail_check(3, 300)
        with pytest.raises(DomainError):
            overstep_tail_check(4, 258)
        with pytest.raises(DomainError):
            overstep_tail_check(4, 256, samples=10)

    def test_long_pattern_empty_range(self):
        with pytest.raises(DomainError):
            long_pattern_tail_check(8, 256)

    def test_long_pattern_report(self):
        r = long_pattern_tail_check(4, 64, samples=1000, seed=3)
        assert r.bound == 4.0**-8
        assert r.threshold == 16 * 8 / 4

    def test_correlation_band(self):
        lo, hi = correlation_band(1024, 2)
        scale = math.sqrt(1024 * math.log(math.comb(1024, 2)))
        assert (lo, hi) == pytest.approx((0.4 * scale, 1.75 * scale))
        r = correlation_band_check(64, 2, samples=20, seed=1)
        assert r.side == "lower" and r.bound == 0.95

    @pytest.mark.parametrize("N, k", [(2048, 2), (512, 3), (64, 4)])
    def test_correlation_cost_classes(self, N, k):
        with pytest.raises(DomainError):
            correlation_band_check(N, k, samples=1)
