import itertools
import json
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from normwalk.errors import DomainError
from normwalk.measures import (
    CorrelationWitness,
    NormalityWitness,
    ProgressionWitness,
    correlation_measure,
    correlation_sum,
    count_pattern,
    max_pattern_length,
    min_normality_exhaustive,
    normality_deviation,
    normality_measure,
    normality_measure_oracle,
    normality_values_batch,
    progression_sum,
    well_distribution_measure,
    window_codes,
)
from normwalk.sequence import BinarySequence, Pattern, SeedSpec, negate, random_sequence

FIXTURES = Path(__file__).parent / "fixtures"


def seq(*values):
    return BinarySequence.from_values(values)


def all_sequences(N):
    for vals in itertools.product((-1, 1), repeat=N):
        yield BinarySequence.from_values(vals)


# Literal transcriptions of the definitions, no shared code with the library.

def brute_normality(vals):
    N = len(vals)
    best = Fraction(0)
    k = 1
    while 2**k <= N:
        for X in itertools.product((-1, 1), repeat=k):
            for M in range(1, N + 2 - k):
                T = sum(1 for n in range(M) if tuple(vals[n : n + k]) == X)
                best = max(best, abs(T - Fraction(M, 2**k)))
        k += 1
    return best


def brute_well_distribution(vals):
    N = len(vals)
    best = 0
    for b in range(1, N + 1):
        for a in range(1 - b, N):
            for M in range(1, N + 1):
                idx = [a + j * b for j in range(1, M + 1)]
                if idx[0] < 1 or idx[-1] > N:
                    continue
                best = max(best, abs(sum(vals[i - 1] for i in idx)))
    return best


def brute_correlation(vals, k):
    N = len(vals)
    best = 0
    for D in itertools.combinations(range(N), k):
        for M in range(1, N - D[-1] + 1):
            s = 0
            for n in range(1, M + 1):
                p = 1
                for d in D:
                    p *= vals[n + d - 1]
                s += p
            best = max(best, abs(s))
    return best


short_values = st.lists(st.sampled_from([-1, 1]), min_size=2, max_size=40)


class TestCountPattern:
    def test_three_ones(self):
        assert count_pattern(seq(1, 1, 1), 2, Pattern.from_values([1, 1])) == 2

    @given(st.lists(st.sampled_from([-1, 1]), min_size=1, max_size=30))
    def test_first_window_matches_itself(self, vals):
        E = BinarySequence.from_values(vals)
        assert count_pattern(E, 1, Pattern.from_values([vals[0]])) == 1

    def test_alternating(self):
        assert count_pattern(seq(1, -1, 1, -1), 3, Pattern.from_values([1, -1])) == 2

    @pytest.mark.parametrize("M", [0, 4])
    def test_range(self, M):
        with pytest.raises(DomainError):
            count_pattern(seq(1, 1, 1, 1), M, Pattern(2, 3))

    def test_window_codes_batch(self):
        bits = np.array([[1, 0, 1, 1], [0, 0, 1, 0]])
        assert window_codes(bits, 2).tolist() == [[1, 2, 3], [0, 2, 1]]


class TestNormalityMeasure:
    def test_all_ones(self):
        r = normality_measure(seq(1, 1, 1, 1))
        assert r.value == Fraction(9, 4)
        assert r.witness == NormalityWitness(2, Pattern.from_values([1, 1]), 3)

    def test_all_minus_ones(self):
        assert normality_measure(seq(-1, -1, -1, -1)).value == Fraction(9, 4)

    def test_length_two(self):
        assert normality_measure(seq(1, -1)).value == Fraction(1, 2)

    def test_oracle_all_ones(self):
        assert normality_measure_oracle(seq(1, 1, 1, 1)).value == Fraction(9, 4)

    def test_too_short(self):
        with pytest.raises(DomainError):
            normality_measure(seq(1))

    @pytest.mark.parametrize("N", range(2, 9))
    def test_exhaustive_against_literal_definition(self, N):
        for E in all_sequences(N):
            assert normality_measure(E).value == brute_normality(list(E))

    def test_exhaustive_n12_fast_equals_oracle(self):
        bits = (np.arange(1 << 12)[:, None] >> np.arange(12)) & 1
        batch = normality_values_batch(bits)
        for row, scaled in zip(bits[::7], batch[::7]):
            E = BinarySequence.from_bits(row)
            fast = normality_measure(E).value
            assert fast == normality_measure_oracle(E).value
            assert fast == Fraction(int(scaled), 8)

    @pytest.mark.parametrize("N", [17, 100, 257, 1000])
    def test_random_fast_equals_oracle(self, N):
        for i in range(20):
            E = random_sequence(N, SeedSpec(N, i))
            fast, ref = normality_measure(E), normality_measure_oracle(E)
            assert fast.value == ref.value
            assert fast.witness == ref.witness

    @settings(max_examples=150)
    @given(short_values)
    def test_witness_attains_value(self, vals):
        E = BinarySequence.from_values(vals)
        r = normality_measure(E)
        w = r.witness
        assert 1 <= w.k <= max_pattern_length(len(E))
        assert 1 <= w.M <= len(E) + 1 - w.k
        assert normality_deviation(E, w.M, w.pattern) == r.value

    @settings(max_examples=150)
    @given(short_values)
    def test_negation_invariance(self, vals):
        E = BinarySequence.from_values(vals)
        assert normality_measure(negate(E)).value == normality_measure(E).value

    @settings(max_examples=150)
    @given(short_values)
    def test_trivial_upper_bound(self, vals):
        E = BinarySequence.from_values(vals)
        assert 0 < normality_measure(E).value <= len(E)

    @settings(max_examples=100)
    @given(short_values, st.sampled_from([-1, 1]))
    def test_extension_monotone_within_same_k_range(self, vals, extra):
        # appending a symbol only adds admissible (k, X, M); k_max fixed to the shorter length
        E = BinarySequence.from_values(vals)
        F = BinarySequence.from_values(vals + [extra])
        K = max_pattern_length(len(E))
        assert normality_measure(F, k_max=K).value >= normality_measure(E).value

    def test_empty_k_range(self):
        r = normality_measure(seq(1, 1, 1, 1), k_min=3)
        assert r.value == 0 and r.witness is None

    def test_report_dict(self):
        d = normality_measure(seq(1, 1, 1, 1)).to_dict()
        assert (d["value_num"], d["value_den"], d["value_float"]) == (9, 4, 2.25)
        assert d["witness"] == {"k": 2, "pattern": "++", "code": 3, "M": 3}


class TestMinSearch:
    def test_n2(self):
        value, E = min_normality_exhaustive(2)
        assert value == Fraction(1, 2)
        assert normality_measure_oracle(E).value == value

    def test_golden_values(self):
        golden = json.loads((FIXTURES / "minsearch.json").read_text())["minima"]
        for row in golden:
            if row["N"] > 12:
                continue
            value, E = min_normality_exhaustive(row["N"])
            assert value == Fraction(row["num"], row["den"])
            assert "".join("1" if v > 0 else "0" for v in E) == row["witness"]

    def test_brute_force_small(self):
        for N in range(2, 9):
            expected = min(brute_normality(list(E)) for E in all_sequences(N))
            assert min_normality_exhaustive(N)[0] == expected

    @pytest.mark.parametrize("N", [1, 25])
    def test_bounds(self, N):
        with pytest.raises(DomainError):
            min_normality_exhaustive(N)


class TestWellDistribution:
    def test_all_ones(self):
        r = well_distribution_measure(seq(1, 1, 1, 1))
        assert r.value == 4
        assert r.witness == ProgressionWitness(M=4, a=0, b=1)

    def test_alternating_pair(self):
        assert well_distribution_measure(seq(1, -1)).value == 1

    @settings(max_examples=100)
    @given(st.lists(st.sampled_from([-1, 1]), min_size=1, max_size=14))
    def test_against_literal_definition(self, vals):
        E = BinarySequence.from_values(vals)
        r = well_distribution_measure(E)
        assert r.value == brute_well_distribution(vals)
        w = r.witness
        assert abs(progression_sum(E, w.M, w.a, w.b)) == r.value

    def test_progression_bounds(self):
        E = seq(1, -1, 1)
        assert progression_sum(E, 2, -1, 2) == 2
        with pytest.raises(DomainError):
            progression_sum(E, 2, 0, 2)


class TestCorrelation:
    def test_all_ones(self):
        r = correlation_measure(seq(1, 1, 1, 1), 2)
        assert r.value == 3
        assert r.witness == CorrelationWitness(M=3, lags=(0, 1))

    @settings(max_examples=60)
    @given(st.lists(st.sampled_from([-1, 1]), min_size=4, max_size=11), st.sampled_from([2, 3]))
    def test_against_literal_definition(self, vals, k):
        E = BinarySequence.from_values(vals)
        r = correlation_measure(E, k)
        assert r.value == brute_correlation(vals, k)
        assert abs(correlation_sum(E, r.witness.M, r.witness.lags)) == r.value

    @pytest.mark.parametrize("k", [1, 4])
    def test_order_range(self, k):
        with pytest.raises(DomainError):
            correlation_measure(seq(1, 1, 1, 1), k)

    def test_lags_validated(self):
        with pytest.raises(DomainError):
            correlation_sum(seq(1, 1, 1, 1), 1, (1, 1))
