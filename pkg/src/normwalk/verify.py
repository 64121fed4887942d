"""Self-check suites over the library's exact identities.

Each suite returns a :class:`SuiteResult`; :func:`run_all` runs every suite
and is what ``normwalk verify`` reports.
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import measures, restricted, walk
from .sequence import BinarySequence, Pattern, SeedSpec, random_sequence


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    failures: int = 0
    seed: int = 0
    first_failure: dict | None = None
    params: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def fail(self, **info) -> None:
        self.failures += 1
        if self.first_failure is None:
            self.first_failure = {k: (str(v) if isinstance(v, (Fraction, BinarySequence, Pattern)) else v) for k, v in info.items()}

    def to_dict(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        return out


def _all_sequences(N: int):
    for i in range(1 << N):
        yield BinarySequence.from_bits([(i >> j) & 1 for j in range(N)])


def oracle_equivalence(max_exhaustive: int = 10, random_count: int = 100, random_N: int = 256, seed: int = 0) -> SuiteResult:
    res = SuiteResult("oracle-equivalence", seed=seed, params={"max_exhaustive": max_exhaustive, "random_count": random_count, "random_N": random_N})

    def check(E, tag):
        fast = measures.normality_measure(E)
        ref = measures.normality_measure_oracle(E)
        w = fast.witness
        recomputed = measures.normality_deviation(E, w.M, w.pattern)
        res.checked += 1
        if fast.value != ref.value or recomputed != fast.value:
            res.fail(sequence=E, fast=fast.value, oracle=ref.value, tag=tag)

    for N in range(2, max_exhaustive + 1):
        for E in _all_sequences(N):
            check(E, "exhaustive")
    for i in range(random_count):
        check(random_sequence(random_N, SeedSpec(seed, i)), f"stream {i}")
    return res


def decomposition(count: int = 500, seed: int = 0) -> SuiteResult:
    res = SuiteResult("decomposition", seed=seed, params={"count": count})
    rng = SeedSpec(seed, 1 << 32).generator()
    for i in range(count):
        d = int(rng.integers(2, 9))
        N = int(rng.integers(d, 200))
        E = random_sequence(N, SeedSpec(seed, i))
        k = int(rng.integers(1, d + 1))
        X = Pattern(k, int(rng.integers(0, 1 << k)))
        M = int(rng.integers(1, N + 2 - k))
        total = measures.count_pattern(E, M, X)
        parts = restricted.count_pattern_restricted(E, M, X, d) + restricted.count_pattern_overstep(E, M, X, d)
        res.checked += 1
        if total != parts:
            res.fail(sequence=E, d=d, M=M, pattern=X, total=total, parts=parts)
    return res


def window_identity(max_d: int = 16, max_blocks: int = 8) -> SuiteResult:
    res = SuiteResult("window-identity", params={"max_d": max_d, "max_blocks": max_blocks})
    for d in range(2, max_d + 1):
        for k in range(1, d + 1):
            for m in range(1, max_blocks + 1):
                M = m * d - k + 1
                inside, over = restricted.admissible_window_counts(M, k, d)
                res.checked += 1
                if inside + over != M:
                    res.fail(d=d, k=k, M=M, inside=inside, overstep=over)
    return res


def row_sums(max_d: int = 8) -> SuiteResult:
    res = SuiteResult("row-sum", params={"max_d": max_d})
    for d in range(2, max_d + 1):
        table = walk.build_weight_table(d)
        sums = table.weights.sum(axis=1, dtype=np.int64)
        expected = (1 << (d - table.row_k)) * (d - table.row_k + 1)
        res.checked += table.n_rows
        bad = np.flatnonzero(sums != expected)
        for i in bad:
            res.fail(d=d, row=int(i), got=int(sums[i]), expected=int(expected[i]))
        basis = table.weights[table.row_k == d]
        res.checked += 1
        if not np.array_equal(basis, np.eye(1 << d, dtype=basis.dtype)):
            res.fail(d=d, issue="rows with k=d are not the identity")
    return res


def event_equality(count: int = 200, blocks: int = 64, seed: int = 0) -> SuiteResult:
    res = SuiteResult("event-equality", seed=seed, params={"count": count, "blocks": blocks})
    thresholds = [Fraction(j, 4) for j in range(1, 9)]
    for d in (2, 3):
        N = blocks * d
        for i in range(count):
            E = random_sequence(N, SeedSpec(seed, i))
            value = restricted.restricted_normality_measure(E, d).value
            for t in thresholds:
                exited, _ = walk.walk_exits(E, d, t)
                res.checked += 1
                if exited != (value * value > t * t * N):
                    res.fail(sequence=E, d=d, t=float(t), restricted=value, exited=exited, stream=i)
    return res


def covariance(max_d: int = 8) -> SuiteResult:
    res = SuiteResult("covariance", params={"max_d": max_d})
    for d in range(1, max_d + 1):
        model = walk.covariance_model(d)
        resid = float(np.abs(model.factor.T @ model.factor - model.sigma).max())
        rank = int(np.linalg.matrix_rank(model.sigma))
        res.checked += 1
        if resid > 1e-12 or rank != (1 << d) - 1:
            res.fail(d=d, residual=resid, rank=rank)
    return res


def sandwich(count: int = 100, seed: int = 0) -> SuiteResult:
    res = SuiteResult("sandwich", seed=seed, params={"count": count})
    for i, d in itertools.product(range(count), (2, 4, 8)):
        N = d * (2 + (i * 37) % 120)
        E = random_sequence(N, SeedSpec(seed, i))
        bounds = restricted.sandwich_bounds(E, d)
        value = measures.normality_measure(E).value
        res.checked += 1
        if not bounds.lower <= value <= bounds.upper:
            res.fail(sequence=E, d=d, lower=bounds.lower, value=value, upper=bounds.upper, stream=i)
    return res


def run_all(scale: float = 1.0, seed: int = 0, only: list[str] | None = None) -> list[SuiteResult]:
    """Run the suites; ``scale`` multiplies the random-sample counts."""
    def n(x):
        return max(1, int(round(x * scale)))

    plan = {
        "oracle-equivalence": lambda: oracle_equivalence(random_count=n(100), seed=seed),
        "decomposition": lambda: decomposition(count=n(500), seed=seed),
        "window-identity": window_identity,
        "row-sum": row_sums,
        "event-equality": lambda: event_equality(count=n(200), seed=seed),
        "covariance": covariance,
        "sandwich": lambda: sandwich(count=n(100), seed=seed),
    }
    names = list(plan) if not only else only
    unknown = set(names) - set(plan)
    if unknown:
        raise ValueError(f"unknown suites: {sorted(unknown)}")
    return [plan[name]() for name in names]
