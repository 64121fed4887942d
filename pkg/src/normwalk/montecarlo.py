"""Sampling distributions of normalised measures, ECDFs and tail checks."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy import special, stats

from ._parallel import map_streams
from .errors import DomainError
from .measures import correlation_measure, max_pattern_length, normality_measure, well_distribution_measure
from .restricted import long_pattern_deviation_max, overstep_deviation_max, restricted_normality_measure
from .sequence import BinarySequence, SeedSpec, random_sequence

__all__ = [
    "Ecdf",
    "TailCheckReport",
    "sample_distribution",
    "sample_values",
    "ks_distance",
    "ks_critical_value",
    "bernstein_bound",
    "log_binomial",
    "overstep_tail_check",
    "long_pattern_tail_check",
    "correlation_band",
    "correlation_band_check",
    "KINDS",
]

KINDS = ("normality", "restricted", "well-distribution")


@dataclass(frozen=True, eq=False)
class Ecdf:
    """Empirical distribution of a sample; ``cdf`` is right-continuous."""

    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = np.sort(np.asarray(self.values, dtype=np.float64))
        if vals.size == 0:
            raise DomainError("an ECDF needs at least one value")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def count(self) -> int:
        return self.values.size

    def cdf(self, t):
        """``#{values <= t} / count``; accepts scalars or arrays."""
        out = np.searchsorted(self.values, t, side="right") / self.count
        return float(out) if np.ndim(out) == 0 else out

    def quantile(self, p):
        """Smallest sample value ``x`` with ``cdf(x) >= p``."""
        p = np.asarray(p, dtype=np.float64)
        if np.any((p < 0) | (p > 1)):
            raise DomainError("quantile level must lie in [0, 1]")
        idx = np.clip(np.ceil(p * self.count).astype(np.int64) - 1, 0, self.count - 1)
        out = self.values[idx]
        return float(out) if out.ndim == 0 else out

    def to_csv(self, path: str | os.PathLike) -> None:
        """One value per line after ``# key=value`` metadata comments and a header."""
        with open(path, "w", newline="\n") as fh:
            for key, value in self.metadata.items():
                fh.write(f"# {key}={value}\n")
            fh.write("value\n")
            for v in self.values:
                fh.write(f"{float(v)!r}\n")

    @classmethod
    def from_csv(cls, path: str | os.PathLike) -> "Ecdf":
        metadata, values = {}, []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    key, _, value = line[1:].strip().partition("=")
                    metadata[key] = value
                elif line != "value":
                    values.append(float(line))
        return cls(np.array(values), metadata)


def ks_distance(a: Ecdf, b: Ecdf) -> float:
    """Two-sample Kolmogorov-Smirnov distance ``sup_t |F_a(t) - F_b(t)|``.

    The supremum is attained at a sample point, so both step functions are
    evaluated at the merged sample points as integer counts; the only
    rounding is the final division.
    """
    pts = np.union1d(a.values, b.values)
    ca = np.searchsorted(a.values, pts, side="right").astype(np.int64)
    cb = np.searchsorted(b.values, pts, side="right").astype(np.int64)
    gap = int(np.abs(ca * b.count - cb * a.count).max())
    return float(Fraction(gap, a.count * b.count))


def ks_critical_value(n: int, m: int, alpha: float = 0.01) -> float:
    """Asymptotic two-sample KS critical value at level ``alpha``."""
    return float(stats.kstwobign.isf(alpha) * math.sqrt((n + m) / (n * m)))


def bernstein_bound(t: float, N: int, sigma2: float) -> float:
    """Maximal Bernstein tail bound ``2 exp(-t^2 / (2 N sigma^2 + 2t/3))``.

    Bounds ``P(max_M |xi_1 + ... + xi_M| > t)`` for i.i.d. mean-zero
    variables with ``|xi| <= 1`` and variance ``sigma2``.
    """
    if t < 0 or sigma2 < 0 or N < 1:
        raise DomainError("need t >= 0, sigma2 >= 0 and N >= 1")
    if t == 0:
        return 2.0
    return 2.0 * math.exp(-(t * t) / (2.0 * N * sigma2 + 2.0 * t / 3.0))


def log_binomial(N: int, k: int) -> float:
    """Natural log of ``binom(N, k)`` via log-gamma."""
    return float(special.gammaln(N + 1) - special.gammaln(k + 1) - special.gammaln(N - k + 1))


def _measure_fn(kind: str, N: int, d: int | None) -> Callable[[BinarySequence], Fraction]:
    if kind == "normality":
        if N < 2:
            raise DomainError("normality sampling needs N >= 2")
        return lambda E: normality_measure(E).value
    if kind == "restricted":
        if d is None:
            raise DomainError("restricted sampling needs a block length d")
        if N % d:
            raise DomainError(f"N={N} is not a multiple of d={d}")
        return lambda E: restricted_normality_measure(E, d).value
    if kind == "well-distribution":
        return lambda E: well_distribution_measure(E).value
    raise DomainError(f"unknown measure kind {kind!r}; expected one of {KINDS}")


def sample_values(
    measure: Callable[[BinarySequence], Fraction | float],
    N: int,
    samples: int,
    seed: int,
    workers: int | None = 1,
) -> np.ndarray:
    """``measure`` of ``samples`` random sequences; sample ``i`` uses stream ``(seed, i)``."""
    if samples < 1:
        raise DomainError("samples must be positive")

    def one(i: int) -> float:
        return float(measure(random_sequence(N, SeedSpec(seed, i))))

    return np.array(map_streams(one, range(samples), workers))


def sample_distribution(
    kind: str,
    N: int,
    samples: int,
    seed: int = 0,
    d: int | None = None,
    workers: int | None = 1,
) -> Ecdf:
    """ECDF of ``measure(E_N) / sqrt(N)`` for uniformly random ``E_N``.

    Sequences for the same ``seed`` and different ``N`` share prefixes; use
    distinct seeds when samples at different lengths must be independent.
    """
    measure = _measure_fn(kind, N, d)
    values = sample_values(measure, N, samples, seed, workers) / math.sqrt(N)
    meta = {"kind": kind, "N": N, "samples": samples, "seed": seed}
    if d is not None:
        meta["d"] = d
    return Ecdf(values, meta)


@dataclass(frozen=True)
class TailCheckReport:
    """Empirical frequency against a bound.

    ``side="upper"`` passes when ``frequency <= bound + slack * stderr``;
    ``side="lower"`` when ``frequency >= bound - slack * stderr``.
    """

    lemma: str
    params: dict
    threshold: float
    frequency: float
    bound: float
    stderr: float
    side: str = "upper"
    slack: float = 3.0

    @property
    def verdict(self) -> str:
        if self.side == "upper":
            ok = self.frequency <= self.bound + self.slack * self.stderr
        else:
            ok = self.frequency >= self.bound - self.slack * self.stderr
        return "pass" if ok else "fail"

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return {
            "lemma": self.lemma,
            "params": self.params,
            "threshold": self.threshold,
            "frequency": self.frequency,
            "bound": self.bound,
            "stderr": self.stderr,
            "side": self.side,
            "slack": self.slack,
            "verdict": self.verdict,
        }


def _binomial_se(freq: float, samples: int) -> float:
    return math.sqrt(freq * (1.0 - freq) / samples)


def overstep_tail_check(d: int, N: int, samples: int = 1000, seed: int = 0, workers: int | None = 1) -> TailCheckReport:
    """Frequency of a large block-overstepping deviation.

    Counts samples whose overstep maximum reaches
    ``6 sqrt(N) sqrt(log d) / sqrt(d)``; the bound is ``1 / (d^2 - 1)``.
    """
    if d < 4:
        raise DomainError("the overstep tail bound needs d >= 4")
    if N % d:
        raise DomainError(f"N={N} is not a multiple of d={d}")
    if samples < 1000:
        raise DomainError("need at least 1000 samples")
    threshold = 6.0 * math.sqrt(N) * math.sqrt(math.log(d)) / math.sqrt(d)
    vals = sample_values(lambda E: overstep_deviation_max(E, d)[0], N, samples, seed, workers)
    freq = float(np.mean(vals >= threshold))
    return TailCheckReport(
        "overstep", {"d": d, "N": N, "samples": samples, "seed": seed},
        threshold, freq, 1.0 / (d * d - 1), _binomial_se(freq, samples),
    )


def long_pattern_tail_check(d: int, N: int, samples: int = 1000, seed: int = 0, workers: int | None = 1) -> TailCheckReport:
    """Frequency of a large deviation among patterns longer than ``d``.

    Counts samples whose maximum over ``d < k <= log2 N`` reaches
    ``16 sqrt(N) / d``; the bound is ``d^{-2d}``.
    """
    if d < 4:
        raise DomainError("the long-pattern tail bound needs d >= 4")
    if max_pattern_length(N) <= d:
        raise DomainError(f"no pattern length in ({d}, log2 N] for N={N}")
    if samples < 1000:
        raise DomainError("need at least 1000 samples")
    threshold = 16.0 * math.sqrt(N) / d
    vals = sample_values(lambda E: long_pattern_deviation_max(E, d)[0], N, samples, seed, workers)
    freq = float(np.mean(vals >= threshold))
    return TailCheckReport(
        "long-pattern", {"d": d, "N": N, "samples": samples, "seed": seed},
        threshold, freq, float(d) ** (-2 * d), _binomial_se(freq, samples),
    )


def correlation_band(N: int, k: int) -> tuple[float, float]:
    """``(2/5, 7/4) * sqrt(N log binom(N, k))``."""
    scale = math.sqrt(N * log_binomial(N, k))
    return 0.4 * scale, 1.75 * scale


def correlation_band_check(N: int, k: int = 2, samples: int = 200, seed: int = 0, workers: int | None = 1) -> TailCheckReport:
    """Fraction of samples whose order-``k`` correlation lies in the typical band.

    Passes when the fraction is at least 0.95.
    """
    limits = {2: 1024, 3: 256}
    if k not in limits or not k + 1 <= N <= limits[k]:
        raise DomainError(f"unsupported cost class N={N}, k={k} (k=2: N<=1024, k=3: N<=256)")
    lo, hi = correlation_band(N, k)
    vals = sample_values(lambda E: correlation_measure(E, k).value, N, samples, seed, workers)
    freq = float(np.mean((vals >= lo) & (vals <= hi)))
    return TailCheckReport(
        "correlation-band", {"N": N, "k": k, "samples": samples, "seed": seed, "band": [lo, hi]},
        lo, freq, 0.95, _binomial_se(freq, samples), side="lower", slack=0.0,
    )
