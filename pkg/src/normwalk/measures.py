"""Normality, well-distribution and correlation measures of +-1 sequences.

Every measure returns a :class:`DeviationReport` carrying the exact
rational value and a witness at which the defining maximum is attained.
Deviations ``T - M/2^k`` are handled as the integers ``2^k T - M`` so that
maxima and ties are decided without rounding.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .errors import DomainError
from .sequence import BinarySequence, Pattern

__all__ = [
    "NormalityWitness",
    "ProgressionWitness",
    "CorrelationWitness",
    "DeviationReport",
    "window_codes",
    "count_pattern",
    "normality_deviation",
    "normality_measure",
    "normality_measure_oracle",
    "normality_values_batch",
    "well_distribution_measure",
    "progression_sum",
    "correlation_measure",
    "correlation_sum",
    "min_normality_exhaustive",
    "max_pattern_length",
]


@dataclass(frozen=True)
class NormalityWitness:
    k: int
    pattern: Pattern
    M: int

    def to_dict(self) -> dict:
        return {"k": self.k, "pattern": str(self.pattern), "code": self.pattern.code, "M": self.M}


@dataclass(frozen=True)
class ProgressionWitness:
    M: int
    a: int
    b: int

    def to_dict(self) -> dict:
        return {"M": self.M, "a": self.a, "b": self.b}


@dataclass(frozen=True)
class CorrelationWitness:
    M: int
    lags: tuple[int, ...]

    def to_dict(self) -> dict:
        return {"M": self.M, "lags": list(self.lags)}


Witness = Union[NormalityWitness, ProgressionWitness, CorrelationWitness]


@dataclass(frozen=True)
class DeviationReport:
    measure: str
    value: Fraction
    witness: Witness

    @property
    def value_float(self) -> float:
        return float(self.value)

    def to_dict(self) -> dict:
        return {
            "measure": self.measure,
            "value_num": self.value.numerator,
            "value_den": self.value.denominator,
            "value_float": self.value_float,
            "witness": None if self.witness is None else self.witness.to_dict(),
        }


def max_pattern_length(N: int) -> int:
    """Largest admissible pattern length, ``floor(log2 N)``."""
    return int(N).bit_length() - 1


def window_codes(bits: np.ndarray, k: int) -> np.ndarray:
    """Integer codes of the ``N - k + 1`` length-``k`` windows of ``bits``.

    Entry ``n`` encodes ``(e_{n+1}, ..., e_{n+k})`` with bit ``j`` holding
    ``e_{n+j+1}``.  Works along the last axis, so a 2-D batch is accepted.
    """
    bits = np.asarray(bits, dtype=np.int64)
    L = bits.shape[-1] - k + 1
    if L < 1:
        raise DomainError(f"pattern length {k} exceeds sequence length")
    codes = np.zeros(bits.shape[:-1] + (L,), dtype=np.int64)
    for j in range(k):
        codes |= bits[..., j : j + L] << j
    return codes


def _check_pattern_range(N: int, M: int, X: Pattern) -> None:
    if not 1 <= M <= N + 1 - X.k:
        raise DomainError(f"M={M} outside 1..{N + 1 - X.k} for k={X.k}")


def count_pattern(E: BinarySequence, M: int, X: Pattern) -> int:
    """``T(E, M, X)``: occurrences of ``X`` starting at ``n = 0, ..., M-1``.

    Overlapping occurrences are all counted.
    """
    _check_pattern_range(E.length, M, X)
    codes = window_codes(E.bits[: M + X.k - 1], X.k)
    return int(np.count_nonzero(codes == X.code))


def normality_deviation(E: BinarySequence, M: int, X: Pattern) -> Fraction:
    """``|T(E, M, X) - M / 2^k|`` as an exact rational."""
    return abs(Fraction(count_pattern(E, M, X)) - Fraction(M, 1 << X.k))


# -- fast path ---------------------------------------------------------------


def _best_for_length(codes: np.ndarray, k: int, counts: np.ndarray) -> tuple[int, int, int]:
    """Largest ``|2^k T - M|`` over patterns of length ``k`` and all ``M``.

    Between two occurrences of a pattern the scaled deviation falls by one
    per step in ``M``, so only three kinds of ``M`` need inspection: just
    after an occurrence, just before one, and the last admissible ``M``.
    Returns ``(scaled value, code, M)``, ties to smallest code then ``M``.
    """
    L = codes.size
    order = np.argsort(codes.astype(np.uint16) if k <= 16 else codes, kind="stable")
    starts = np.cumsum(counts) - counts
    rank = np.empty(L, dtype=np.int64)
    rank[order] = np.arange(L) - starts[codes[order]]
    n = np.arange(L, dtype=np.int64)

    dev = np.concatenate(
        [
            ((rank + 1) << k) - (n + 1),  # M = n + 1, right after occurrence n
            (rank[1:] << k) - n[1:],  # M = n, right before occurrence n
            (counts << k) - L,  # M = L
        ]
    )
    cand_code = np.concatenate([codes, codes[1:], np.arange(counts.size)])
    cand_M = np.concatenate([n + 1, n[1:], np.full(counts.size, L)])
    absdev = np.abs(dev)
    best = absdev.max()
    tied = np.flatnonzero(absdev == best)
    pick = tied[np.lexsort((cand_M[tied], cand_code[tied]))[0]]
    return int(best), int(cand_code[pick]), int(cand_M[pick])


def _normality_fast(bits: np.ndarray, k_min: int, k_max: int) -> tuple[Fraction, tuple[int, int, int] | None]:
    N = bits.size
    bits = bits.astype(np.int64)
    best_val = Fraction(-1)
    best_wit = None
    codes = None
    for k in range(1, k_max + 1):
        codes = bits.copy() if k == 1 else codes[:-1] + (bits[k - 1 :] << (k - 1))
        if k < k_min:
            continue
        L = N + 1 - k
        counts = np.bincount(codes, minlength=1 << k)
        # |2^k T - M| <= max(2^k * count, L); a tie at larger k never wins
        if Fraction(max(int(counts.max()) << k, L), 1 << k) <= best_val:
            continue
        scaled, code, M = _best_for_length(codes, k, counts)
        value = Fraction(scaled, 1 << k)
        if value > best_val:
            best_val, best_wit = value, (k, code, M)
    if best_wit is None:
        return Fraction(0), None
    return best_val, best_wit


def _check_normality_input(E: BinarySequence) -> int:
    if E.length < 2:
        raise DomainError("normality measure needs N >= 2")
    return max_pattern_length(E.length)


def normality_measure(E: BinarySequence, k_min: int = 1, k_max: int | None = None) -> DeviationReport:
    """Normality measure: max of ``|T(E, M, X) - M/2^k|``.

    The maximum runs over ``k <= floor(log2 N)``, all ``X`` of length ``k``
    and ``1 <= M <= N + 1 - k``.  ``k_min``/``k_max`` narrow the k-range;
    an empty range gives value 0 and witness ``None``.

    Ties are broken towards the smallest ``k``, then pattern code, then ``M``.
    """
    K = _check_normality_input(E)
    k_max = K if k_max is None else min(k_max, K)
    value, wit = _normality_fast(E.bits, max(k_min, 1), k_max)
    if wit is None:
        return DeviationReport("normality", value, None)
    k, code, M = wit
    return DeviationReport("normality", value, NormalityWitness(k, Pattern(k, code), M))


# -- dense reference ---------------------------------------------------------


def normality_measure_oracle(E: BinarySequence, k_min: int = 1, k_max: int | None = None) -> DeviationReport:
    """Reference normality measure by full enumeration of ``(k, X, M)``.

    For each ``k`` the table ``T(E, M, X)`` is built for every pattern and
    every ``M`` by cumulative counting, and the whole table is scanned.
    Cost is ``O(N * sum_k 2^k)``; meant for ``N <= 4096``.
    """
    K = _check_normality_input(E)
    k_max = K if k_max is None else min(k_max, K)
    N = E.length
    best_val, best_wit = Fraction(-1), None
    chunk = 256
    for k in range(max(k_min, 1), k_max + 1):
        codes = window_codes(E.bits, k)
        L = N + 1 - k
        M = np.arange(1, L + 1, dtype=np.int64)
        for lo in range(0, 1 << k, chunk):
            pats = np.arange(lo, min(lo + chunk, 1 << k))
            T = np.cumsum(codes[None, :] == pats[:, None], axis=1, dtype=np.int64)
            dev = np.abs((T << k) - M[None, :])
            flat = int(np.argmax(dev))
            row, col = divmod(flat, L)
            value = Fraction(int(dev[row, col]), 1 << k)
            if value > best_val:
                best_val = value
                best_wit = NormalityWitness(k, Pattern(k, int(pats[row])), col + 1)
    if best_wit is None:
        return DeviationReport("normality", Fraction(0), None)
    return DeviationReport("normality", best_val, best_wit)


def normality_values_batch(bits: np.ndarray) -> np.ndarray:
    """Scaled normality values ``2^K * N(E)`` for each row of a 0/1 matrix.

    ``K = floor(log2 N)``.  Dense enumeration vectorised over rows; intended
    for short sequences (exhaustive searches).
    """
    bits = np.asarray(bits, dtype=np.int64)
    N = bits.shape[1]
    if N < 2:
        raise DomainError("normality measure needs N >= 2")
    K = max_pattern_length(N)
    best = np.zeros(bits.shape[0], dtype=np.int64)
    for k in range(1, K + 1):
        codes = window_codes(bits, k)
        L = N + 1 - k
        M = np.arange(1, L + 1, dtype=np.int64)
        for code in range(1 << k):
            T = np.cumsum(codes == code, axis=1, dtype=np.int64)
            dev = np.abs((T << k) - M).max(axis=1) << (K - k)
            np.maximum(best, dev, out=best)
    return best


def min_normality_exhaustive(N: int, chunk: int = 1 << 15) -> tuple[Fraction, BinarySequence]:
    """Smallest normality measure over all of {-1, +1}^N.

    Only sequences with ``e_1 = +1`` are enumerated, one per negation class.
    The witness is the first minimiser in increasing order of the integer
    whose bit ``j`` is ``e_{j+2}``.
    """
    if not 2 <= N <= 24:
        raise DomainError("exhaustive search supports 2 <= N <= 24")
    K = max_pattern_length(N)
    total = 1 << (N - 1)
    shifts = np.arange(N - 1, dtype=np.int64)
    best_val, best_idx = None, None
    for lo in range(0, total, chunk):
        idx = np.arange(lo, min(lo + chunk, total), dtype=np.int64)
        bits = np.empty((idx.size, N), dtype=np.int64)
        bits[:, 0] = 1
        bits[:, 1:] = (idx[:, None] >> shifts) & 1
        vals = normality_values_batch(bits)
        j = int(np.argmin(vals))
        if best_val is None or vals[j] < best_val:
            best_val, best_idx = int(vals[j]), int(idx[j])
    witness_bits = [1] + [(best_idx >> j) & 1 for j in range(N - 1)]
    return Fraction(best_val, 1 << K), BinarySequence.from_bits(witness_bits)


# -- well-distribution -------------------------------------------------------


def progression_sum(E: BinarySequence, M: int, a: int, b: int) -> int:
    """``U(E, M, a, b) = sum_{j=1..M} e_{a + j b}``; every index must be in ``1..N``."""
    if M < 1 or b < 1 or a + b < 1 or a + M * b > E.length:
        raise DomainError(f"progression (M={M}, a={a}, b={b}) not admissible for N={E.length}")
    v = E.values
    return int(v[a + b - 1 : a + M * b : b].sum())


def well_distribution_measure(E: BinarySequence) -> DeviationReport:
    """Well-distribution measure: max ``|U(E, M, a, b)|`` over progressions.

    For fixed step ``b`` an admissible progression is a contiguous run
    inside one residue class mod ``b``, so the maximum over ``(M, a)`` is the
    range of the prefix sums of each class.  Ties go to the smallest ``b``,
    then the smallest start residue.
    """
    N = E.length
    v = E.values.astype(np.int64)
    best, best_wit = -1, None
    for b in range(1, max(N - 1, 1) + 1):
        rows = -(-N // b)
        grid = np.zeros(rows * b, dtype=np.int64)
        grid[:N] = v
        grid = grid.reshape(rows, b)
        prefix = np.zeros((rows + 1, b), dtype=np.int64)
        np.cumsum(grid, axis=0, out=prefix[1:])
        top, bottom = prefix.max(axis=0), prefix.min(axis=0)
        col = int(np.argmax(top - bottom))
        span = int(top[col] - bottom[col])
        if span > best:
            i_hi = int(np.argmax(prefix[:, col]))
            i_lo = int(np.argmin(prefix[:, col]))
            i1, i2 = min(i_hi, i_lo), max(i_hi, i_lo)
            start = col + 1 + i1 * b
            best, best_wit = span, ProgressionWitness(M=i2 - i1, a=start - b, b=b)
    return DeviationReport("well-distribution", Fraction(best), best_wit)


# -- correlation -------------------------------------------------------------


def correlation_sum(E: BinarySequence, M: int, lags: tuple[int, ...]) -> int:
    """``V(E, M, D) = sum_{n=1..M} e_{n+d_1} ... e_{n+d_k}``."""
    lags = tuple(int(d) for d in lags)
    if any(b <= a for a, b in zip(lags, lags[1:])) or lags[0] < 0:
        raise DomainError("lags must be strictly increasing and nonnegative")
    if M < 1 or M + lags[-1] > E.length:
        raise DomainError(f"M={M} with d_k={lags[-1]} exceeds N={E.length}")
    v = E.values.astype(np.int64)
    prod = np.ones(M, dtype=np.int64)
    for d in lags:
        prod *= v[d : d + M]
    return int(prod.sum())


def correlation_measure(E: BinarySequence, k: int) -> DeviationReport:
    """Correlation measure of order ``k``: max ``|V(E, M, D)|``.

    ``V`` depends on ``D`` only through the offsets ``g_j = d_j - d_1`` and
    the start ``d_1``: with ``q(i) = prod_j e_{i + g_j}`` it is a difference
    of two prefix sums of ``q``.  For each offset shape the maximum over
    ``(d_1, M)`` is therefore the range of those prefix sums.  The last
    offset is vectorised; earlier offsets are enumerated, so cost grows as
    ``N^k``.
    """
    N = E.length
    if not 2 <= k <= N - 1:
        raise DomainError(f"correlation order k={k} outside 2..{N - 1}")
    v = E.values.astype(np.int64)
    padded = np.concatenate([v, np.zeros(N, dtype=np.int64)])
    windows = np.lib.stride_tricks.sliding_window_view(padded, N)
    best, best_wit = -1, None
    for middle in itertools.combinations(range(1, N - 1), k - 2):
        base = v.copy()
        for g in middle:
            base = base * padded[g : g + N]
        last = np.arange((middle[-1] if middle else 0) + 1, N)
        q = windows[last] * base[None, :]
        prefix = np.zeros((last.size, N + 1), dtype=np.int64)
        np.cumsum(q, axis=1, out=prefix[:, 1:])
        top, bottom = prefix.max(axis=1), prefix.min(axis=1)
        row = int(np.argmax(top - bottom))
        span = int(top[row] - bottom[row])
        if span > best:
            i_hi = int(np.argmax(prefix[row]))
            i_lo = int(np.argmin(prefix[row]))
            a, b = min(i_hi, i_lo), max(i_hi, i_lo)
            lags = (a,) + tuple(a + g for g in middle) + (a + int(last[row]),)
            best, best_wit = span, CorrelationWitness(M=b - a, lags=lags)
    return DeviationReport(f"correlation-{k}", Fraction(best), best_wit)
