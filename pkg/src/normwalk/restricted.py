"""Block-restricted pattern counting and the restricted normality measure.

The index set ``1..N`` is cut into blocks ``{md+1, ..., (m+1)d}``.  A window
``(e_{n+1}, ..., e_{n+k})`` lies inside a block iff ``n mod d <= d - k``;
otherwise it oversteps a multiple of ``d``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError
from .measures import (
    DeviationReport,
    NormalityWitness,
    max_pattern_length,
    normality_measure,
    window_codes,
)
from .sequence import BinarySequence, Pattern

__all__ = [
    "BlockScheme",
    "count_pattern_restricted",
    "count_pattern_overstep",
    "stride_pattern_count",
    "split_count_table",
    "admissible_window_counts",
    "restricted_normality_measure",
    "overstep_deviation_max",
    "long_pattern_deviation_max",
    "SandwichBounds",
    "sandwich_bounds",
]


@dataclass(frozen=True)
class BlockScheme:
    """Partition of the indices into consecutive blocks of length ``d``."""

    d: int

    def __post_init__(self):
        if self.d < 2:
            raise DomainError("block length d must be at least 2")

    def block(self, m: int) -> range:
        """1-based indices of block ``m >= 0``."""
        return range(m * self.d + 1, (m + 1) * self.d + 1)

    def inside_residues(self, k: int) -> range:
        return range(0, _inside_limit(self.d, k) + 1)

    def overstep_residues(self, k: int) -> range:
        return range(_inside_limit(self.d, k) + 1, self.d)


def _inside_limit(d: int, k: int) -> int:
    """Largest ``n mod d`` at which a length-``k`` window stays inside its block."""
    return d - k


def _scheme(d) -> BlockScheme:
    return d if isinstance(d, BlockScheme) else BlockScheme(int(d))


def _check_window(E: BinarySequence, M: int, X: Pattern, scheme: BlockScheme) -> None:
    if X.k > scheme.d:
        raise DomainError(f"pattern length {X.k} exceeds block length {scheme.d}")
    if not 1 <= M <= E.length + 1 - X.k:
        raise DomainError(f"M={M} outside 1..{E.length + 1 - X.k}")


def _count_residues(E: BinarySequence, M: int, X: Pattern, stride: int, residues) -> int:
    codes = window_codes(E.bits[: M + X.k - 1], X.k)
    n = np.arange(codes.size)
    mask = np.isin(n % stride, np.fromiter(residues, dtype=np.int64))
    return int(np.count_nonzero(mask & (codes == X.code)))


def count_pattern_restricted(E: BinarySequence, M: int, X: Pattern, d) -> int:
    """Occurrences of ``X`` at ``n < M`` lying wholly inside one block."""
    scheme = _scheme(d)
    _check_window(E, M, X, scheme)
    return _count_residues(E, M, X, scheme.d, scheme.inside_residues(X.k))


def count_pattern_overstep(E: BinarySequence, M: int, X: Pattern, d) -> int:
    """Occurrences of ``X`` at ``n < M`` that straddle a block boundary."""
    scheme = _scheme(d)
    _check_window(E, M, X, scheme)
    return _count_residues(E, M, X, scheme.d, scheme.overstep_residues(X.k))


def stride_pattern_count(E: BinarySequence, M: int, X: Pattern, stride: int, residue: int) -> int:
    """Occurrences of ``X`` at ``n < M`` with ``n = residue (mod stride)``."""
    if stride < 1:
        raise DomainError("stride must be positive")
    if not 0 <= residue < stride:
        raise DomainError(f"residue {residue} outside 0..{stride - 1}")
    if not 1 <= M <= E.length + 1 - X.k:
        raise DomainError(f"M={M} outside 1..{E.length + 1 - X.k}")
    return _count_residues(E, M, X, stride, (residue,))


def split_count_table(bits: np.ndarray, k: int, d) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Total, inside and overstep counts for every pattern and every ``M``.

    ``bits`` is a 0/1 matrix with one sequence per row.  Each returned
    array has shape ``(rows, 2^k, N+1-k)``; entry ``[s, code, M-1]`` is the
    respective count for sequence ``s``, pattern ``code`` and prefix ``M``.
    """
    scheme = _scheme(d)
    bits = np.atleast_2d(np.asarray(bits, dtype=np.int64))
    if not 1 <= k <= scheme.d:
        raise DomainError(f"pattern length {k} outside 1..{scheme.d}")
    codes = window_codes(bits, k)
    hit = codes[:, None, :] == np.arange(1 << k)[None, :, None]
    inside_mask = np.isin(np.arange(codes.shape[1]) % scheme.d, np.fromiter(scheme.inside_residues(k), dtype=np.int64))
    over_mask = np.isin(np.arange(codes.shape[1]) % scheme.d, np.fromiter(scheme.overstep_residues(k), dtype=np.int64))
    total = np.cumsum(hit, axis=2, dtype=np.int64)
    inside = np.cumsum(hit & inside_mask, axis=2, dtype=np.int64)
    over = np.cumsum(hit & over_mask, axis=2, dtype=np.int64)
    return total, inside, over


def admissible_window_counts(M: int, k: int, d) -> tuple[int, int]:
    """Numbers of windows ``n < M`` inside blocks and overstepping blocks.

    Requires ``M + k - 1`` to be a multiple of ``d``; the two counts are
    ``(M+k-1)(d-k+1)/d`` and ``((M+k-1)/d - 1)(k-1)`` and add up to ``M``.
    """
    d = _scheme(d).d
    if not 1 <= k <= d:
        raise DomainError(f"pattern length {k} outside 1..{d}")
    if M < 1 or (M + k - 1) % d:
        raise DomainError(f"M + k - 1 = {M + k - 1} is not a positive multiple of d={d}")
    m = (M + k - 1) // d
    return m * (d - k + 1), (m - 1) * (k - 1)


def _require_aligned(E: BinarySequence, d: int) -> int:
    if E.length % d:
        raise DomainError(f"N={E.length} is not a multiple of d={d}; truncate first")
    return E.length // d


def _block_cumulative_counts(bits: np.ndarray, k: int, d: int, inside: bool) -> np.ndarray:
    """``C[code, m-1]``: windows with pattern ``code`` counted up to ``m`` blocks.

    Inside windows are charged to their own block; overstepping windows to
    the block they start in, and become visible one block later (they end
    in block ``j + 1``).
    """
    R = bits.size // d
    codes = window_codes(bits, k)
    n = np.arange(codes.size)
    r = n % d
    limit = _inside_limit(d, k)
    keep = (r <= limit) if inside else (r > limit)
    per_block = np.bincount(codes[keep] * R + n[keep] // d, minlength=(1 << k) * R)
    cum = np.cumsum(per_block.reshape(1 << k, R), axis=1)
    if inside:
        return cum
    shifted = np.zeros_like(cum)
    shifted[:, 1:] = cum[:, :-1]
    return shifted


def _max_block_deviation(E: BinarySequence, d: int, inside: bool) -> tuple[Fraction, NormalityWitness]:
    R = _require_aligned(E, d)
    m = np.arange(1, R + 1, dtype=np.int64)
    best_val, best_wit = Fraction(-1), None
    for k in range(1, d + 1):
        C = _block_cumulative_counts(E.bits, k, d, inside)
        # centring, scaled by 2^k: m (d-k+1) inside, (m-1)(k-1) overstepping
        centre = m * (d - k + 1) if inside else (m - 1) * (k - 1)
        dev = np.abs((C << k) - centre[None, :])
        flat = int(np.argmax(dev))
        code, col = divmod(flat, R)
        value = Fraction(int(dev[code, col]), 1 << k)
        if value > best_val:
            best_val = value
            best_wit = NormalityWitness(k, Pattern(k, code), (col + 1) * d - k + 1)
    return best_val, best_wit


def restricted_normality_measure(E: BinarySequence, d) -> DeviationReport:
    """Restricted normality measure with block length ``d``.

    Max over ``k <= d``, ``X`` and block-aligned ``M`` (``M + k - 1 = md``)
    of ``|T_inside(E, M, X) - m (d-k+1) / 2^k|``.  ``N`` must be a multiple
    of ``d``.  Ties go to the smallest ``k``, code, then ``M``.
    """
    value, wit = _max_block_deviation(E, _scheme(d).d, inside=True)
    return DeviationReport(f"restricted-{_scheme(d).d}", value, wit)


def overstep_deviation_max(E: BinarySequence, d) -> tuple[Fraction, NormalityWitness]:
    """Max over ``k <= d``, ``X``, aligned ``M`` of the overstep deviation.

    The deviation is ``|T_overstep(E, M, X) - ((M+k-1)/d - 1) (k-1) / 2^k|``.
    """
    return _max_block_deviation(E, _scheme(d).d, inside=False)


def long_pattern_deviation_max(E: BinarySequence, d) -> tuple[Fraction, NormalityWitness | None]:
    """Normality deviation restricted to pattern lengths ``d < k <= log2 N``.

    An empty k-range gives ``(0, None)``.
    """
    d = _scheme(d).d
    if max_pattern_length(E.length) <= d:
        return Fraction(0), None
    report = normality_measure(E, k_min=d + 1)
    return report.value, report.witness


@dataclass(frozen=True)
class SandwichBounds:
    lower: Fraction
    upper: Fraction
    restricted: Fraction
    overstep: Fraction
    long_pattern: Fraction

    @property
    def gap(self) -> Fraction:
        return self.upper - self.lower


def sandwich_bounds(E: BinarySequence, d) -> SandwichBounds:
    """Lower and upper bounds on the normality measure from block counting.

    ``lower = R - O`` and ``upper = max(R + d + O, L)`` where ``R`` is the
    restricted measure, ``O`` the overstep maximum and ``L`` the long-pattern
    maximum.  The extra ``d`` pays for moving an arbitrary ``M`` to a
    block-aligned one.
    """
    d = _scheme(d).d
    if E.length < 2 * d:
        # a single block admits k > log2 N in the restricted measure only
        raise DomainError(f"sandwich bounds need at least two blocks (N={E.length}, d={d})")
    restricted = restricted_normality_measure(E, d).value
    overstep, _ = overstep_deviation_max(E, d)
    long_pattern, _ = long_pattern_deviation_max(E, d)
    lower = restricted - overstep
    upper = max(restricted + d + overstep, long_pattern)
    return SandwichBounds(lower, upper, restricted, overstep, long_pattern)
