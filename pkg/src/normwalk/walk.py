"""Restricted normality as a lattice walk leaving a polytope.

Each length-``d`` block of a sequence is one of ``2^d`` words ``b_u`` (``u``
is the block's integer code, bit ``j`` = symbol ``j+1``).  The ``m``-th block
moves a walk in ``R^{2^d}`` by ``beta_u - 2^{-d} * 1``.  A pattern ``X`` of
length ``k <= d`` has weight vector ``w_X[u]`` = occurrences of ``X`` in
``b_u``, and the restricted normality measure exceeds ``t sqrt(N)`` exactly
when some partial sum ``S`` of the walk has ``|w_X . S| > t sqrt(N)``.

Walk positions are kept as integers scaled by ``2^d``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ._parallel import map_streams
from .errors import DomainError
from .measures import window_codes
from .restricted import count_pattern_restricted
from .sequence import BinarySequence, Pattern, SeedSpec, random_bits

__all__ = [
    "WeightTable",
    "WalkState",
    "Polytope",
    "CovarianceModel",
    "build_weight_table",
    "block_codes",
    "embed_blocks",
    "walk_path",
    "walk_states",
    "scalar_deviation_identity_check",
    "walk_exit_profile",
    "walk_exits",
    "covariance_model",
    "lattice_walk_maxima",
    "gaussian_path_maxima",
    "simulate_wiener_exit",
    "simulate_lattice_exit",
    "ExitEstimate",
]

MAX_D = 12
# floats held per simulated batch; batch size is a function of (d, steps) only
_BATCH_BUDGET = 1 << 22


@dataclass(frozen=True, eq=False)
class WeightTable:
    """Occurrence counts ``w[X, B]`` of every pattern of length ``<= d`` in every block.

    Rows are ordered by pattern length, then pattern code; columns by block
    code.  ``row_k[i]`` and ``row_code[i]`` identify the pattern of row ``i``.
    """

    d: int
    weights: np.ndarray = field(repr=False)
    row_k: np.ndarray = field(repr=False)
    row_code: np.ndarray = field(repr=False)

    @property
    def n_rows(self) -> int:
        return self.weights.shape[0]

    @property
    def n_blocks(self) -> int:
        return self.weights.shape[1]

    def row_index(self, X: Pattern) -> int:
        if not 1 <= X.k <= self.d:
            raise DomainError(f"pattern length {X.k} outside 1..{self.d}")
        return (1 << X.k) - 2 + X.code

    def row(self, X: Pattern) -> np.ndarray:
        return self.weights[self.row_index(X)]

    def row_sums(self) -> np.ndarray:
        """``2^{d-k} (d-k+1)`` per row."""
        return (1 << (self.d - self.row_k)) * (self.d - self.row_k + 1)


def _check_d(d: int, low: int = 2) -> None:
    if not low <= d <= MAX_D:
        raise DomainError(f"block length d={d} outside supported range {low}..{MAX_D}")


@lru_cache(maxsize=None)
def _weight_table(d: int) -> WeightTable:
    blocks = (np.arange(1 << d)[:, None] >> np.arange(d)) & 1
    rows, ks, codes = [], [], []
    for k in range(1, d + 1):
        win = window_codes(blocks, k)
        counts = np.zeros((1 << k, 1 << d), dtype=np.int64)
        for u in range(1 << d):
            counts[:, u] = np.bincount(win[u], minlength=1 << k)
        rows.append(counts)
        ks.append(np.full(1 << k, k))
        codes.append(np.arange(1 << k))
    weights = np.concatenate(rows).astype(np.uint8)
    weights.flags.writeable = False
    table = WeightTable(d, weights, np.concatenate(ks), np.concatenate(codes))
    sums = weights.sum(axis=1, dtype=np.int64)
    if not np.array_equal(sums, table.row_sums()):
        raise AssertionError("weight table row sums violate 2^(d-k) (d-k+1)")
    return table


def build_weight_table(d: int) -> WeightTable:
    """Weight table ``w[X, B] = T(B, d-k+1, X)`` for block length ``d``."""
    _check_d(d)
    return _weight_table(d)


@dataclass(frozen=True)
class Polytope:
    """``{y : |w_X . y| <= t for every pattern X of length <= d}``."""

    table: WeightTable
    t: float

    def __post_init__(self):
        if self.t < 0:
            raise DomainError("polytope threshold t must be nonnegative")

    def slab_values(self, y: np.ndarray) -> np.ndarray:
        return self.table.weights.astype(np.float64) @ np.asarray(y, dtype=np.float64)

    def contains(self, y: np.ndarray) -> bool:
        return bool(np.all(np.abs(self.slab_values(y)) <= self.t))


@dataclass(frozen=True, eq=False)
class WalkState:
    """Position ``S_m`` after ``m`` steps, stored as the integer vector ``2^d S_m``."""

    d: int
    m: int
    scaled: np.ndarray = field(repr=False)

    @property
    def position(self) -> np.ndarray:
        return self.scaled / float(1 << self.d)

    def coordinate(self, u: int) -> Fraction:
        return Fraction(int(self.scaled[u]), 1 << self.d)


def _require_aligned(E: BinarySequence, d: int) -> int:
    if E.length % d:
        raise DomainError(f"N={E.length} is not a multiple of d={d}; truncate first")
    return E.length // d


def block_codes(E: BinarySequence, d: int) -> np.ndarray:
    """Integer code of each of the ``N/d`` consecutive blocks."""
    R = _require_aligned(E, d)
    return _block_codes(E.bits, d, R)


def _block_codes(bits: np.ndarray, d: int, R: int) -> np.ndarray:
    weights = np.int64(1) << np.arange(d, dtype=np.int64)
    return bits[: R * d].reshape(R, d).astype(np.int64) @ weights


def embed_blocks(E: BinarySequence, d: int) -> np.ndarray:
    """Walk increments ``X_m = beta_u - 2^{-d} 1``, one row per block.

    Entries are dyadic rationals and exact in float64.
    """
    codes = block_codes(E, d)
    inc = np.full((codes.size, 1 << d), -1.0 / (1 << d))
    inc[np.arange(codes.size), codes] += 1.0
    return inc


def walk_path(E: BinarySequence, d: int) -> np.ndarray:
    """Scaled partial sums ``2^d S_m`` for ``m = 0..N/d`` as an integer array."""
    codes = block_codes(E, d)
    R = codes.size
    hist = np.zeros((R + 1, 1 << d), dtype=np.int64)
    np.add.at(hist, (np.arange(1, R + 1), codes), 1)
    np.cumsum(hist, axis=0, out=hist)
    m = np.arange(R + 1, dtype=np.int64)[:, None]
    return (hist << d) - m


def walk_states(E: BinarySequence, d: int) -> list[WalkState]:
    path = walk_path(E, d)
    return [WalkState(d, m, path[m]) for m in range(path.shape[0])]


def scalar_deviation_identity_check(E: BinarySequence, d: int, X: Pattern, M: int) -> tuple[Fraction, Fraction]:
    """Both sides of the identity linking restricted counts to the walk.

    ``lhs = T_inside(E, M, X) - (M+k-1)(d-k+1) / (d 2^k)`` is counted
    directly on the sequence; ``rhs = (X_1 + ... + X_m) . w_X`` with
    ``m = (M+k-1)/d`` uses the block embedding and the weight table.
    """
    k = X.k
    if k > d:
        raise DomainError(f"pattern length {k} exceeds block length {d}")
    if M < 1 or M > E.length + 1 - k or (M + k - 1) % d:
        raise DomainError(f"M={M} is not block-aligned and admissible for k={k}, d={d}")
    table = build_weight_table(d)
    m = (M + k - 1) // d
    lhs = count_pattern_restricted(E, M, X, d) - Fraction((M + k - 1) * (d - k + 1), d << k)
    codes = block_codes(E.prefix(m * d), d)
    scaled = np.full(1 << d, -m, dtype=np.int64)
    np.add.at(scaled, codes, 1 << d)
    rhs = Fraction(int(table.row(X).astype(np.int64) @ scaled), 1 << d)
    return lhs, rhs


def _projection_maxima(codes: np.ndarray, table: WeightTable) -> np.ndarray:
    """``max_X |w_X . 2^d S_m|`` for ``m = 1..R`` from the block codes."""
    d = table.d
    R = codes.size
    hits = np.cumsum(table.weights.T[codes].astype(np.int64), axis=0)
    m = np.arange(1, R + 1, dtype=np.int64)[:, None]
    proj = (hits << d) - m * table.row_sums()[None, :]
    return np.abs(proj).max(axis=1)


def walk_exit_profile(E: BinarySequence, d: int) -> np.ndarray:
    """Per-step slab maxima ``max_X |w_X . 2^d S_m|``, ``m = 1..N/d`` (integers)."""
    _check_d(d)
    return _projection_maxima(block_codes(E, d), build_weight_table(d))


def _exit_threshold(t, N: int, d: int) -> int:
    """Largest integer ``A^2`` that still counts as inside: ``floor(t^2 N 4^d)``."""
    t = Fraction(t)
    if t < 0:
        raise DomainError("threshold t must be nonnegative")
    bound = t * t * N * (1 << (2 * d))
    return bound.numerator // bound.denominator


def walk_exits(E: BinarySequence, d: int, t) -> tuple[bool, int | None]:
    """Whether ``S_m / sqrt(N)`` leaves the polytope with threshold ``t`` for some ``m``.

    The test ``|w_X . 2^d S_m| > t sqrt(N) 2^d`` is decided exactly by
    squaring, with ``t`` taken as the exact rational value of its float.
    Returns ``(exited, first exit step)``.
    """
    profile = walk_exit_profile(E, d)
    limit = _exit_threshold(t, E.length, d)
    if limit >= (1 << 62):
        return False, None
    out = np.flatnonzero(profile * profile > limit)
    if out.size == 0:
        return False, None
    return True, int(out[0]) + 1


@dataclass(frozen=True, eq=False)
class CovarianceModel:
    """Covariance of one walk increment and its symmetric square root."""

    d: int
    sigma: np.ndarray = field(repr=False)
    factor: np.ndarray = field(repr=False)


def covariance_model(d: int) -> CovarianceModel:
    """``Sigma = 2^{-d} (I - J / 2^d)`` and ``C = 2^{-d/2} (I - J / 2^d)``.

    ``C`` is symmetric with ``C^T C = Sigma`` because ``I - J/2^d`` is an
    orthogonal projection.
    """
    _check_d(d, low=1)
    n = 1 << d
    p = 1.0 / n
    sigma = np.full((n, n), -p * p)
    np.fill_diagonal(sigma, p * (1.0 - p))
    proj = np.eye(n) - np.full((n, n), p)
    factor = np.sqrt(p) * proj
    if np.abs(factor.T @ factor - sigma).max() > 1e-12:
        raise AssertionError("covariance factor does not reproduce Sigma")
    if np.abs(sigma.sum(axis=1)).max() > 1e-12:
        raise AssertionError("Sigma rows do not sum to zero")
    return CovarianceModel(d, sigma, factor)


@dataclass(frozen=True)
class ExitEstimate:
    d: int
    t: float
    method: str
    estimate: float
    stderr: float
    samples: int
    steps: int

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "t": self.t,
            "method": self.method,
            "estimate": self.estimate,
            "stderr": self.stderr,
            "samples": self.samples,
            "steps": self.steps,
        }


def _frequency(maxima: np.ndarray, t: float) -> tuple[float, float]:
    p = float(np.mean(maxima > t))
    return p, float(np.sqrt(p * (1.0 - p) / maxima.size))


def lattice_walk_maxima(d: int, N: int, samples: int, seed: int = 0, workers: int | None = 1) -> np.ndarray:
    """``max_m max_X |w_X . S_m| / sqrt(N')`` for random sequences.

    Sample ``i`` is drawn from stream ``(seed, i)`` with length ``N`` and
    truncated to ``N' = d * floor(N / d)``.  The value equals the restricted
    normality measure of the truncated sequence divided by ``sqrt(N')``.
    """
    _check_d(d)
    R = N // d
    if R < 1:
        raise DomainError(f"N={N} shorter than one block of length {d}")
    table = build_weight_table(d)
    scale = float(1 << d) * np.sqrt(R * d)

    def one(i: int) -> float:
        bits = random_bits(N, SeedSpec(seed, i))
        return _projection_maxima(_block_codes(bits, d, R), table).max() / scale

    return np.array(map_streams(one, range(samples), workers))


def simulate_lattice_exit(d: int, t: float, N: int, samples: int, seed: int = 0, workers: int | None = 1) -> ExitEstimate:
    """Frequency with which the normalised block walk leaves the polytope."""
    if samples < 1:
        raise DomainError("samples must be positive")
    maxima = lattice_walk_maxima(d, N, samples, seed, workers)
    p, se = _frequency(maxima, t)
    return ExitEstimate(d, float(t), "lattice", p, se, samples, N // d)


def gaussian_path_maxima(
    d: int,
    steps: int,
    samples: int,
    seed: int = 0,
    monitor: tuple[int, ...] | None = None,
    workers: int | None = 1,
) -> dict[int, np.ndarray]:
    """``max_j max_X |w_X . Z(s_j)| / sqrt(d)`` for Gaussian paths with covariance ``Sigma``.

    Paths are simulated on ``steps`` equal time steps of ``[0, 1]`` with
    increments ``C g / sqrt(steps)``, ``g`` standard normal.  ``monitor``
    lists grid sizes (each dividing ``steps``) on which the maximum is also
    evaluated; a coarser grid sees the same path at fewer times, which is an
    exact simulation with that coarser step.  Returns ``{grid: maxima}``.
    """
    _check_d(d)
    if steps < 1 or samples < 1:
        raise DomainError("steps and samples must be positive")
    grids = tuple(sorted(set(monitor or ()) | {steps}))
    for g in grids:
        if g < 1 or steps % g:
            raise DomainError(f"monitoring grid {g} does not divide steps={steps}")
    table = build_weight_table(d)
    W = table.weights.T.astype(np.float64) / np.sqrt(d)
    n = 1 << d
    scale = 2.0 ** (-d / 2) / np.sqrt(steps)
    batch = max(1, min(128, _BATCH_BUDGET // (steps * table.n_rows)))
    batches = range(-(-samples // batch))

    def one(b: int) -> np.ndarray:
        size = min(batch, samples - b * batch)
        g = SeedSpec(seed, b).generator().standard_normal((size, steps, n))
        g -= g.mean(axis=2, keepdims=True)
        Z = np.cumsum(g * scale, axis=1)
        per_step = np.abs(Z @ W).max(axis=2)
        return np.stack([per_step[:, steps // r - 1 :: steps // r].max(axis=1) for r in grids])

    stacked = np.concatenate(map_streams(one, batches, workers), axis=1)
    return {r: stacked[i] for i, r in enumerate(grids)}


def simulate_wiener_exit(
    d: int, t, steps: int, samples: int, seed: int = 0, workers: int | None = 1
) -> ExitEstimate | list[ExitEstimate]:
    """Probability that ``Z(s)/sqrt(d)`` leaves the polytope on the time grid.

    ``t`` may be a scalar or a sequence; a sequence is evaluated on the same
    paths, so estimates are monotone in ``t``.  Monitoring only at grid
    points biases the estimate slightly low.
    """
    if steps < 100 or samples < 100:
        raise DomainError("need steps >= 100 and samples >= 100")
    maxima = gaussian_path_maxima(d, steps, samples, seed, workers=workers)[steps]
    ts = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if np.any(ts < 0):
        raise DomainError("threshold t must be nonnegative")
    out = [ExitEstimate(d, float(x), "gaussian", *_frequency(maxima, x), samples, steps) for x in ts]
    return out if np.ndim(t) else out[0]
