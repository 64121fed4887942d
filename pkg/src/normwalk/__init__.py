"""Pseudorandomness measures of finite +-1 sequences and the limit law of
the normalised normality measure."""

from .errors import DomainError, InvalidLengthError
from .measures import (
    DeviationReport,
    correlation_measure,
    count_pattern,
    min_normality_exhaustive,
    normality_measure,
    normality_measure_oracle,
    well_distribution_measure,
)
from .montecarlo import Ecdf, ks_distance, sample_distribution
from .restricted import BlockScheme, restricted_normality_measure, sandwich_bounds
from .sequence import BinarySequence, Pattern, SeedSpec, negate, parse_sequence, random_sequence, render_sequence
from .walk import build_weight_table, covariance_model, simulate_lattice_exit, simulate_wiener_exit, walk_exits

__version__ = "0.1.0"
