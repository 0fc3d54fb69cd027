"""Compressed sensing with blocks of measurements."""

__version__ = "0.1.0"

from .blocks import (
    BlockDictionary,
    DrawingDistribution,
    gaussian_dictionary,
    line_blocks,
    overlapping_blocks,
    partition_blocks,
    rows_and_columns_blocks,
    verify_isotropy,
)
from .certificates import golfing_certificate, golfing_schedule, identifiability_rank_test
from .coherence import CoherenceReport, gamma, mu1, mu2, mu3, mu4, optimal_pi, required_blocks
from .montecarlo import phase_transition, tail_check
from .operators import LinearOperator, dft_operator, kron, operator_norm
from .sampling import draw_blocks, draw_distinct_blocks, isolated_sampler
from .solver import SolverOptions, basis_pursuit

__all__ = [
    "BlockDictionary",
    "CoherenceReport",
    "DrawingDistribution",
    "LinearOperator",
    "SolverOptions",
    "basis_pursuit",
    "dft_operator",
    "draw_blocks",
    "draw_distinct_blocks",
    "gamma",
    "gaussian_dictionary",
    "golfing_certificate",
    "golfing_schedule",
    "identifiability_rank_test",
    "isolated_sampler",
    "kron",
    "line_blocks",
    "mu1",
    "mu2",
    "mu3",
    "mu4",
    "operator_norm",
    "optimal_pi",
    "overlapping_blocks",
    "partition_blocks",
    "phase_transition",
    "required_blocks",
    "rows_and_columns_blocks",
    "tail_check",
    "verify_isotropy",
]
