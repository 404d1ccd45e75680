"""Fluctuation laboratory for trace powers of band Hankel random matrices.

Exact split pair-partition combinatorics, closed-form limiting
covariances, finite-size Wick oracles, and seeded replicate-parallel
Monte Carlo for the centered, scaled trace powers of banded Hankel
matrices built from Brownian or i.i.d. symbol sequences.
"""

__version__ = "0.1.0"

from .combinat import ClassTally, class_counts, count_delta24, enumerate_pair_partitions
from .ensemble import (
    BandConfig,
    EntryModel,
    SymbolPaths,
    SymmetricBandMatrix,
    bandwidth_from_rule,
    build_band_hankel,
    build_tilde_A,
    sample_symbol_paths,
    scale_to_A,
)
from .errors import BandHankelError, BudgetError, NumericalError, ValidationError
from .mc import (
    ExperimentPlan,
    McReport,
    ReportRow,
    compare_report,
    derive_seed,
    run_experiment,
    simulate_traces,
    study_lsd,
    study_odd_decay,
    study_sup,
    study_tightness,
)
from .oracle import ExactValue, TermProfile, exact_cov_w, exact_mean_trace, limit_probe
from .spectra import trace_power, trace_power_formula, w_stat
from .theory import (
    CovarianceQuery,
    LimitProcessSample,
    band_integral_b0,
    limit_cov,
    limit_cov_matrix,
    lsd_moment,
    sample_limit_process,
    scaled_moment_R,
    tilde_cov,
)

__all__ = [
    "__version__",
    "BandConfig",
    "BandHankelError",
    "BudgetError",
    "ClassTally",
    "CovarianceQuery",
    "EntryModel",
    "ExactValue",
    "ExperimentPlan",
    "LimitProcessSample",
    "McReport",
    "NumericalError",
    "ReportRow",
    "SymbolPaths",
    "SymmetricBandMatrix",
    "TermProfile",
    "ValidationError",
    "band_integral_b0",
    "bandwidth_from_rule",
    "build_band_hankel",
    "build_tilde_A",
    "class_counts",
    "compare_report",
    "count_delta24",
    "derive_seed",
    "enumerate_pair_partitions",
    "exact_cov_w",
    "exact_mean_trace",
    "limit_cov",
    "limit_cov_matrix",
    "limit_probe",
    "lsd_moment",
    "run_experiment",
    "sample_limit_process",
    "sample_symbol_paths",
    "scale_to_A",
    "scaled_moment_R",
    "simulate_traces",
    "study_lsd",
    "study_odd_decay",
    "study_sup",
    "study_tightness",
    "tilde_cov",
    "trace_power",
    "trace_power_formula",
    "w_stat",
]
