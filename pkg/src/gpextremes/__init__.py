"""Simulation and verification toolkit for extreme-value limits of
independent Gaussian processes: limit-field samplers, finite-dimensional
distribution evaluators, pre-limit triangular arrays with their exact
normalizing sequences, kernel validation, and a sum-stable series
sampler with stability diagnostics."""

from .errors import (
    BlockError,
    ConfigError,
    DataError,
    DomainError,
    FactorizationError,
    GpxError,
    ParameterError,
    StructureError,
    TruncationError,
    WindowError,
)
from .gaussian import CovMatrix, JitterPolicy, PathBatch, cholesky_factor, fbm_cov, sample_paths
from .kernels import (
    CustomMatrix,
    FbmIncrement,
    GammaMatrix,
    Scaled,
    SphereGeodesic,
    ValidationReport,
    decompose_extended,
    gamma_matrix,
    kernel_from_config,
    restrict,
    schoenberg_cov,
    schoenberg_cov_min,
    validate_negative_definite,
    ws_covariance,
)
from .limits import (
    FidiResult,
    InvarianceReport,
    fidi_cdf_max,
    fidi_surv_min,
    gumbel_cdf,
    hr_bivariate_cdf,
    min_survival,
    sample_max_field,
    sample_min_field,
    verify_sigma_invariance,
)
from .prelimit import (
    FbmSchedule,
    Normalizer,
    asymptotic_un,
    min_level,
    normalizers_max,
    normalizers_min,
    sample_block_max,
    sample_block_min_abs,
    sample_single_site_max,
    solve_un,
)
from .stable import (
    StabilityResult,
    StableSample,
    StableSeriesParams,
    centering_b,
    sample_stable_field,
    stability_check,
    tail_mean_bound,
)
from .stats import Ecdf, KsResult, ks_one_sample, ks_two_sample, mc_stderr
from .streams import Stream, as_stream
from .experiments import (
    EXPERIMENTS,
    ExperimentResult,
    ResultTable,
    resolve_config,
    run_experiment,
    write_result,
)

__version__ = "0.1.0"

__all__ = [
    "BlockError", "ConfigError", "DataError", "DomainError", "FactorizationError",
    "GpxError", "ParameterError", "StructureError", "TruncationError", "WindowError",
    "CovMatrix", "JitterPolicy", "PathBatch", "cholesky_factor", "fbm_cov", "sample_paths",
    "CustomMatrix", "FbmIncrement", "GammaMatrix", "Scaled", "SphereGeodesic",
    "ValidationReport", "decompose_extended", "gamma_matrix", "kernel_from_config",
    "restrict", "schoenberg_cov", "schoenberg_cov_min", "validate_negative_definite",
    "ws_covariance",
    "FidiResult", "InvarianceReport", "fidi_cdf_max", "fidi_surv_min", "gumbel_cdf",
    "hr_bivariate_cdf", "min_survival", "sample_max_field", "sample_min_field",
    "verify_sigma_invariance",
    "FbmSchedule", "Normalizer", "asymptotic_un", "min_level", "normalizers_max",
    "normalizers_min", "sample_block_max", "sample_block_min_abs",
    "sample_single_site_max", "solve_un",
    "StabilityResult", "StableSample", "StableSeriesParams", "centering_b",
    "sample_stable_field", "stability_check", "tail_mean_bound",
    "Ecdf", "KsResult", "ks_one_sample", "ks_two_sample", "mc_stderr",
    "Stream", "as_stream",
    "EXPERIMENTS", "ExperimentResult", "ResultTable", "resolve_config",
    "run_experiment", "write_result",
    "__version__",
]
