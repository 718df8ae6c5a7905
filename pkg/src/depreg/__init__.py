"""Adaptive piecewise-polynomial regression with dependent errors.

Partition sizes are chosen by penalized least squares, with penalty shapes
matched to the memory of the errors and constants calibrated by the
dimension-jump slope heuristic.
"""

from .covariance import (
    AutocovarianceSequence,
    CovarianceModel,
    fgn_autocovariance,
    partial_sum_variance,
    spectral_radius,
    trace_projection,
)
from .errors import DepregError, InputError, NumericalError, PipelineError
from .experiments import ExperimentConfig, RiskReport, run_experiment, variance_exponent, write_report_csv
from .hurst import fgn_spectral_density, periodogram, sample_acf, whittle_estimate
from .methods import MethodResult, MethodSpec, run_method
from .nile import NileReport, SeriesFile, load_series, nile_analysis
from .partition import (
    PartitionModel,
    PiecewiseFit,
    cell_bounds,
    contrast_curve,
    empirical_contrast,
    fit_piecewise,
)
from .penalties import (
    Dimension,
    ModelWeights,
    PowerGamma,
    PowerGammaPlusLog,
    TraceExact,
    default_weights,
    rho_penalty,
    shape_value,
    theoretical_penalty,
)
from .processes import (
    Arma21,
    DmrChain,
    Fgn,
    WhiteNoise,
    generate_observations,
    simulate_arma21,
    simulate_dmr_chain,
    simulate_fgn,
    target_signal,
)
from .selection import DimensionJumpResult, SelectionPath, dimension_jump, regularization_path, select_min

__version__ = "0.1.0"
