"""Numerical laboratory for forced semilinear diffusion with fractional
time and space operators: special functions, fundamental kernels, a
mild-solution integrator, critical-exponent algebra, and sweep tooling."""

__version__ = "0.1.0"

from .errors import (
    BracketingError,
    DomainError,
    NonContractionError,
    NumericalError,
    PreconditionError,
    ResolutionWarning,
    UnsupportedRangeError,
)
from .special import (
    MLParams,
    beta_fn,
    gamma,
    mittag_leffler,
    ml_e_neg,
    wright_phi,
    wright_tail_cut,
)
from .fractional import TimeSeries, caputo_derivative, rl_integral, rl_right_derivative
from .spectral import (
    Field,
    GridSpec,
    SpectralField,
    fractional_laplacian,
    gaussian_field,
    indicator_field,
    load_field,
    lq_norm,
    save_field,
    spectral_tail_fraction,
    to_real,
    to_spectral,
)
from .kernels import (
    KernelProfile,
    KernelSymbol,
    apply_propagator,
    profile,
    profile_lq_norm,
    q_critical,
    restricted_lq_norm,
    symbol_Y,
    symbol_Z,
)
from .solver import (
    BLOWUP,
    GLOBAL,
    UNDETERMINED,
    ClassifyThresholds,
    ModelParams,
    PicardResult,
    SimResult,
    TimeMesh,
    classify,
    duhamel_weights,
    estimate_decay_exponent,
    integrate,
    picard_solve,
)
from .criticality import (
    BetaCheck,
    ExponentReport,
    HypothesisReport,
    QWindow,
    admissible_q_window,
    beta_exponent,
    critical_exponents,
    local_average_hypotheses,
    p_star_exponent,
    smallness_condition,
)
from .harness import (
    BracketResult,
    DataSpec,
    SweepConfig,
    SweepRow,
    bracket_pstar,
    config_from_dict,
    config_from_json,
    rows_to_csv,
    run_sweep,
)

__all__ = [name for name in dir() if not name.startswith("_")]
