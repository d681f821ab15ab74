"""Secrecy outage analysis for transmit antenna selection with Alamouti coding.

The package evaluates the secrecy outage probability, the probability
of non-zero secrecy capacity, and the epsilon-outage secrecy capacity
of a multi-antenna wiretap link three independent ways: an analytic
closed form, numerical quadrature on the SNR densities, and Monte
Carlo channel simulation.  The three routes cross-validate each other;
see the ``validate`` helpers and the command line interface.
"""

from .channel import (
    AlamoutiRoundtrip,
    AntennaSelection,
    ChannelRealization,
    SnrSample,
    alamouti_combine,
    alamouti_encode,
    alamouti_roundtrip,
    column_norms,
    draw_channel,
    secrecy_capacity,
    select_antennas,
    snr_sample,
    snr_single_tas,
    snr_tas_alamouti,
)
from .closedform import (
    CoefficientTable,
    ClosedFormContext,
    OutageBreakdown,
    closed_form_outage,
    eps_outage_capacity,
    expansion_coeffs,
    f1_term,
    f2_term,
    outage_breakdown,
    prob_nonzero_secrecy,
    psi1,
    psi2,
    psi3,
    psi4,
    w_integral,
)
from .config import Scheme, SystemConfig, db_to_linear, linear_to_db
from .errors import NumericalFailureError, PrecisionExhaustedError
from .montecarlo import (
    EstimatorResult,
    NormalizedDraws,
    draw_components,
    estimate_nonzero_secrecy,
    estimate_outage,
    outage_events,
    snr_pairs,
)
from .quadrature import (
    DensityGrid,
    density_sum_two_largest,
    gamma_branch_density,
    outage_quadrature,
)
from .sweeps import (
    CSV_COLUMNS,
    EVALUATORS,
    METRICS,
    PRESET_NAMES,
    SCHEMA_VERSION,
    CrossoverResult,
    EvaluatorSettings,
    SweepRow,
    SweepSpec,
    SweepSpecError,
    ValidationReport,
    ValidationRow,
    build_preset,
    find_crossover,
    load_sweep_spec,
    run_preset,
    run_sweep,
    validate,
    validation_grid,
    write_rows_csv,
    write_validation_csv,
)

__version__ = "0.1.0"

__all__ = [
    "AlamoutiRoundtrip",
    "AntennaSelection",
    "CSV_COLUMNS",
    "ChannelRealization",
    "ClosedFormContext",
    "CoefficientTable",
    "CrossoverResult",
    "DensityGrid",
    "EVALUATORS",
    "EstimatorResult",
    "EvaluatorSettings",
    "METRICS",
    "NormalizedDraws",
    "NumericalFailureError",
    "OutageBreakdown",
    "PRESET_NAMES",
    "PrecisionExhaustedError",
    "SCHEMA_VERSION",
    "Scheme",
    "SnrSample",
    "SweepRow",
    "SweepSpec",
    "SweepSpecError",
    "SystemConfig",
    "ValidationReport",
    "ValidationRow",
    "__version__",
    "alamouti_combine",
    "alamouti_encode",
    "alamouti_roundtrip",
    "build_preset",
    "closed_form_outage",
    "column_norms",
    "db_to_linear",
    "density_sum_two_largest",
    "draw_channel",
    "draw_components",
    "eps_outage_capacity",
    "estimate_nonzero_secrecy",
    "estimate_outage",
    "expansion_coeffs",
    "f1_term",
    "f2_term",
    "find_crossover",
    "gamma_branch_density",
    "linear_to_db",
    "load_sweep_spec",
    "outage_breakdown",
    "outage_events",
    "outage_quadrature",
    "prob_nonzero_secrecy",
    "psi1",
    "psi2",
    "psi3",
    "psi4",
    "run_preset",
    "run_sweep",
    "secrecy_capacity",
    "select_antennas",
    "snr_pairs",
    "snr_sample",
    "snr_single_tas",
    "snr_tas_alamouti",
    "validate",
    "validation_grid",
    "w_integral",
    "write_rows_csv",
    "write_validation_csv",
]
