"""Adiabatic decoherence of dipole-coupled spin pairs in a phonon bath.

Layout:

* core        constants, configuration, 4-level pair basis
* decoherence generic per-mode closed forms and condensed kernels
* fock        truncated-Fock numerical traces (float64 oracle)
* xprec       double-double trace engine for strong decoherence
* phonon      the concrete pair-phonon model and rate constants
* eigdist     exact eigenvalue-sum distribution and Gaussian limit
* magicecho   reversal sequences, echo amplitude, experiment comparison
* oracles     verification suites
* cli         command-line front end
"""

from .core import (
    CONSTANTS,
    KAPPA,
    KAPPA_VALUES,
    LEVELS,
    ConfigError,
    FundamentalConstants,
    PairLevel,
    PhysicalConfig,
    gypsum_config,
    parse_config,
)
from .decoherence import (
    DecoherenceExponent,
    SingularModeError,
    condensed_kernels,
    condensed_sigma_element,
    decoherence_exponent_k,
    evolve_reduced_matrix,
    s_mn,
)
from .fock import (
    ConvergenceError,
    TruncatedMode,
    converged_s_free,
    converged_s_reversal,
    displaced_identity_residual,
    numeric_s_free,
    numeric_s_reversal,
    thermal_state,
)
from .phonon import (
    RateConstants,
    acoustic_coupling,
    closed_kernels,
    dipolar_coupling,
    discrete_kernel_sums,
    free_sigma,
    initial_after_pulse,
    ix_matrix,
    rate_constants,
    zeta_closed,
)
from .eigdist import EigCountTable, dist_moments, exact_counts, gaussian_limit
from .magicecho import (
    ExperimentRecord,
    ReversalSchedule,
    compare_experiment,
    ix_expectation,
    load_experiment_csv,
    me_amplitude,
    me_sigma,
    reversal_exponent_k,
    theory_curve,
)

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
