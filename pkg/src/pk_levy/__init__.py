"""Generalized Pollaczek-Khinchine machinery for spectrally positive Lévy processes.

A model ``X_t = -c t + sigma B_t + (jumps)`` with no negative jumps and
negative mean has a stationary reflected workload whose transform is
``alpha phi'(0) / phi(alpha)``.  This package evaluates that transform,
samples the workload exactly through its geometric-compound representation,
builds models from a prescribed representation, truncates infinite-mean
small jumps, inverts the transform numerically and cross-checks everything
against simulated reflected paths.
"""
from .converse import DensitySpec, ExcessSpec, build, round_trip, spec_from_decomposition
from .decomposition import (
    ExcessDistribution,
    PKDecomposition,
    SampleBatch,
    decompose,
    empirical_lst,
    excess_quantile,
    sample_stationary,
    series_lst,
)
from .errors import (
    ConfigError,
    DomainError,
    InvalidParameter,
    InversionUnstable,
    ModelError,
    NonMonotoneTail,
    NotADensity,
    NotDecomposable,
    NotNonincreasing,
    NumericalError,
    PKLevyError,
    QuadratureFailure,
    UnstableModel,
)
from .exponent import (
    ExponentView,
    exponent_view,
    phi,
    phi_prime_zero,
    pk_lst,
    pk_lst_decomposed,
    stationary_cdf,
    stationary_mean,
    truncate,
    zero_atom,
)
from .jumps import (
    CompoundPoisson,
    DeterministicLaw,
    ExponentialLaw,
    GammaSubordinator,
    JumpMeasure,
    NoJumps,
    ParetoLaw,
    StableSmallJumps,
    TabulatedTail,
    TruncatedJumps,
    UniformLaw,
)
from .model import INFINITE, LevyModel, ValidatedModel, mean_jump, tail, validate
from .numerics import InversionConfig, integrate_tail, invert_lst_to_cdf, ks_distance, ks_two_sample
from .reflection import PathConfig, simulate_increment, simulate_reflected_terminal

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
