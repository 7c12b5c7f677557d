"""Verification toolkit for Hardy and Rellich inequalities of weighted operators.

The package evaluates the closed-form constants of the two-exponent weight
family, checks the commutator criterion that upgrades a Hardy inequality to
a Rellich inequality, and confirms both constants and the supporting
quadratic-form identities numerically through banded variational solves on
truncated log-spaced grids.
"""

from .constants import (
    ConstantLedger,
    Regime,
    grushin_constants,
    hardy_constant,
    nu_constant,
    regime_formula_a2,
    regime_gap,
    rellich_constant,
)
from .errors import (
    AssemblyError,
    ConfigError,
    ConvergenceError,
    IdentityViolationError,
    SolverError,
    UnsupportedConfigurationError,
)
from .radial_spectral import (
    AssembledForms,
    ConvergenceReport,
    GridSpec,
    QuotientEstimate,
    RadialGrid,
    TrialCutoff,
    assemble,
    convergence_study,
    default_schedule,
    dense_reference_min,
    hardy_quotient_min,
    rellich_quotient_min,
    sharpness_sequence,
    trial_quotient,
)
from .weights import WeightParams, WeightProfile

__version__ = "0.1.0"

__all__ = [
    "AssembledForms",
    "AssemblyError",
    "ConfigError",
    "ConstantLedger",
    "ConvergenceError",
    "ConvergenceReport",
    "GridSpec",
    "IdentityViolationError",
    "QuotientEstimate",
    "RadialGrid",
    "Regime",
    "SolverError",
    "TrialCutoff",
    "UnsupportedConfigurationError",
    "WeightParams",
    "WeightProfile",
    "assemble",
    "convergence_study",
    "default_schedule",
    "dense_reference_min",
    "grushin_constants",
    "hardy_constant",
    "hardy_quotient_min",
    "nu_constant",
    "regime_formula_a2",
    "regime_gap",
    "rellich_constant",
    "rellich_quotient_min",
    "sharpness_sequence",
    "trial_quotient",
]
