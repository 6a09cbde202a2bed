"""Hecke eigenvalues of degree-2 Siegel eigenforms: exact recurrences,
generating functions, Rankin-Selberg series and sign statistics."""

from .eigen_core import (
    EigenSystem,
    EigenTable,
    HeckeSeed,
    RawEigenRecord,
    SatakePair,
    extend_multiplicative,
    lambda_prime_power,
    lambda_prime_powers,
    normalize,
    satake_to_seed,
    spin_poly,
)
from .gf_algebra import RationalGF, hadamard, local_rankin_factor, local_spin_gf, series_coeffs
from .graded import GradedRational
from .nonvanishing import CaseTag, classify_case, f_family, first_joint_nonvanishing, sweep_nonvanishing

__version__ = "0.1.0"

__all__ = [
    "CaseTag",
    "EigenSystem",
    "EigenTable",
    "GradedRational",
    "HeckeSeed",
    "RationalGF",
    "RawEigenRecord",
    "SatakePair",
    "classify_case",
    "extend_multiplicative",
    "f_family",
    "first_joint_nonvanishing",
    "hadamard",
    "lambda_prime_power",
    "lambda_prime_powers",
    "local_rankin_factor",
    "local_spin_gf",
    "normalize",
    "satake_to_seed",
    "series_coeffs",
    "spin_poly",
    "sweep_nonvanishing",
]
