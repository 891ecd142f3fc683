"""Shared numeric settings.

All tolerance-sensitive routines accept an optional NumericSettings and fall
back to DEFAULT_SETTINGS, so the whole library can be tightened or loosened
from one place.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class NumericSettings:
    # absolute tolerance for treating two floats as equal
    eq_tol: float = 1e-9
    # relative tolerance below which a matrix counts as singular
    det_tol: float = 1e-12
    # absolute tolerance for treating a weight entry as zero
    weight_zero_tol: float = 1e-12
    # tolerance for group-membership / factorization residuals
    group_tol: float = 1e-8
    # chord solver: bracket doubling cap and bisection iterations
    chord_cap: float = 2.0 ** 60
    chord_bisections: int = 80


DEFAULT_SETTINGS = NumericSettings()
