"""
Exceptions
==========
Error hierarchy shared by the numerical core and the CLI.
"""

from typing import Optional

import numpy as np


class RelCoulombError(Exception):
    """Base class for every error raised by the package."""


class DomainError(RelCoulombError, ValueError):
    """Unphysical or invalid input: supercritical charge, bad quantum numbers, u <= -1, eta <= 0."""


class ConfigurationError(RelCoulombError, ValueError):
    """Invalid settings value or CLI flag combination."""


class SingularCoefficientError(RelCoulombError, ZeroDivisionError):
    """Continued-fraction coefficients are undefined because the off-diagonal factor D vanishes."""


class ContinuedFractionError(RelCoulombError, ArithmeticError):
    """The continued fraction did not converge within ``max_terms``."""

    def __init__(self, message: str, terms_used: int, residual: float):
        super().__init__(message)
        self.terms_used = terms_used
        self.residual = residual


class NearPoleError(RelCoulombError):
    """The rank-N inverse Green's matrix is too ill-conditioned to invert."""

    def __init__(self, message: str, inverse_matrix: Optional[np.ndarray] = None,
                 det_inverse: complex = 0.0, condition: float = float("inf")):
        super().__init__(message)
        self.inverse_matrix = inverse_matrix
        self.det_inverse = det_inverse
        self.condition = condition


class SingularTruncationError(RelCoulombError, ArithmeticError):
    """The K x K truncation of the Jacobi matrix is singular at this energy."""


class BracketError(RelCoulombError):
    """No sign change of the determinant inside a seeded window."""


class QuadratureError(RelCoulombError):
    """Quadrature residual estimate exceeds the requested tolerance."""

    def __init__(self, message: str, value: float, residual: float):
        super().__init__(message)
        self.value = value
        self.residual = residual
