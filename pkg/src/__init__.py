"""
Relativistic Coulomb Green's Matrices (relcoulomb)
==================================================

A Python package for the Klein-Gordon and second-order Dirac Coulomb Green's
operators on the Coulomb-Sturmian basis, built from a Jacobi matrix closed by
a continued fraction.

Main Components:
- Closed-form relativistic hydrogen-like spectra
- Coulomb-Sturmian functions and overlap checks
- Rank-N Green's matrices with continued-fraction tails
- Bound states as poles of the Green's matrix
"""

__version__ = "1.0.0"
__author__ = "relcoulomb contributors"

from .core.greens import green_matrix
from .core.model import Channel, PhysicalConstants
from .core.spectrum import find_poles, solve_level, table1

__all__ = [
    'Channel',
    'PhysicalConstants',
    'green_matrix',
    'find_poles',
    'solve_level',
    'table1',
]
