"""Numerical core: model, basis, Jacobi operator, Green's matrices and spectrum"""

from .greens import green_matrix, inverse_green_submatrix, truncated_inverse_oracle
from .model import Channel, EnergyPoint, LevelLabel, PhysicalConstants
from .spectrum import PoleSearchConfig, find_poles, solve_level, table1

__all__ = [
    'Channel',
    'EnergyPoint',
    'LevelLabel',
    'PhysicalConstants',
    'PoleSearchConfig',
    'find_poles',
    'green_matrix',
    'inverse_green_submatrix',
    'solve_level',
    'table1',
    'truncated_inverse_oracle',
]
