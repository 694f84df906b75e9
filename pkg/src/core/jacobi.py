"""
Jacobi Operator
===============
Matrix elements of the relativistic Coulomb operator on the Sturmian basis.

With k^2 = (E/hbar c)^2 - mu^2 and D = (k^2 + eta^2) / (2 eta):

    H[n, n]   = 2 alpha Z E/(hbar c) + (u+n+1)(k^2 - eta^2)/eta
    H[n, n+1] = H[n+1, n] = -D sqrt((n+1)(n+2u+2))

Rows and columns start at n = 0.
"""

import math
from dataclasses import dataclass, field
from typing import Tuple, Union

import numpy as np

from .basis import ladder_factor
from .exceptions import DomainError, SingularCoefficientError
from .model import Channel, EnergyPoint, Number, PhysicalConstants


def as_energy_point(channel: Channel, energy: Union[EnergyPoint, Number]) -> EnergyPoint:
    """Accept an EnergyPoint or a bare binding energy."""
    if isinstance(energy, EnergyPoint):
        return energy
    return channel.energy(energy)


@dataclass(frozen=True)
class JacobiOperator:
    """
    The infinite symmetric tridiagonal matrix of the channel at a frozen energy.

    Args:
        channel: Coulomb channel (carries Z, u and the constants)
        eta: Sturmian scale, > 0
        energy: EnergyPoint or binding energy
    """

    channel: Channel
    eta: float
    energy: EnergyPoint
    k_squared: Number = field(init=False)
    coupling: Number = field(init=False)
    d: Number = field(init=False)

    def __post_init__(self):
        if not (self.eta > 0 and math.isfinite(self.eta)):
            raise DomainError(f"eta must be positive, got {self.eta}")
        object.__setattr__(self, "energy", as_energy_point(self.channel, self.energy))

        binding = self.energy.binding
        constants = self.channel.constants
        k2 = constants.k_squared(binding)
        object.__setattr__(self, "k_squared", k2)
        # 2 alpha Z E / (hbar c) = 2 Z (m + alpha^2 binding)
        object.__setattr__(self, "coupling",
                           2.0 * self.channel.Z * (constants.mass + constants.alpha ** 2 * binding))
        object.__setattr__(self, "d", (k2 + self.eta ** 2) / (2.0 * self.eta))

    @property
    def constants(self) -> PhysicalConstants:
        return self.channel.constants

    @property
    def u(self) -> float:
        return self.channel.u

    @property
    def is_diagonal(self) -> bool:
        """True when D = 0, i.e. eta^2 = mu^2 - (E/hbar c)^2."""
        return self.d == 0

    @property
    def is_complex(self) -> bool:
        return isinstance(self.d, complex) or np.iscomplexobj(self.d)

    def diagonal(self, n: int) -> Number:
        return self.coupling + (self.u + n + 1.0) * (self.k_squared - self.eta ** 2) / self.eta

    def upper(self, n: int) -> Number:
        """H[n, n+1], equal to H[n+1, n]."""
        return -self.d * ladder_factor(n, self.u)

    def h_element(self, n: int, m: int) -> Number:
        if n < 0 or m < 0:
            raise DomainError(f"indices must be nonnegative, got ({n}, {m})")
        if n == m:
            return self.diagonal(n)
        if abs(n - m) == 1:
            return self.upper(min(n, m))
        return 0.0

    def cf_coefficients(self, i: int) -> Tuple[Number, Number]:
        """
        (a_i, b_i) = (-H[i, i-1] / H[i, i+1], -H[i, i] / H[i, i+1]) for i >= 1.

        Raises:
            SingularCoefficientError: when D = 0 and the off-diagonals vanish
        """
        if i < 1:
            raise DomainError(f"continued-fraction index starts at 1, got {i}")
        upper = self.upper(i)
        if upper == 0:
            raise SingularCoefficientError(
                f"off-diagonal H[{i},{i + 1}] vanishes (D = 0); use the diagonal case"
            )
        return -self.upper(i - 1) / upper, -self.diagonal(i) / upper

    def _dtype(self):
        return complex if self.is_complex else float

    def truncated(self, K: int) -> np.ndarray:
        """Dense K x K leading block of the operator."""
        if K < 1:
            raise DomainError(f"truncation size must be positive, got {K}")
        block = np.zeros((K, K), dtype=self._dtype())
        for n in range(K):
            block[n, n] = self.diagonal(n)
            if n + 1 < K:
                block[n, n + 1] = block[n + 1, n] = self.upper(n)
        return block

    def truncated_bands(self, K: int) -> np.ndarray:
        """K x K leading block in LAPACK (1, 1) banded storage for scipy.linalg.solve_banded."""
        if K < 1:
            raise DomainError(f"truncation size must be positive, got {K}")
        bands = np.zeros((3, K), dtype=self._dtype())
        n = np.arange(K)
        u = self.u
        ladders = np.sqrt((n[:-1] + 1.0) * (n[:-1] + 2.0 * u + 2.0))
        bands[0, 1:] = -self.d * ladders
        bands[1, :] = self.coupling + (u + n + 1.0) * (self.k_squared - self.eta ** 2) / self.eta
        bands[2, :-1] = -self.d * ladders
        return bands
