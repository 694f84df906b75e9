"""
Physical Model
==============
Constants, Coulomb channels and the closed-form relativistic spectra.

Everything is in atomic units (hbar = m_e = e = 1, c = 1/alpha). Energies are
carried as binding energies (total energy minus the rest energy m c^2) so that
levels with binding 1e-4 Hartree keep their digits next to a rest energy of
~1.9e4 Hartree.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Union

from .exceptions import DomainError

DEFAULT_ALPHA = 1.0 / 137.0359895

# Spectroscopic letters by orbital quantum number (J is skipped by convention).
ORBITAL_LETTERS = "SPDFGHIKLMNOQRTUV"

Number = Union[float, complex]


@dataclass(frozen=True)
class PhysicalConstants:
    """Fine-structure constant and particle mass in atomic units."""

    alpha: float = DEFAULT_ALPHA
    mass: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise DomainError(f"alpha must be positive and finite, got {self.alpha}")
        if not (self.mass > 0 and math.isfinite(self.mass)):
            raise DomainError(f"mass must be positive and finite, got {self.mass}")

    @property
    def c(self) -> float:
        """Speed of light, 1/alpha."""
        return 1.0 / self.alpha

    @property
    def mu(self) -> float:
        """Inverse Compton wavelength m c / hbar."""
        return self.mass / self.alpha

    @property
    def rest_energy(self) -> float:
        return self.mass / self.alpha ** 2

    def wave_number(self, binding: Number) -> Number:
        """E / (hbar c) for a total energy E = m c^2 + binding."""
        return self.mu + binding * self.alpha

    def k_squared(self, binding: Number) -> Number:
        """
        (E / hbar c)^2 - mu^2, evaluated without cancellation.

        Equals binding * (2 m + alpha^2 * binding); negative for bound states.
        """
        return binding * (2.0 * self.mass + self.alpha ** 2 * binding)


class Branch(str, Enum):
    """Spin state of the second-order Dirac equation."""

    PLUS = "plus"
    MINUS = "minus"


@dataclass(frozen=True)
class KleinGordon:
    """Klein-Gordon channel with orbital quantum number l."""

    l: int

    def __post_init__(self):
        if int(self.l) != self.l or self.l < 0:
            raise DomainError(f"l must be a nonnegative integer, got {self.l}")


@dataclass(frozen=True)
class Dirac:
    """Second-order Dirac channel with total angular momentum j = two_j / 2."""

    two_j: int
    branch: Branch = Branch.PLUS

    def __post_init__(self):
        if int(self.two_j) != self.two_j or self.two_j < 1 or self.two_j % 2 != 1:
            raise DomainError(f"two_j must be a positive odd integer, got {self.two_j}")
        object.__setattr__(self, "branch", Branch(self.branch))

    @property
    def j_plus_half(self) -> float:
        return (self.two_j + 1) / 2.0


ChannelKind = Union[KleinGordon, Dirac]


def effective_u(channel_kind: ChannelKind, Z: float, alpha: float) -> float:
    """
    Effective angular parameter u of the radial operator.

    Klein-Gordon: u = -1/2 + sqrt(1/4 + l(l+1) - (Z alpha)^2).
    Dirac:        u = -1/2 -+ 1/2 + sqrt((j + 1/2)^2 - (Z alpha)^2).

    Raises:
        DomainError: if the square-root argument is not positive (supercritical charge).
    """
    za2 = (Z * alpha) ** 2
    if isinstance(channel_kind, KleinGordon):
        l = channel_kind.l
        arg = 0.25 + l * (l + 1) - za2
        if arg <= 0:
            raise DomainError(
                f"Klein-Gordon channel l={l} is supercritical: (Z alpha)^2 = {za2:.6g}"
            )
        return -0.5 + math.sqrt(arg)

    if isinstance(channel_kind, Dirac):
        arg = channel_kind.j_plus_half ** 2 - za2
        if arg <= 0:
            raise DomainError(
                f"Dirac channel j={channel_kind.two_j}/2 is supercritical: Z alpha = {math.sqrt(za2):.6g}"
            )
        gamma = math.sqrt(arg)
        if channel_kind.branch is Branch.PLUS:
            return gamma - 1.0
        return gamma

    raise DomainError(f"Unknown channel kind: {channel_kind!r}")


def sommerfeld_binding(Z: float, n_plus_u_plus_1: float,
                       constants: PhysicalConstants) -> float:
    """
    Binding energy m c^2 ([1 + (Z alpha / nu)^2]^(-1/2) - 1) with nu = n + u + 1.

    This is the diagonal-quantization closed form shared by the Klein-Gordon
    and Dirac channels. expm1/log1p keep the relative precision of tiny
    bindings (n ~ 100).
    """
    if n_plus_u_plus_1 <= 0:
        raise DomainError(f"n + u + 1 must be positive, got {n_plus_u_plus_1}")
    x = (Z * constants.alpha / n_plus_u_plus_1) ** 2
    return constants.rest_energy * math.expm1(-0.5 * math.log1p(x))


@dataclass(frozen=True)
class EnergyPoint:
    """
    An energy held as its binding part plus the rest energy.

    ``total - binding`` is the rest energy by construction.
    """

    binding: Number
    rest_energy: float

    @classmethod
    def from_binding(cls, binding: Number, constants: PhysicalConstants) -> "EnergyPoint":
        return cls(binding=binding, rest_energy=constants.rest_energy)

    @classmethod
    def from_total(cls, total: Number, constants: PhysicalConstants) -> "EnergyPoint":
        return cls(binding=total - constants.rest_energy, rest_energy=constants.rest_energy)

    @property
    def total(self) -> Number:
        return self.rest_energy + self.binding

    @property
    def is_complex(self) -> bool:
        return isinstance(self.binding, complex) and self.binding.imag != 0


@dataclass(frozen=True)
class Channel:
    """
    Coulomb channel: nuclear charge, equation kind, constants and derived u.

    Use ``Channel.dirac`` or ``Channel.klein_gordon`` to build one.
    """

    Z: float
    kind: ChannelKind
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)
    u: float = field(init=False)

    def __post_init__(self):
        if not (self.Z > 0 and math.isfinite(self.Z)):
            raise DomainError(f"Z must be a positive real, got {self.Z}")
        u = effective_u(self.kind, self.Z, self.constants.alpha)
        if u <= -1.0:
            raise DomainError(f"u = {u} <= -1 gives non-normalizable Sturmians")
        object.__setattr__(self, "u", u)

    @classmethod
    def dirac(cls, Z: float, two_j: int, branch: Union[Branch, str] = Branch.PLUS,
              constants: PhysicalConstants = None) -> "Channel":
        return cls(Z=Z, kind=Dirac(two_j=two_j, branch=Branch(branch)),
                   constants=constants or PhysicalConstants())

    @classmethod
    def klein_gordon(cls, Z: float, l: int,
                     constants: PhysicalConstants = None) -> "Channel":
        return cls(Z=Z, kind=KleinGordon(l=l), constants=constants or PhysicalConstants())

    @property
    def is_dirac(self) -> bool:
        return isinstance(self.kind, Dirac)

    def describe(self) -> str:
        if self.is_dirac:
            return f"Dirac Z={self.Z:g} j={self.kind.two_j}/2 ({self.kind.branch.value})"
        return f"Klein-Gordon Z={self.Z:g} l={self.kind.l}"

    def energy(self, binding: Number) -> EnergyPoint:
        return EnergyPoint.from_binding(binding, self.constants)

    def energy_scale(self, binding: float) -> float:
        """Decay constant kappa = sqrt(mu^2 - (E/hbar c)^2) of a bound state."""
        k2 = self.constants.k_squared(binding)
        if k2 >= 0:
            raise DomainError(f"binding {binding} is not below the continuum")
        return math.sqrt(-k2)

    def exact_binding(self, n_index: int) -> float:
        """
        Closed-form pole for Sturmian index n_index in this channel.

        Dirac plus: n_index is the radial quantum number n_r.
        Dirac minus: u is larger by one, so n_index = n_r - 1.
        """
        if n_index < 0:
            raise DomainError(f"n_index must be nonnegative, got {n_index}")
        return sommerfeld_binding(self.Z, n_index + self.u + 1.0, self.constants)

    def nearest_index(self, binding: float) -> int:
        """Sturmian index whose closed-form pole lies closest to ``binding``."""
        ratio = binding / self.constants.rest_energy
        if not -1.0 < ratio < 0.0:
            raise DomainError(f"binding {binding} is outside the bound-state range")
        # (m c^2 / E)^2 - 1 = (Z alpha / nu)^2
        excess = math.expm1(-2.0 * math.log1p(ratio))
        nu = self.Z * self.constants.alpha / math.sqrt(excess)
        return max(0, int(round(nu - self.u - 1.0)))


@dataclass(frozen=True)
class LevelLabel:
    """Spectroscopic label n L_j, e.g. 2P3/2 -> principal=2, l=1, two_j=3."""

    principal: int
    l: int
    two_j: int

    def __post_init__(self):
        if self.principal < 1:
            raise DomainError(f"principal quantum number must be >= 1, got {self.principal}")
        if self.l < 0 or self.l >= len(ORBITAL_LETTERS):
            raise DomainError(f"unsupported orbital quantum number l={self.l}")
        if abs(2 * self.l - self.two_j) != 1:
            raise DomainError(f"two_j={self.two_j} is incompatible with l={self.l}")
        if self.radial_index < 0 or self.l >= self.principal:
            raise DomainError(f"level n={self.principal}, l={self.l}, j={self.two_j}/2 does not exist")

    @property
    def letter(self) -> str:
        return ORBITAL_LETTERS[self.l]

    @property
    def radial_index(self) -> int:
        """n_r = n - (j + 1/2)."""
        return self.principal - (self.two_j + 1) // 2

    def __str__(self) -> str:
        return f"{self.principal}{self.letter}{self.two_j}/2"


def dirac_energy_exact(Z: float, n_r: int, two_j: int,
                       constants: PhysicalConstants) -> EnergyPoint:
    """
    Sommerfeld fine-structure energy of a Dirac-Coulomb level.

    E = m c^2 [1 + (Z alpha / (n_r + sqrt((j+1/2)^2 - (Z alpha)^2)))^2]^(-1/2)

    Raises:
        DomainError: on supercritical Z alpha or negative n_r.
    """
    if n_r < 0:
        raise DomainError(f"n_r must be nonnegative, got {n_r}")
    kind = Dirac(two_j=two_j)
    arg = kind.j_plus_half ** 2 - (Z * constants.alpha) ** 2
    if arg <= 0:
        raise DomainError(f"Z alpha = {Z * constants.alpha:.6g} is supercritical for j={two_j}/2")
    binding = sommerfeld_binding(Z, n_r + math.sqrt(arg), constants)
    return EnergyPoint.from_binding(binding, constants)


def kg_energy_exact(Z: float, n_r: int, l: int,
                    constants: PhysicalConstants) -> EnergyPoint:
    """Klein-Gordon Coulomb energy m c^2 [1 + (Z alpha / (n_r + u + 1))^2]^(-1/2)."""
    if n_r < 0:
        raise DomainError(f"n_r must be nonnegative, got {n_r}")
    u = effective_u(KleinGordon(l=l), Z, constants.alpha)
    binding = sommerfeld_binding(Z, n_r + u + 1.0, constants)
    return EnergyPoint.from_binding(binding, constants)


def schrodinger_energy(Z: float, n: int) -> float:
    """Non-relativistic hydrogen-like level -Z^2 / (2 n^2)."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return -Z ** 2 / (2.0 * n ** 2)
