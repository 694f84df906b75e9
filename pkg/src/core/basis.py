"""
Coulomb-Sturmian Basis
======================
Generalized Laguerre recurrences, Sturmian functions, the overlap matrix and
quadrature checks of biorthogonality.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Union

import numpy as np
from scipy.special import gammaln, roots_genlaguerre

from .exceptions import DomainError, QuadratureError
from .model import Channel

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class SturmianParams:
    """Scale eta and angular parameter u of a Sturmian family."""

    eta: float
    u: float

    def __post_init__(self):
        if not (self.eta > 0 and math.isfinite(self.eta)):
            raise DomainError(f"eta must be positive, got {self.eta}")
        if not self.u > -1.0:
            raise DomainError(f"u must exceed -1, got {self.u}")

    @classmethod
    def for_channel(cls, channel: Channel, eta: float) -> "SturmianParams":
        return cls(eta=eta, u=channel.u)

    @property
    def laguerre_order(self) -> float:
        return 2.0 * self.u + 1.0


def ladder_factor(k: int, u: float) -> float:
    """
    sqrt((k+1)(k+2u+2)), the coupling between Sturmians k and k+1.

    Both orderings of an off-diagonal pair go through this one expression, so
    overlap and Jacobi matrices come out exactly symmetric.
    """
    return math.sqrt((k + 1) * (k + 2.0 * u + 2.0))


def laguerre_general(n: int, a: float, x: ArrayLike) -> ArrayLike:
    """
    Generalized Laguerre polynomial L_n^a(x) by upward recurrence.

    Args:
        n: Degree, n >= 0
        a: Order, a > -1
        x: Scalar or array of nonnegative arguments

    Returns:
        Same shape as ``x``
    """
    if n < 0:
        raise DomainError(f"Laguerre degree must be nonnegative, got {n}")
    if not a > -1.0:
        raise DomainError(f"Laguerre order must exceed -1, got {a}")

    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)

    prev = np.ones_like(x)
    if n == 0:
        return float(prev) if scalar else prev

    cur = 1.0 + a - x
    for k in range(2, n + 1):
        prev, cur = cur, ((2 * k - 1 + a - x) * cur - (k - 1 + a) * prev) / k

    return float(cur) if scalar else cur


def sturmian_eval(n: int, params: SturmianParams, r: ArrayLike) -> ArrayLike:
    """
    Coulomb-Sturmian function S_n(r).

    [Gamma(n+1)/Gamma(n+2u+2)]^(1/2) (2 eta r)^(u+1) exp(-eta r) L_n^(2u+1)(2 eta r),
    with the prefactor assembled in log space so n ~ 100 does not overflow.

    Raises:
        DomainError: for r <= 0, n < 0, or a non-finite result.
    """
    if n < 0:
        raise DomainError(f"Sturmian index must be nonnegative, got {n}")

    scalar = np.ndim(r) == 0
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("Sturmians are evaluated at r > 0 only")

    u, eta = params.u, params.eta
    x = 2.0 * eta * r
    log_norm = 0.5 * (gammaln(n + 1.0) - gammaln(n + 2.0 * u + 2.0))
    prefactor = np.exp(log_norm + (u + 1.0) * np.log(x) - eta * r)
    value = prefactor * laguerre_general(n, params.laguerre_order, x)

    if not np.all(np.isfinite(value)):
        raise DomainError(f"S_{n}(r) is not finite on the requested radii")
    return float(value) if scalar else value


def overlap_element(n: int, m: int, params: SturmianParams) -> float:
    """<S_n|S_m>: tridiagonal, (2u+2n+2)/(2 eta) on the diagonal."""
    if n < 0 or m < 0:
        raise DomainError(f"indices must be nonnegative, got ({n}, {m})")
    if n == m:
        return (2.0 * params.u + 2.0 * n + 2.0) / (2.0 * params.eta)
    if abs(n - m) == 1:
        return -ladder_factor(min(n, m), params.u) / (2.0 * params.eta)
    return 0.0


def overlap_matrix(K: int, params: SturmianParams) -> np.ndarray:
    """K x K Gram matrix of the first K Sturmians."""
    if K < 1:
        raise DomainError(f"matrix size must be positive, got {K}")
    gram = np.zeros((K, K))
    for n in range(K):
        gram[n, n] = overlap_element(n, n, params)
        if n + 1 < K:
            gram[n, n + 1] = gram[n + 1, n] = overlap_element(n, n + 1, params)
    return gram


@dataclass(frozen=True)
class RadialGrid:
    """
    Quadrature rule on (0, inf): sum(weights * f(nodes)) ~ integral of f dr.

    ``companion`` is a lower-order rule on the same interval, used to estimate
    the quadrature residual.
    """

    nodes: np.ndarray
    weights: np.ndarray
    companion: Optional["RadialGrid"] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.ndim != 1 or nodes.shape != weights.shape or nodes.size < 2:
            raise DomainError("grid needs matching one-dimensional nodes and weights")
        if nodes[0] <= 0 or np.any(np.diff(nodes) <= 0):
            raise DomainError("grid nodes must be positive and strictly increasing")
        if np.any(weights <= 0):
            raise DomainError("grid weights must be positive")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return self.nodes.size

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values))

    @classmethod
    def gauss_laguerre(cls, params: SturmianParams, size: int = 64,
                       _with_companion: bool = True) -> "RadialGrid":
        """
        Generalized Gauss-Laguerre rule with order 2u+1, mapped to r = x / (2 eta).

        The weight x^(2u+1) e^(-x) is folded back into plain weights, so the
        rule integrates products of two Sturmians (times 1/r or 1) exactly up
        to polynomial degree 2*size - 1 in x.
        """
        if size < 2:
            raise DomainError(f"grid size must be at least 2, got {size}")
        a = params.laguerre_order
        x, w = roots_genlaguerre(size, a)
        nodes = x / (2.0 * params.eta)
        weights = np.exp(np.log(w) - a * np.log(x) + x) / (2.0 * params.eta)
        companion = None
        if _with_companion and size >= 4:
            companion = cls.gauss_laguerre(params, size - size // 4, _with_companion=False)
        return cls(nodes=nodes, weights=weights, companion=companion)

    @classmethod
    def gauss_legendre(cls, r_max: float, size: int = 200, power: int = 3,
                       _with_companion: bool = True) -> "RadialGrid":
        """Gauss-Legendre rule on [0, r_max] through the map r = r_max * s^power."""
        if not r_max > 0:
            raise DomainError(f"r_max must be positive, got {r_max}")
        if size < 2 or power < 1:
            raise DomainError("gauss_legendre needs size >= 2 and power >= 1")
        s, w = np.polynomial.legendre.leggauss(size)
        t = 0.5 * (s + 1.0)
        nodes = r_max * t ** power
        weights = 0.5 * w * r_max * power * t ** (power - 1)
        companion = None
        if _with_companion and size >= 4:
            companion = cls.gauss_legendre(r_max, size - size // 4, power, _with_companion=False)
        return cls(nodes=nodes, weights=weights, companion=companion)

    @classmethod
    def uniform(cls, r_min: float, r_max: float, h: float,
                _with_companion: bool = True) -> "RadialGrid":
        """Equally spaced nodes r_min + i*h with trapezoidal weights."""
        if not (0 < r_min < r_max) or not h > 0:
            raise DomainError("uniform grid needs 0 < r_min < r_max and h > 0")
        count = int(round((r_max - r_min) / h))
        if count < 2:
            raise DomainError("uniform grid needs at least three nodes")
        nodes = r_min + h * np.arange(count + 1)
        weights = np.full(count + 1, h)
        weights[0] = weights[-1] = 0.5 * h
        companion = None
        if _with_companion and count >= 4 and count % 2 == 0:
            companion = cls.uniform(r_min, nodes[-1], 2.0 * h, _with_companion=False)
        return cls(nodes=nodes, weights=weights, companion=companion)

    @staticmethod
    def adaptive_r_max(n: int, m: int, params: SturmianParams, digits: int = 16) -> float:
        """Radius beyond which S_n S_m has decayed by about ``digits`` decades."""
        x_max = 2.0 * (n + m + 2.0 * params.u + 2.0) + 2.0 * digits * math.log(10.0)
        return x_max / (2.0 * params.eta)

    @property
    def spacing(self) -> float:
        """Uniform step; raises for non-uniform grids."""
        steps = np.diff(self.nodes)
        if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
            raise DomainError("finite differences need a uniform grid")
        return (self.nodes[-1] - self.nodes[0]) / (self.nodes.size - 1)


class QuadratureEstimate(NamedTuple):
    value: float
    residual: float


def _sturmian_integral(n: int, m: int, params: SturmianParams,
                       grid: RadialGrid, weight: str) -> float:
    r = grid.nodes
    integrand = sturmian_eval(n, params, r) * sturmian_eval(m, params, r)
    if weight == "inverse_r":
        integrand = integrand / r
    return grid.integrate(integrand)


def overlap_numeric(n: int, m: int, params: SturmianParams,
                    grid: Optional[RadialGrid] = None, weight: str = "inverse_r",
                    tol: float = 1e-10) -> QuadratureEstimate:
    """
    Quadrature of the integral of S_n(r) w(r) S_m(r) dr.

    Args:
        n, m: Sturmian indices
        params: Sturmian family
        grid: Quadrature rule; defaults to the generalized Gauss-Laguerre rule
        weight: "inverse_r" (biorthogonality) or "unit" (overlap)
        tol: Largest acceptable residual estimate

    Returns:
        QuadratureEstimate(value, residual)

    Raises:
        QuadratureError: when the residual estimate exceeds ``tol``
    """
    if weight not in ("inverse_r", "unit"):
        raise DomainError(f"weight must be 'inverse_r' or 'unit', got {weight!r}")
    if grid is None:
        grid = RadialGrid.gauss_laguerre(params, size=max(32, n + m + 16))

    value = _sturmian_integral(n, m, params, grid, weight)
    residual = 0.0
    if grid.companion is not None:
        residual = abs(value - _sturmian_integral(n, m, params, grid.companion, weight))

    logger.debug(f"overlap_numeric n={n} m={m} weight={weight}: {value:.3e} (residual {residual:.1e})")
    if residual > tol:
        raise QuadratureError(
            f"quadrature residual {residual:.2e} exceeds {tol:.1e} for n={n}, m={m}",
            value=value, residual=residual,
        )
    return QuadratureEstimate(value=value, residual=residual)


def sturmian_ode_residual(n: int, params: SturmianParams, grid: RadialGrid) -> float:
    """
    Normalized residual of the Sturmian equation on a uniform grid.

    max |(-d2/dr2 + eta^2 + u(u+1)/r^2 - 2 eta (n+u+1)/r) S_n| / max |S_n|,
    with the second derivative from central differences at interior nodes.
    """
    h = grid.spacing
    r = grid.nodes
    s = sturmian_eval(n, params, r)
    second = (s[2:] - 2.0 * s[1:-1] + s[:-2]) / h ** 2

    u, eta = params.u, params.eta
    inner = r[1:-1]
    potential = eta ** 2 + u * (u + 1.0) / inner ** 2 - 2.0 * eta * (n + u + 1.0) / inner
    residual = -second + potential * s[1:-1]
    return float(np.max(np.abs(residual)) / np.max(np.abs(s)))
