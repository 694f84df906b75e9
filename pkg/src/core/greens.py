"""
Green's Matrices
================
Continued-fraction tail, rank-N inverse Green's matrix, its inversion and a
brute-force truncation oracle.

The infinite matrix H G = 1 is closed at rank N by folding the rows n >= N
into a single continued fraction F attached to the last retained row:

    inverse[i, j] = H[i, j] + delta(i, N-1) delta(j, N-1) H[N-1, N] F
    F = -a_N / (b_N + a_{N+1} / (b_{N+1} + ...))

All indices are zero-based, so the corner sits at (N-1, N-1).
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Tuple, Union

import numpy as np
from scipy import linalg

from .exceptions import (
    ContinuedFractionError,
    DomainError,
    NearPoleError,
    SingularTruncationError,
)
from .jacobi import JacobiOperator
from .model import Channel, EnergyPoint, Number

logger = logging.getLogger(__name__)

TINY = 1e-300
DEFAULT_TOL = 1e-15
DEFAULT_MAX_TERMS = 1_000_000
CONDITION_FLOOR = 1e13

CoefficientSource = Callable[[int], Tuple[Number, Number]]


@dataclass(frozen=True)
class CFResult:
    """Value and convergence diagnostics of a continued-fraction evaluation."""

    value: Number
    terms_used: int
    residual: float
    converged: bool

    def to_dict(self) -> dict:
        return {
            "value": _jsonable(self.value),
            "terms_used": self.terms_used,
            "residual": self.residual,
            "converged": self.converged,
        }


def _jsonable(value):
    if isinstance(value, complex) or np.iscomplexobj(value):
        value = complex(value)
        if value.imag == 0:
            return value.real
        return {"re": value.real, "im": value.imag}
    return float(value)


def continued_fraction(coefficients: CoefficientSource, start_index: int,
                       tol: float = DEFAULT_TOL,
                       max_terms: int = DEFAULT_MAX_TERMS) -> CFResult:
    """
    Evaluate F = -a_s / (b_s + a_{s+1} / (b_{s+1} + ...)) with s = start_index.

    Modified Lentz forward recurrence. Zero divisors are replaced by 1e-300 and
    the loop stops once the correction factor is within ``tol`` of one.

    Args:
        coefficients: Callable i -> (a_i, b_i)
        start_index: Index of the leading coefficient pair
        tol: Convergence tolerance on |delta - 1|
        max_terms: Largest number of coefficient pairs to consume

    Raises:
        ContinuedFractionError: when max_terms is reached first
    """
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")
    if max_terms < 1:
        raise DomainError(f"max_terms must be positive, got {max_terms}")

    a_lead, b_lead = coefficients(start_index)
    if a_lead == 0:
        return CFResult(value=0.0, terms_used=1, residual=0.0, converged=True)

    # f tracks the denominator b_s + K(a_i / b_i), i > s
    f = b_lead if b_lead != 0 else TINY
    c = f
    d = 0.0
    residual = float("inf")

    for j in range(1, max_terms):
        a, b = coefficients(start_index + j)
        d = b + a * d
        if d == 0:
            d = TINY
        c = b + a / c
        if c == 0:
            c = TINY
        d = 1.0 / d
        delta = c * d
        f *= delta
        residual = abs(delta - 1.0)
        if residual < tol:
            logger.debug(f"continued fraction from i={start_index} converged in {j + 1} terms")
            return CFResult(value=-a_lead / f, terms_used=j + 1, residual=residual, converged=True)

    raise ContinuedFractionError(
        f"continued fraction from i={start_index} did not converge in {max_terms} terms "
        f"(last residual {residual:.2e})",
        terms_used=max_terms, residual=residual,
    )


def _assemble_inverse(op: JacobiOperator, N: int, tol: float,
                      max_terms: int) -> Tuple[np.ndarray, Optional[CFResult]]:
    if N < 1:
        raise DomainError(f"rank must be positive, got {N}")
    matrix = op.truncated(N)
    if op.is_diagonal:
        # D = 0: the operator is diagonal and the truncation is exact
        return matrix, None
    cf = continued_fraction(op.cf_coefficients, N, tol=tol, max_terms=max_terms)
    matrix[N - 1, N - 1] += op.upper(N - 1) * cf.value
    return matrix, cf


def inverse_green_submatrix(channel: Channel, eta: float,
                            energy: Union[EnergyPoint, Number], N: int,
                            tol: float = DEFAULT_TOL,
                            max_terms: int = DEFAULT_MAX_TERMS) -> np.ndarray:
    """
    Rank-N inverse Green's matrix: truncated H plus the corner term H[N-1, N] F.

    Returns the plain diagonal truncation when D = 0.
    """
    matrix, _ = _assemble_inverse(JacobiOperator(channel, eta, energy), N, tol, max_terms)
    return matrix


@dataclass
class GreensResult:
    """Rank-N Green's matrix with its inverse and the continued-fraction diagnostics."""

    rank: int
    energy: EnergyPoint
    eta: float
    inverse_matrix: np.ndarray
    green_matrix: np.ndarray
    cf: Optional[CFResult]
    det_inverse: Number
    condition: float

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "binding": _jsonable(self.energy.binding),
            "total": _jsonable(self.energy.total),
            "eta": self.eta,
            "inverse_matrix": [_jsonable(v) for v in self.inverse_matrix.ravel()],
            "green_matrix": [_jsonable(v) for v in self.green_matrix.ravel()],
            "det_inverse": _jsonable(self.det_inverse),
            "condition": self.condition,
            "cf": self.cf.to_dict() if self.cf is not None else None,
        }


def _real_if_real(value: Number, complex_input: bool) -> Number:
    return complex(value) if complex_input else float(np.real(value))


def green_matrix(channel: Channel, eta: float, energy: Union[EnergyPoint, Number],
                 N: int, tol: float = DEFAULT_TOL, max_terms: int = DEFAULT_MAX_TERMS,
                 strict: bool = True,
                 condition_floor: float = CONDITION_FLOOR) -> GreensResult:
    """
    Invert the rank-N inverse Green's matrix.

    Args:
        strict: Raise NearPoleError above the condition floor instead of
            warning and inverting anyway

    Raises:
        NearPoleError: near a pole (always raised if the matrix is exactly singular)
        ContinuedFractionError: if the tail does not converge at this energy
    """
    op = JacobiOperator(channel, eta, energy)
    inverse, cf = _assemble_inverse(op, N, tol, max_terms)
    complex_input = op.is_complex

    det = _real_if_real(np.linalg.det(inverse), complex_input)
    condition = float(np.linalg.cond(inverse)) if np.all(np.isfinite(inverse)) else float("inf")
    if not np.isfinite(condition) or condition > condition_floor:
        message = (f"inverse Green's matrix is near-singular at binding {op.energy.binding} "
                   f"(condition {condition:.3e}): energy is close to a pole")
        if strict:
            raise NearPoleError(message, inverse_matrix=inverse, det_inverse=det, condition=condition)
        logger.warning(message)

    try:
        green = linalg.solve(inverse, np.eye(N, dtype=inverse.dtype), assume_a="sym")
    except (linalg.LinAlgError, ValueError) as exc:
        raise NearPoleError(f"inverse Green's matrix is singular: {exc}",
                            inverse_matrix=inverse, det_inverse=det, condition=condition) from exc
    green = 0.5 * (green + green.T)

    return GreensResult(
        rank=N,
        energy=op.energy,
        eta=eta,
        inverse_matrix=inverse,
        green_matrix=green,
        cf=cf,
        det_inverse=det,
        condition=condition,
    )


def green_sweep(channel: Channel, eta: float, energies: Iterable[Union[EnergyPoint, Number]],
                N: int, tol: float = DEFAULT_TOL, max_terms: int = DEFAULT_MAX_TERMS,
                strict: bool = True, workers: int = 4) -> List[GreensResult]:
    """Green's matrices over many energies on a thread pool, in input order."""
    energies = list(energies)
    if workers < 1:
        raise DomainError(f"workers must be positive, got {workers}")

    def evaluate(energy):
        return green_matrix(channel, eta, energy, N, tol=tol, max_terms=max_terms, strict=strict)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(evaluate, energies))


def truncated_inverse_oracle(channel: Channel, eta: float,
                             energy: Union[EnergyPoint, Number],
                             K: int, N: int) -> np.ndarray:
    """
    Leading N x N block of the inverse of the K x K truncation of H.

    Independent of the continued fraction; converges to the Green's matrix
    block as K grows.

    Raises:
        SingularTruncationError: if the truncation is singular at this energy
    """
    if N < 1 or K < N:
        raise DomainError(f"oracle needs 1 <= N <= K, got N={N}, K={K}")
    op = JacobiOperator(channel, eta, energy)
    bands = op.truncated_bands(K)
    rhs = np.eye(K, N, dtype=bands.dtype)
    try:
        solution = linalg.solve_banded((1, 1), bands, rhs)
    except linalg.LinAlgError as exc:
        raise SingularTruncationError(
            f"{K}x{K} truncation is singular at binding {op.energy.binding}; perturb the energy"
        ) from exc
    block = solution[:N, :N]
    return 0.5 * (block + block.T)
