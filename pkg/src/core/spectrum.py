"""
Spectrum Solver
===============
Bound states as zeros of det((G^(N))^-1), refined by bisection.

det((G^(N))^-1) changes sign at its zeros (the eigenvalues) and also where it
passes through a singularity of the continued-fraction tail, so every refined
bracket is checked before it is reported as a level.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import BracketError, DomainError, RelCoulombError
from .greens import DEFAULT_MAX_TERMS, DEFAULT_TOL, _assemble_inverse
from .jacobi import JacobiOperator
from .model import (
    Channel,
    LevelLabel,
    PhysicalConstants,
    dirac_energy_exact,
    schrodinger_energy,
)

logger = logging.getLogger(__name__)

# Records disagreeing with the closed form beyond this are flagged.
AGREEMENT_THRESHOLD = 1e-11

# eta / kappa ratios tried by seeded solves when no eta is configured
VISIBILITY_RATIOS = (0.03, 20.0, 0.1, 5.0, 0.01, 50.0)

# (system, Z, level) rows of the classic hydrogen/uranium comparison table.
TABLE_ONE: Tuple[Tuple[str, int, LevelLabel], ...] = (
    ("hydrogen", 1, LevelLabel(1, 0, 1)),
    ("hydrogen", 1, LevelLabel(2, 1, 1)),
    ("hydrogen", 1, LevelLabel(2, 1, 3)),
    ("hydrogen", 1, LevelLabel(50, 1, 1)),
    ("hydrogen", 1, LevelLabel(50, 1, 3)),
    ("uranium", 92, LevelLabel(1, 0, 1)),
    ("uranium", 92, LevelLabel(100, 2, 3)),
    ("uranium", 92, LevelLabel(100, 2, 5)),
)


@dataclass(frozen=True)
class PoleSearchConfig:
    """
    Settings for pole scans and seeded level solves.

    Args:
        rank: Rank N of the inverse Green's matrix
        eta: Sturmian scale; None picks it per level (seeded solves) or 1.0 (scans)
        window: (lower, upper) binding-energy scan window, upper < 0
        grid_points: Scan grid size
        rel_tol: Bisection tolerance, relative in binding energy
        max_bisections: Cap on bisection steps per bracket
        spacing: "geometric" in |binding| or "linear"
        seed_window: Half-width of seeded windows, relative to the seed
        seed_points: Scan grid size inside a seeded window
        cf_tol: Continued-fraction tolerance
        max_terms: Continued-fraction term cap
    """

    rank: int = 2
    eta: Optional[float] = None
    window: Tuple[float, float] = (-0.6, -0.01)
    grid_points: int = 400
    rel_tol: float = 1e-13
    max_bisections: int = 200
    spacing: str = "geometric"
    seed_window: float = 1e-3
    seed_points: int = 8
    cf_tol: float = DEFAULT_TOL
    max_terms: int = DEFAULT_MAX_TERMS

    def __post_init__(self):
        lower, upper = self.window
        if not upper < 0:
            raise DomainError(f"scan window must lie below the continuum, got upper={upper}")
        if not lower < upper:
            raise DomainError(f"scan window is empty: {self.window}")
        if self.rank < 1:
            raise DomainError(f"rank must be positive, got {self.rank}")
        if self.eta is not None and not self.eta > 0:
            raise DomainError(f"eta must be positive, got {self.eta}")
        if self.grid_points < 2 or self.seed_points < 2:
            raise DomainError("scan grids need at least two points")
        if not 0 < self.rel_tol < 1e-3:
            raise DomainError(f"rel_tol must lie in (0, 1e-3), got {self.rel_tol}")
        if self.spacing not in ("geometric", "linear"):
            raise DomainError(f"spacing must be 'geometric' or 'linear', got {self.spacing!r}")
        if not 0 < self.seed_window < 1:
            raise DomainError(f"seed_window must lie in (0, 1), got {self.seed_window}")


@dataclass(frozen=True)
class PoleRefinement:
    """A refined pole in one channel together with its closed-form counterpart."""

    binding: float
    exact_binding: float
    n_index: int
    eta: float
    rank: int
    bisection_steps: int
    det_at_root: float

    @property
    def rel_err(self) -> float:
        return abs(self.binding - self.exact_binding) / abs(self.exact_binding)


@dataclass
class LevelRecord:
    """One row of the level table."""

    system: str
    Z: float
    label: str
    E_cf: float
    E_D: float
    E_S: float
    rel_err: float
    eta: Optional[float] = None
    rank: Optional[int] = None
    bisection_steps: Optional[int] = None
    error: Optional[str] = None
    flagged: bool = field(init=False)

    def __post_init__(self):
        self.flagged = self.error is not None or not self.rel_err <= AGREEMENT_THRESHOLD

    @property
    def passed(self) -> bool:
        return not self.flagged

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "LevelRecord":
        data = dict(data)
        data.pop("flagged", None)
        for key in ("E_cf", "E_D", "E_S", "rel_err"):
            if data.get(key) is None:
                data[key] = float("nan")
        return cls(**data)


def det_inverse_green(channel: Channel, eta: float, binding: float, N: int,
                      tol: float = DEFAULT_TOL, max_terms: int = DEFAULT_MAX_TERMS) -> float:
    """Determinant of the rank-N inverse Green's matrix at the given binding energy."""
    op = JacobiOperator(channel, eta, binding)
    matrix, _ = _assemble_inverse(op, N, tol, max_terms)
    det = np.linalg.det(matrix)
    return complex(det) if op.is_complex else float(np.real(det))


def _bisect(f: Callable[[float], float], lo: float, hi: float, f_lo: float,
            rel_tol: float, max_steps: int) -> Tuple[float, int, float]:
    steps = 0
    mid, f_mid = lo, f_lo
    while steps < max_steps:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi) or abs(hi - lo) <= rel_tol * abs(mid):
            break
        f_mid = f(mid)
        steps += 1
        if f_mid == 0:
            break
        if math.copysign(1.0, f_mid) == math.copysign(1.0, f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    else:
        logger.warning(f"bisection stopped after {max_steps} steps at {mid}")
    f_mid = f(mid)
    return mid, steps, f_mid


def _scan_grid(window: Tuple[float, float], points: int, spacing: str) -> np.ndarray:
    lower, upper = window
    if spacing == "geometric":
        # levels accumulate like 1/n^2 toward zero binding
        return -np.geomspace(-lower, -upper, points)
    return np.linspace(lower, upper, points)


def _roots_on_grid(f: Callable[[float], float], grid: Sequence[float], rel_tol: float,
                   max_steps: int) -> List[Tuple[float, int, float]]:
    values = [f(e) for e in grid]
    roots = []
    for k in range(len(grid) - 1):
        lo, hi = grid[k], grid[k + 1]
        f_lo, f_hi = values[k], values[k + 1]
        if f_lo == 0:
            roots.append((lo, 0, 0.0))
            continue
        if f_lo * f_hi > 0:
            continue
        if f_hi == 0:
            continue
        root, steps, f_root = _bisect(f, lo, hi, f_lo, rel_tol, max_steps)
        if abs(f_root) > max(abs(f_lo), abs(f_hi)):
            logger.warning(f"rejected singular bracket [{lo:.12g}, {hi:.12g}] near {root:.12g}")
            continue
        roots.append((root, steps, f_root))

    if values[-1] == 0:
        roots.append((grid[-1], 0, 0.0))

    for k in range(1, len(grid) - 1):
        here = abs(values[k])
        if (here < 0.1 * min(abs(values[k - 1]), abs(values[k + 1]))
                and values[k - 1] * values[k] > 0 and values[k] * values[k + 1] > 0):
            logger.warning(f"determinant dips without a sign change near binding {grid[k]:.12g}; "
                           f"a pair of crossings may be missed, refine the grid")
    return roots


def _dedupe(roots: List[Tuple[float, int, float]], rel_tol: float) -> List[Tuple[float, int, float]]:
    merged: List[Tuple[float, int, float]] = []
    for root in sorted(roots, key=lambda item: item[0]):
        if merged and abs(root[0] - merged[-1][0]) <= 10.0 * rel_tol * abs(root[0]):
            continue
        merged.append(root)
    return merged


def find_poles(channel: Channel, config: PoleSearchConfig = PoleSearchConfig()) -> List[float]:
    """
    Scan the configured window for zeros of det((G^(N))^-1).

    Returns:
        Sorted binding energies (most bound first)
    """
    eta = config.eta if config.eta is not None else 1.0

    def f(binding):
        return det_inverse_green(channel, eta, binding, config.rank, config.cf_tol, config.max_terms)

    grid = _scan_grid(config.window, config.grid_points, config.spacing)
    roots = _dedupe(_roots_on_grid(f, list(grid), config.rel_tol, config.max_bisections), config.rel_tol)
    logger.info(f"{channel.describe()}: {len(roots)} poles in {config.window} (N={config.rank}, eta={eta})")
    return [root for root, _, _ in roots]


def eta_candidates(channel: Channel, n_index: int, binding: float, rank: int = 2) -> List[float]:
    """
    Sturmian scales tried, in order, for a seeded solve.

    At eta = kappa the operator is diagonal at the level, so only the first
    ``rank`` levels show up in the block. Higher levels need |t| close to one,
    t = (eta - kappa)/(eta + kappa), so that the eigenvector keeps weight on
    the first Sturmians.
    """
    if n_index < 0:
        raise DomainError(f"n_index must be nonnegative, got {n_index}")
    kappa = channel.energy_scale(binding)
    ratios = VISIBILITY_RATIOS if n_index >= rank else (1.0,) + VISIBILITY_RATIOS
    candidates = [kappa * ratio for ratio in ratios]
    if all(abs(eta - 1.0) > 1e-12 for eta in candidates):
        candidates.append(1.0)
    return candidates


def _seeded_roots(channel: Channel, eta: float, seed: float,
                  config: PoleSearchConfig) -> List[Tuple[float, int, float]]:
    half = config.seed_window * abs(seed)
    grid = list(np.linspace(seed - half, seed + half, config.seed_points))

    def f(binding):
        return det_inverse_green(channel, eta, binding, config.rank, config.cf_tol, config.max_terms)

    return _dedupe(_roots_on_grid(f, grid, config.rel_tol, config.max_bisections), config.rel_tol)


def _visible_roots(channel: Channel, n_index: int, seed: float,
                   config: PoleSearchConfig) -> Tuple[float, List[Tuple[float, int, float]]]:
    if config.eta is not None:
        return config.eta, _seeded_roots(channel, config.eta, seed, config)

    candidates = eta_candidates(channel, n_index, seed, config.rank)
    for eta in candidates:
        roots = _seeded_roots(channel, eta, seed, config)
        if roots:
            logger.debug(f"eta={eta:.6g} shows n={n_index} of {channel.describe()}")
            return eta, roots
        logger.debug(f"eta={eta:.6g} hides n={n_index}; trying the next scale")
    return candidates[-1], []


def visibility_eta(channel: Channel, n_index: int,
                   config: PoleSearchConfig = PoleSearchConfig()) -> float:
    """
    First candidate scale whose seeded window holds a genuine sign change.

    Raises:
        BracketError: if every candidate hides the level
    """
    seed = channel.exact_binding(n_index)
    eta, roots = _visible_roots(channel, n_index, seed, config)
    if not roots:
        raise BracketError(f"no Sturmian scale shows n={n_index} of {channel.describe()}")
    return eta


def solve_channel_level(channel: Channel, n_index: int,
                        config: PoleSearchConfig = PoleSearchConfig()) -> PoleRefinement:
    """
    Refine the pole with Sturmian index ``n_index`` inside a window seeded by
    the closed-form energy.

    Without a configured eta the candidates of ``eta_candidates`` are tried
    until one shows a genuine sign change.

    Raises:
        BracketError: if no genuine sign change lies in the seeded window
    """
    seed = channel.exact_binding(n_index)
    eta, roots = _visible_roots(channel, n_index, seed, config)
    if not roots:
        tried = "configured" if config.eta is not None else "last tried"
        raise BracketError(
            f"no sign change of det near {seed:.12g} for {channel.describe()} n={n_index} "
            f"({tried} eta={eta:.6g}, N={config.rank})"
        )
    if len(roots) > 1:
        logger.warning(f"{len(roots)} poles in the seeded window of n={n_index}; keeping the closest")
    root, steps, f_root = min(roots, key=lambda item: abs(item[0] - seed))
    logger.debug(f"n={n_index}: {steps} bisection steps")

    return PoleRefinement(
        binding=root,
        exact_binding=seed,
        n_index=n_index,
        eta=eta,
        rank=config.rank,
        bisection_steps=steps,
        det_at_root=f_root,
    )


def solve_level(label: LevelLabel, Z: float, constants: PhysicalConstants = PhysicalConstants(),
                config: PoleSearchConfig = PoleSearchConfig(), system: str = "") -> LevelRecord:
    """
    Solve one spectroscopic level in the Dirac plus-branch channel of its j.

    E_D comes from the Sommerfeld formula and E_S from the Schroedinger levels.
    """
    channel = Channel.dirac(Z, label.two_j, "plus", constants)
    refined = solve_channel_level(channel, label.radial_index, config)
    exact = dirac_energy_exact(Z, label.radial_index, label.two_j, constants).binding
    rel_err = abs(refined.binding - exact) / abs(exact)

    logger.info(f"{system or 'Z=' + format(Z, 'g')} {label}: E_cf={refined.binding:.12g} "
                f"rel_err={rel_err:.1e}")
    return LevelRecord(
        system=system,
        Z=Z,
        label=str(label),
        E_cf=refined.binding,
        E_D=exact,
        E_S=schrodinger_energy(Z, label.principal),
        rel_err=rel_err,
        eta=refined.eta,
        rank=refined.rank,
        bisection_steps=refined.bisection_steps,
    )


def _failed_record(system: str, Z: float, label: LevelLabel, constants: PhysicalConstants,
                   exc: Exception) -> LevelRecord:
    exact = dirac_energy_exact(Z, label.radial_index, label.two_j, constants).binding
    return LevelRecord(
        system=system, Z=Z, label=str(label), E_cf=float("nan"), E_D=exact,
        E_S=schrodinger_energy(Z, label.principal), rel_err=float("nan"),
        error=f"{type(exc).__name__}: {exc}",
    )


def table1(constants: PhysicalConstants = PhysicalConstants(),
           config: PoleSearchConfig = PoleSearchConfig(), workers: int = 4,
           rows: Sequence[Tuple[str, int, LevelLabel]] = TABLE_ONE) -> List[LevelRecord]:
    """
    Solve every comparison-table row, concurrently, in row order.

    A row that fails is returned with ``error`` set instead of aborting the table.
    """
    if workers < 1:
        raise DomainError(f"workers must be positive, got {workers}")

    def solve_row(row):
        system, Z, label = row
        try:
            return solve_level(label, Z, constants, config, system=system)
        except RelCoulombError as exc:
            logger.error(f"{system} {label} failed: {exc}")
            return _failed_record(system, Z, label, constants, exc)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        records = list(pool.map(solve_row, rows))
    logger.info(f"table assembled: {sum(r.passed for r in records)}/{len(records)} rows agree")
    return records
