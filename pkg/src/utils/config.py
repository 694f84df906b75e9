"""
Settings
========
Defaults for the command line, read from the environment and an optional .env file.
"""

import os
from dataclasses import dataclass
from typing import Callable, Optional

from dotenv import load_dotenv

from ..core.exceptions import ConfigurationError
from ..core.model import DEFAULT_ALPHA

OUTPUT_FORMATS = ("table", "csv", "json")


@dataclass(frozen=True)
class Settings:
    """Resolved defaults; CLI flags override every field."""

    alpha: float = DEFAULT_ALPHA
    mass: float = 1.0
    eta: Optional[float] = 1.0
    rank: int = 2
    tol: float = 1e-15
    max_terms: int = 1_000_000
    output_format: str = "table"
    workers: int = 4


def _read(name: str, default, parse: Callable, check: Callable = lambda value: True):
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = parse(raw.strip())
    except ValueError as exc:
        raise ConfigurationError(f"{name}={raw!r} is not valid: {exc}") from exc
    if not check(value):
        raise ConfigurationError(f"{name}={raw!r} is out of range")
    return value


def _parse_eta(raw: str) -> Optional[float]:
    if raw.lower() == "auto":
        return None
    return float(raw)


def load_settings(env_file: Optional[str] = None) -> Settings:
    """
    Build Settings from RELCOULOMB_* variables.

    Args:
        env_file: Explicit .env path; by default python-dotenv searches for one.
            Variables already present in the environment win over the file.

    Raises:
        ConfigurationError: on a non-numeric or out-of-range value
    """
    if env_file:
        if not os.path.isfile(env_file):
            raise ConfigurationError(f"env file not found: {env_file}")
        load_dotenv(env_file)
    else:
        load_dotenv()

    positive = lambda value: value > 0  # noqa: E731
    return Settings(
        alpha=_read("RELCOULOMB_ALPHA", DEFAULT_ALPHA, float, positive),
        mass=_read("RELCOULOMB_MASS", 1.0, float, positive),
        eta=_read("RELCOULOMB_ETA", 1.0, _parse_eta, lambda value: value is None or value > 0),
        rank=_read("RELCOULOMB_RANK", 2, int, positive),
        tol=_read("RELCOULOMB_TOL", 1e-15, float, positive),
        max_terms=_read("RELCOULOMB_MAX_TERMS", 1_000_000, int, positive),
        output_format=_read("RELCOULOMB_FORMAT", "table", str.lower,
                            lambda value: value in OUTPUT_FORMATS),
        workers=_read("RELCOULOMB_WORKERS", 4, int, positive),
    )
