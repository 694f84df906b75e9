import os
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT))

from src.core.model import Channel, PhysicalConstants  # noqa: E402


@pytest.fixture
def constants():
    return PhysicalConstants()


@pytest.fixture
def hydrogen(constants):
    """Hydrogen Dirac channel j = 1/2, plus branch (1S1/2, 2P1/2, ...)."""
    return Channel.dirac(1, 1, "plus", constants)


@pytest.fixture
def diagonal_channel():
    """
    Channel where binding -2 and eta 2 give D = 0 exactly.

    With alpha = 2**-30 the alpha^2 correction is below one ulp of 2m, so
    k^2 = -4 is exact.
    """
    return Channel.dirac(1, 1, "plus", PhysicalConstants(alpha=2.0 ** -30))


@pytest.fixture(autouse=True)
def clean_settings_env():
    yield
    for key in [k for k in os.environ if k.startswith("RELCOULOMB_")]:
        del os.environ[key]
