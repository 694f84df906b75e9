"""
Level Labels
============
Parsing of spectroscopic labels such as "2P3/2" or "100D5/2".
"""

import re

from ..core.exceptions import ConfigurationError, DomainError
from ..core.model import ORBITAL_LETTERS, LevelLabel

LABEL_PATTERN = re.compile(r"^\s*(\d+)\s*([A-Za-z])\s*(\d+)\s*/\s*2\s*$")


def parse_level_label(text: str) -> LevelLabel:
    """
    Parse "n L j" notation into a LevelLabel.

    Args:
        text: Label like "1S1/2", case-insensitive in the orbital letter

    Raises:
        ConfigurationError: when the text is not a valid label
    """
    match = LABEL_PATTERN.match(text or "")
    if not match:
        raise ConfigurationError(f"cannot parse level label {text!r}; expected e.g. 2P3/2")

    principal, letter, two_j = match.groups()
    letter = letter.upper()
    if letter not in ORBITAL_LETTERS:
        raise ConfigurationError(f"unknown orbital letter {letter!r} in {text!r}")

    try:
        return LevelLabel(int(principal), ORBITAL_LETTERS.index(letter), int(two_j))
    except DomainError as exc:
        raise ConfigurationError(f"invalid level {text!r}: {exc}") from exc
