"""Measurement angles phi_n for the A_z / A_x settings."""

import math

from entstruct.core.exceptions import DomainError

# Tabulated optimal angles; every other n uses 2*pi/n. n = 9 is not tabulated
# and is assigned 2*pi/9 for continuity with the n > 9 rule.
ANGLE_TABLE: dict[int, float] = {
    2: math.pi / 2,
    3: 1.231,
    4: 1.0155,
    5: 0.866,
    6: 0.7559,
    7: 0.6713,
    8: 0.6,
}


def angle_for(n: int) -> float:
    """phi_n in radians for a global qubit count ``n >= 1``."""
    if n < 1:
        raise DomainError("Qubit count must be at least 1", "INVALID_QUBIT_COUNT", {"n": n})
    return ANGLE_TABLE.get(n, 2 * math.pi / n)
