"""Size caps and frozen tuning constants.

The environment variable CIRCLE_CONV_CAP, when set to a positive integer,
overrides both the grid cap and the counting cap at runtime.
"""

from __future__ import annotations

import os

DEFAULT_GRID_CAP = 1 << 20      # max number of grid cells in a block law
DEFAULT_COUNT_CAP = 10**7       # max number of terms in a collision count
EXACT_WEIGHT_CAP = 4096         # exact-rational weights tracked up to this modulus
DIRECT_CONV_CAP = 4096          # direct O(N^2) convolution up to this modulus
SFT_STATE_CAP = 1 << 17         # transfer-matrix states after budget pruning
SAMPLE_DEPTH_CAP = 4096         # max digits resolved by the samplers
MC_GUARD_DIGITS = 8             # extra digits beyond the frequency resolution
FOURIER_DISTANCE_KMAX = 40      # truncation of the weighted Fourier distance

_ENV_VAR = "CIRCLE_CONV_CAP"


def _env_cap() -> int | None:
    raw = os.environ.get(_ENV_VAR)
    if raw is None:
        return None
    try:
        value = int(raw)
    except ValueError:
        return None
    return value if value > 0 else None


def grid_cap() -> int:
    """Largest admissible number of cells in a grid/block law."""
    return _env_cap() or DEFAULT_GRID_CAP


def count_cap() -> int:
    """Largest admissible number of enumerated sequence terms."""
    return _env_cap() or DEFAULT_COUNT_CAP
