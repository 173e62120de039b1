"""
Named working precisions and conversions between them.

Arrays live in one of three representations: float32 ndarrays (single),
float64 ndarrays (double) and DoubleDouble (double_double). All conversions
round to nearest-even and let NaN/Inf pass through.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from numerics.double_double import DoubleDouble


class UnknownPrecisionError(ValueError):
    """Raised for a precision name that is not registered."""


class PrecisionOrderError(ValueError):
    """Raised when the high precision of a pair is coarser than the low one."""


class PrecisionId(Enum):
    SINGLE = "single"
    DOUBLE = "double"
    DOUBLE_DOUBLE = "double_double"

    @property
    def unit_roundoff(self):
        return _UNIT_ROUNDOFF[self]

    @property
    def dtype(self):
        """numpy storage dtype (double_double is stored as two float64 arrays)."""
        return np.float32 if self is PrecisionId.SINGLE else np.float64

    @classmethod
    def from_name(cls, name):
        if isinstance(name, cls):
            return name
        key = _ALIASES.get(str(name).strip().lower(), str(name).strip().lower())
        try:
            return cls(key)
        except ValueError:
            valid = ", ".join(p.value for p in cls)
            raise UnknownPrecisionError(f"Unknown precision '{name}' (expected one of: {valid})") from None

    def __str__(self):
        return self.value


_UNIT_ROUNDOFF = {
    PrecisionId.SINGLE: 2.0 ** -24,
    PrecisionId.DOUBLE: 2.0 ** -53,
    PrecisionId.DOUBLE_DOUBLE: 2.0 ** -104,
}

# "quad" is what configs written for a true quad-precision backend call the high leg
_ALIASES = {"quad": "double_double", "dd": "double_double", "float32": "single", "float64": "double"}


def unit_roundoff(precision):
    """Returns the unit roundoff of a registered precision."""
    return PrecisionId.from_name(precision).unit_roundoff


@dataclass(frozen=True)
class PrecisionPair:
    """
    Low/high precision contract of the two-precision algorithms.

    Parameters:
    - low: PrecisionId
        Storage and communication precision (eps_low).
    - high: PrecisionId
        Local computation precision (eps_high <= eps_low).
    """

    low: PrecisionId
    high: PrecisionId

    def __post_init__(self):
        object.__setattr__(self, "low", PrecisionId.from_name(self.low))
        object.__setattr__(self, "high", PrecisionId.from_name(self.high))
        if self.high.unit_roundoff > self.low.unit_roundoff:
            raise PrecisionOrderError(
                f"High precision '{self.high}' is coarser than low precision '{self.low}'"
            )

    @classmethod
    def uniform(cls, precision):
        precision = PrecisionId.from_name(precision)
        return cls(precision, precision)

    @property
    def is_uniform(self):
        return self.low is self.high

    @property
    def label(self):
        return str(self.low) if self.is_uniform else f"{self.low}/{self.high}"


def _dd_to_single(x):
    # float32(hi) is already nearest unless hi sits exactly on a float32 midpoint
    # and lo pushes the true value past it
    hi, lo = x.hi, x.lo
    with np.errstate(over="ignore", invalid="ignore"):
        r = hi.astype(np.float32)
        gap = hi - r.astype(np.float64)
        direction = np.where(gap > 0, np.inf, -np.inf).astype(np.float32)
        neighbour = np.nextafter(r, direction)
        half_step = 0.5 * np.abs(neighbour.astype(np.float64) - r.astype(np.float64))
        on_midpoint = np.isfinite(r) & (gap != 0) & (np.abs(gap) == half_step)
        past_midpoint = on_midpoint & (np.sign(lo) == np.sign(gap))
        r = np.where(past_midpoint, neighbour, r)
    return np.asarray(r, dtype=np.float32)


def cast(x, precision):
    """
    Converts a value to the storage representation of a precision.

    Parameters:
    - x: np.ndarray, scalar or DoubleDouble
    - precision: PrecisionId or str

    Returns:
    - np.ndarray (float32/float64) or DoubleDouble, always a fresh copy
    """
    precision = PrecisionId.from_name(precision)

    if isinstance(x, DoubleDouble):
        if precision is PrecisionId.DOUBLE_DOUBLE:
            return x.copy()
        if precision is PrecisionId.DOUBLE:
            return np.asarray(x.to_float64(), dtype=np.float64)
        return _dd_to_single(x)

    arr = np.asarray(x)
    if precision is PrecisionId.DOUBLE_DOUBLE:
        return DoubleDouble(arr.astype(np.float64, copy=True))
    with np.errstate(over="ignore"):
        return arr.astype(precision.dtype, copy=True)


def demote(x, pair):
    """Rounds a high-precision value into the low precision of the pair."""
    return cast(x, pair.low)


def promote(x, pair):
    """Widens a low-precision value into the high precision of the pair (exact)."""
    return cast(x, pair.high)
