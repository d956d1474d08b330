"""Unit-interval scaling of input values and pressure grids"""

import logging
from dataclasses import asdict, dataclass
from typing import Dict

import numpy as np

from src.dataset.loader import IndexGrid
from src.errors import ConfigError, DataError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScalingBounds:
    """Affine map g(z) = (z - l) / (u - l) sending [l, u] onto [0, 1]"""
    l: float
    u: float

    def __post_init__(self):
        if not (np.isfinite(self.l) and np.isfinite(self.u)) or not self.l < self.u:
            raise ConfigError(f"Scaling bounds need finite l < u, got l={self.l}, u={self.u}")

    @property
    def width(self) -> float:
        return self.u - self.l


@dataclass(frozen=True)
class ScalingEntry:
    """One row of the scaling table: value bounds (x_l, x_u) and index bounds (t_l, t_u)"""
    unit: str
    K: int
    x_l: float
    x_u: float
    t_l: float
    t_u: float

    @property
    def value_bounds(self) -> ScalingBounds:
        return ScalingBounds(self.x_l, self.x_u)

    @property
    def index_bounds(self) -> ScalingBounds:
        return ScalingBounds(self.t_l, self.t_u)

    def to_dict(self) -> Dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict) -> "ScalingEntry":
        try:
            return cls(
                unit=str(data.get("unit", "")),
                K=int(data["K"]),
                x_l=float(data["x_l"]),
                x_u=float(data["x_u"]),
                t_l=float(data["t_l"]),
                t_u=float(data["t_u"]),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"Invalid scaling entry {data}: {e}") from e


# MLS retrieval variables over their well-informed pressure regions
DEFAULT_SCALING_TABLE: Dict[str, ScalingEntry] = {
    "H2O": ScalingEntry("log ppm", 42, -16.12, -5.16, -2.50, 2.67),
    "HNO3": ScalingEntry("ppm", 16, -7.20e-09, 1.83e-08, -2.50, 0.00),
    "N2O": ScalingEntry("ppm", 18, -4.00e-08, 6.22e-07, -2.00, 0.84),
    "O3": ScalingEntry("ppm", 39, -3.96e-06, 1.21e-05, -2.50, 1.67),
    "Temp": ScalingEntry("log Kelvin", 43, 4.59, 5.73, -2.50, 3.00),
}


def normalize(z, bounds: ScalingBounds, name: str = "") -> np.ndarray:
    """
    Map values onto the unit interval

    Values outside [l, u] land outside [0, 1]; they are kept and logged.

    Args:
        z: array of raw values
        bounds: scaling bounds
        name: variable name used in log messages

    Returns:
        Array of the same shape as z
    """
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)):
        raise DataError(f"Cannot normalize non-finite values{f' of {name}' if name else ''}")
    x = (z - bounds.l) / bounds.width
    outside = int(np.sum((x < 0.0) | (x > 1.0)))
    if outside:
        logger.warning(f"{outside} value(s){f' of {name}' if name else ''} fall outside the scaling bounds")
    return x


def denormalize(x, bounds: ScalingBounds) -> np.ndarray:
    return bounds.l + np.asarray(x, dtype=float) * bounds.width


def index_from_pressure(p_hpa, bounds: ScalingBounds) -> IndexGrid:
    """Index grid t = g(-log10 p) from a pressure grid in hPa"""
    p = np.asarray(p_hpa, dtype=float)
    if not np.all(np.isfinite(p)) or np.any(p <= 0):
        raise DataError("Pressures must be finite and strictly positive")
    t = normalize(-np.log10(p), bounds, name="pressure grid")
    return IndexGrid(t)
