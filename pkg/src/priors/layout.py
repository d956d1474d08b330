"""Parameter layouts and constraining transforms"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Sequence

import numpy as np
from scipy.special import expit, logit

from src.errors import ShapeError


class Transform(str, Enum):
    LOG = "log"            # positive parameters
    LOGIT = "logit"        # parameters in (0, 1)
    IDENTITY = "identity"  # unconstrained parameters

    def to_unconstrained(self, theta):
        if self is Transform.LOG:
            return np.log(theta)
        if self is Transform.LOGIT:
            return logit(theta)
        return np.asarray(theta, dtype=float)

    def to_constrained(self, u):
        if self is Transform.LOG:
            return np.exp(u)
        if self is Transform.LOGIT:
            return expit(u)
        return np.asarray(u, dtype=float)

    def dtheta_du(self, u):
        if self is Transform.LOG:
            return np.exp(u)
        if self is Transform.LOGIT:
            s = expit(u)
            return s * (1.0 - s)
        return np.ones_like(np.asarray(u, dtype=float))

    def log_jacobian(self, u):
        """log |d theta / d u|"""
        if self is Transform.LOG:
            return np.asarray(u, dtype=float)
        if self is Transform.LOGIT:
            return -np.logaddexp(0.0, u) - np.logaddexp(0.0, -u)
        return np.zeros_like(np.asarray(u, dtype=float))

    def grad_log_jacobian(self, u):
        if self is Transform.LOG:
            return np.ones_like(np.asarray(u, dtype=float))
        if self is Transform.LOGIT:
            return 1.0 - 2.0 * expit(u)
        return np.zeros_like(np.asarray(u, dtype=float))

    def in_support(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if self is Transform.LOG:
            return theta > 0
        if self is Transform.LOGIT:
            return (theta >= 0) & (theta <= 1)
        return np.isfinite(theta)


@dataclass(frozen=True)
class ParameterSpec:
    """One free parameter: name, transform and the key of its prior"""
    name: str
    transform: Transform
    prior_key: str


class ParameterLayout:
    """Ordered parameter vector description of one model"""

    def __init__(self, specs: Sequence[ParameterSpec]):
        self.specs = tuple(specs)
        self.names = [spec.name for spec in self.specs]
        if len(set(self.names)) != len(self.names):
            raise ShapeError(f"Duplicate parameter names in layout: {self.names}")
        self._index = {name: i for i, name in enumerate(self.names)}

    @property
    def size(self) -> int:
        return len(self.specs)

    def __len__(self) -> int:
        return self.size

    def index(self, name: str) -> int:
        return self._index[name]

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def _check(self, values) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        if values.shape != (self.size,):
            raise ShapeError(f"Expected {self.size} parameters {self.names}, got shape {values.shape}")
        return values

    def _apply(self, values, method: str) -> np.ndarray:
        values = self._check(values)
        return np.array([getattr(spec.transform, method)(v) for spec, v in zip(self.specs, values)], dtype=float)

    def to_unconstrained(self, theta) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return self._apply(theta, "to_unconstrained")

    def to_constrained(self, u) -> np.ndarray:
        return self._apply(u, "to_constrained")

    def dtheta_du(self, u) -> np.ndarray:
        return self._apply(u, "dtheta_du")

    def log_jacobian(self, u) -> float:
        return float(np.sum(self._apply(u, "log_jacobian")))

    def grad_log_jacobian(self, u) -> np.ndarray:
        return self._apply(u, "grad_log_jacobian")

    def in_support(self, theta) -> bool:
        theta = self._check(theta)
        return bool(all(spec.transform.in_support(v) for spec, v in zip(self.specs, theta)))

    def to_dict(self) -> List[Dict]:
        return [{"name": s.name, "transform": s.transform.value, "prior": s.prior_key} for s in self.specs]


class ParamVector:
    """Constrained parameter values tied to a layout"""

    def __init__(self, layout: ParameterLayout, values):
        self.layout = layout
        values = np.array(layout._check(values), dtype=float)
        values.setflags(write=False)
        self.values = values

    @classmethod
    def from_unconstrained(cls, layout: ParameterLayout, u) -> "ParamVector":
        return cls(layout, layout.to_constrained(u))

    @classmethod
    def from_dict(cls, layout: ParameterLayout, data: Dict[str, float]) -> "ParamVector":
        missing = [name for name in layout.names if name not in data]
        if missing:
            raise ShapeError(f"Missing parameter values: {missing}")
        return cls(layout, [float(data[name]) for name in layout.names])

    def unconstrained(self) -> np.ndarray:
        return self.layout.to_unconstrained(self.values)

    def __getitem__(self, name: str) -> float:
        return float(self.values[self.layout.index(name)])

    def get(self, name: str, default=None):
        return self[name] if name in self.layout else default

    def in_support(self) -> bool:
        return self.layout.in_support(self.values)

    def as_dict(self) -> Dict[str, float]:
        return {name: float(v) for name, v in zip(self.layout.names, self.values)}

    def __repr__(self) -> str:
        body = ", ".join(f"{k}={v:.4g}" for k, v in self.as_dict().items())
        return f"ParamVector({body})"
