"""One-dimensional prior families"""

from abc import ABC, abstractmethod
from dataclasses import asdict, dataclass
from typing import Dict, Type

import numpy as np
from scipy import stats

from src.errors import ConfigError


class Prior(ABC):
    """Base class for independent one-dimensional priors"""

    family: str = ""

    @property
    @abstractmethod
    def dist(self):
        """Frozen scipy.stats distribution"""
        pass

    def log_density(self, x):
        """Log density, -inf off the support"""
        value = self.dist.logpdf(x)
        return float(value) if np.ndim(value) == 0 else value

    @abstractmethod
    def grad_log_density(self, x):
        pass

    def sample(self, rng: np.random.Generator, size=None):
        return self.dist.rvs(size=size, random_state=rng)

    def to_dict(self) -> Dict:
        return {"family": self.family, **asdict(self)}


@dataclass(frozen=True)
class InverseGamma(Prior):
    shape: float = 5.0
    scale: float = 5.0
    family = "inverse_gamma"

    @property
    def dist(self):
        return stats.invgamma(self.shape, scale=self.scale)

    def grad_log_density(self, x):
        return -(self.shape + 1.0) / x + self.scale / x ** 2


@dataclass(frozen=True)
class Beta(Prior):
    a: float = 1.0
    b: float = 1.0
    family = "beta"

    @property
    def dist(self):
        return stats.beta(self.a, self.b)

    def grad_log_density(self, x):
        return (self.a - 1.0) / x - (self.b - 1.0) / (1.0 - x)


@dataclass(frozen=True)
class HalfNormal(Prior):
    """Half-normal with scale s; s = sqrt(10) puts HalfNormal(0, 1) on x / sqrt(10)"""
    scale: float = 1.0
    family = "half_normal"

    @property
    def dist(self):
        return stats.halfnorm(scale=self.scale)

    def grad_log_density(self, x):
        return -x / self.scale ** 2


@dataclass(frozen=True)
class Normal(Prior):
    loc: float = 0.0
    scale: float = 1.0
    family = "normal"

    @property
    def dist(self):
        return stats.norm(self.loc, self.scale)

    def grad_log_density(self, x):
        return -(x - self.loc) / self.scale ** 2


@dataclass(frozen=True)
class HalfCauchy(Prior):
    scale: float = 1.0
    family = "half_cauchy"

    @property
    def dist(self):
        return stats.halfcauchy(scale=self.scale)

    def grad_log_density(self, x):
        return -2.0 * x / (self.scale ** 2 + x ** 2)


@dataclass(frozen=True)
class Flat(Prior):
    """Improper constant density on the parameter's support"""
    family = "flat"

    @property
    def dist(self):
        raise ConfigError("A flat prior has no distribution to sample from")

    def log_density(self, x):
        value = np.zeros_like(np.asarray(x, dtype=float))
        return float(value) if np.ndim(value) == 0 else value

    def grad_log_density(self, x):
        return self.log_density(x)


PRIOR_FAMILIES: Dict[str, Type[Prior]] = {
    cls.family: cls for cls in (InverseGamma, Beta, HalfNormal, Normal, HalfCauchy, Flat)
}


def prior_from_dict(data: Dict) -> Prior:
    """Build a prior from {"family": ..., **hyperparameters}"""
    data = dict(data)
    family = data.pop("family", None)
    if family not in PRIOR_FAMILIES:
        raise ConfigError(f"Unknown prior family: {family}. Available: {', '.join(PRIOR_FAMILIES)}")
    try:
        return PRIOR_FAMILIES[family](**{k: float(v) for k, v in data.items()})
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Invalid hyperparameters for {family} prior: {e}") from e
