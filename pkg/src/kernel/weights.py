"""Asymmetric Laplace functional weight"""

from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np

from src.errors import ConfigError


class AlfVariant(str, Enum):
    EDN = "Edn"  # decreasing exponential: tau = 0, kappa = 1
    SDE = "SDE"  # symmetric double exponential: kappa = 1
    ADE = "ADE"  # asymmetric double exponential


@dataclass(frozen=True)
class AlfParams:
    """ALF weight parameters in the (tau, lambda, kappa) parametrization"""
    tau: float
    lam: float
    kappa: float = 1.0
    variant: AlfVariant = AlfVariant.ADE

    def __post_init__(self):
        object.__setattr__(self, "variant", AlfVariant(self.variant))
        if self.variant != AlfVariant.ADE and self.kappa != 1.0:
            raise ConfigError(f"{self.variant.value} weights fix kappa = 1, got {self.kappa}")
        if self.variant == AlfVariant.EDN and self.tau != 0.0:
            raise ConfigError(f"Edn weights fix tau = 0, got {self.tau}")
        if not 0.0 <= self.tau <= 1.0:
            raise ConfigError(f"tau must lie in [0, 1], got {self.tau}")
        if not (self.lam > 0 and self.kappa > 0):
            raise ConfigError(f"lambda and kappa must be positive, got {self.lam}, {self.kappa}")
        if not (np.isfinite(self.lambda1) and np.isfinite(self.lambda2)) or self.lambda1 <= 0 or self.lambda2 <= 0:
            raise ConfigError(f"Derived rates must be finite and positive, got {self.lambda1}, {self.lambda2}")

    @property
    def lambda1(self) -> float:
        return self.lam / self.kappa

    @property
    def lambda2(self) -> float:
        return self.lam * self.kappa

    @classmethod
    def from_rates(cls, tau: float, lambda1: float, lambda2: float,
                   variant: AlfVariant = AlfVariant.ADE) -> "AlfParams":
        """Build from the left and right decay rates"""
        return cls(tau, float(np.sqrt(lambda1 * lambda2)), float(np.sqrt(lambda2 / lambda1)), variant)


def alf_weight(t, p: AlfParams):
    """
    Evaluate the weight exp(-lambda1 |t - tau|) left of tau and exp(-lambda2 |t - tau|) right of it

    Args:
        t: scalar or array of index values
        p: weight parameters

    Returns:
        Weights in (0, 1], same shape as t
    """
    t = np.asarray(t, dtype=float)
    rate = np.where(t <= p.tau, p.lambda1, p.lambda2)
    weight = np.exp(-rate * np.abs(t - p.tau))
    return weight if weight.ndim else float(weight)


def alf_weight_jacobian(t: np.ndarray, tau: float, lam: float,
                        log_kappa: float = 0.0) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Weight and its partial derivatives in (tau, lambda, log kappa)

    At t == tau the left branch is used, so d/dtau there is the left derivative.

    Returns:
        Tuple (omega, d_tau, d_lambda, d_log_kappa), each shaped like t
    """
    t = np.asarray(t, dtype=float)
    left = t <= tau
    distance = np.abs(t - tau)
    scale = np.where(left, np.exp(-log_kappa), np.exp(log_kappa))
    rate = lam * scale
    omega = np.exp(-rate * distance)
    d_tau = np.where(left, -rate, rate) * omega
    d_lambda = -scale * distance * omega
    d_log_kappa = np.where(left, rate, -rate) * distance * omega
    return omega, d_tau, d_lambda, d_log_kappa
