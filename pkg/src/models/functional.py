"""Functional-input models with the ALF relevance weight"""

from typing import Dict, List

import numpy as np

from src.dataset.loader import Dataset
from src.kernel.distances import trapezoid_weights
from src.kernel.weights import AlfParams, AlfVariant, alf_weight_jacobian
from src.models.base import BaseKernelModel
from src.priors.layout import ParameterSpec, Transform

PHI = ParameterSpec("phi", Transform.LOG, "phi")
TAU = ParameterSpec("tau", Transform.LOGIT, "tau")
LAMBDA = ParameterSpec("lambda", Transform.LOG, "lambda")
LOG_KAPPA = ParameterSpec("log_kappa", Transform.IDENTITY, "log_kappa")


class FunctionalInputModel(BaseKernelModel):
    """
    Weighted functional norm phi^-2 int omega(t) (X_i(t) - X_j(t))^2 dt

    With trapezoid weights q the distance coefficients are c_k = q_k omega(t_k) / phi^2.
    """

    family = "fiGP"
    variant: AlfVariant = AlfVariant.ADE

    def _prepare_features(self, train: Dataset) -> None:
        self._quadrature = trapezoid_weights(train.grid)

    def kernel_parameters(self) -> List[ParameterSpec]:
        if self.variant == AlfVariant.EDN:
            return [PHI, LAMBDA]
        if self.variant == AlfVariant.SDE:
            return [PHI, TAU, LAMBDA]
        return [PHI, TAU, LAMBDA, LOG_KAPPA]

    def _unpack(self, kernel_theta: np.ndarray):
        """(phi, tau, lambda, log_kappa) with fixed values filled in"""
        theta = np.asarray(kernel_theta, dtype=float)
        if self.variant == AlfVariant.EDN:
            return theta[0], 0.0, theta[1], 0.0
        if self.variant == AlfVariant.SDE:
            return theta[0], theta[1], theta[2], 0.0
        return theta[0], theta[1], theta[2], theta[3]

    def alf_params(self, kernel_theta: np.ndarray) -> AlfParams:
        _, tau, lam, log_kappa = self._unpack(kernel_theta)
        return AlfParams(float(tau), float(lam), float(np.exp(log_kappa)), self.variant)

    def features(self, data: Dataset) -> np.ndarray:
        self.check_grid(data)
        return np.asarray(data.inputs)

    def weights(self, kernel_theta: np.ndarray) -> np.ndarray:
        _, tau, lam, log_kappa = self._unpack(kernel_theta)
        return alf_weight_jacobian(self.grid.t, tau, lam, log_kappa)[0]

    def coefficients(self, kernel_theta: np.ndarray) -> np.ndarray:
        phi = self._unpack(kernel_theta)[0]
        return self._quadrature * self.weights(kernel_theta) / phi ** 2

    def coefficient_vjp(self, kernel_theta: np.ndarray, grad_c: np.ndarray) -> np.ndarray:
        phi, tau, lam, log_kappa = self._unpack(kernel_theta)
        omega, d_tau, d_lambda, d_log_kappa = alf_weight_jacobian(self.grid.t, tau, lam, log_kappa)
        scaled = grad_c * self._quadrature / phi ** 2
        g_phi = -2.0 / phi * np.sum(scaled * omega)
        g_tau = np.sum(scaled * d_tau)
        g_lambda = np.sum(scaled * d_lambda)
        g_log_kappa = np.sum(scaled * d_log_kappa)
        if self.variant == AlfVariant.EDN:
            return np.array([g_phi, g_lambda])
        if self.variant == AlfVariant.SDE:
            return np.array([g_phi, g_tau, g_lambda])
        return np.array([g_phi, g_tau, g_lambda, g_log_kappa])

    def monitored_weights(self, kernel_theta: np.ndarray) -> np.ndarray:
        return self.weights(kernel_theta)

    def monitored_labels(self) -> List[str]:
        return [f"omega_{k + 1}" for k in range(self.grid.K)]

    def derived_columns(self, kernel_theta: np.ndarray) -> Dict[str, np.ndarray]:
        """Decay rates lambda1, lambda2 and the asymmetry kappa per draw"""
        theta = np.atleast_2d(kernel_theta)
        unpacked = [self._unpack(row) for row in theta]
        lam = np.array([u[2] for u in unpacked])
        kappa = np.exp(np.array([u[3] for u in unpacked]))
        return {"lambda1": lam / kappa, "lambda2": lam * kappa, "kappa": kappa}


class EdnModel(FunctionalInputModel):
    name = "Edn"
    variant = AlfVariant.EDN


class SDEModel(FunctionalInputModel):
    name = "SDE"
    variant = AlfVariant.SDE


class ADEModel(FunctionalInputModel):
    name = "ADE"
    variant = AlfVariant.ADE
