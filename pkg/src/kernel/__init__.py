"""Kernel building blocks: functional weights, distances, covariance"""

from .covariance import covariance
from .distances import DistanceCache, d_ard, d_omega, d_pc, trapezoid_weights, weighted_distance_matrix
from .weights import AlfParams, AlfVariant, alf_weight, alf_weight_jacobian

__all__ = [
    'AlfParams', 'AlfVariant', 'alf_weight', 'alf_weight_jacobian',
    'DistanceCache', 'd_ard', 'd_omega', 'd_pc', 'trapezoid_weights', 'weighted_distance_matrix',
    'covariance',
]
