"""Permutation-based dynamic relevance screening"""

from .pfdi import (
    IndexPartition, PfdiResult, average_results, corrupt, derangement, normalize_profile, overlay_frame, pfdi,
)

__all__ = [
    'IndexPartition', 'PfdiResult', 'corrupt', 'derangement', 'normalize_profile',
    'pfdi', 'average_results', 'overlay_frame',
]
