"""
kernel-lab - Spectral algorithms and smoothness estimation for kernel classifiers

A laboratory for binary classification with kernel methods:
- Min kernel, ReLU NTK and truncated Mercer kernels
- Spectral-algorithm classifiers (gradient flow, ridge, cutoff, iterated Tikhonov)
- Truncation Estimation of the relative smoothness of the Bayes classifier
- Excess-risk rate studies and minimax hard instances
- CSV / JSON export and a CLI
"""

__version__ = "0.1.0"
__author__ = "kernel-lab contributors"
__license__ = "MIT"

from .core.models import FilterKind, KernelSpec, SmoothnessEstimate
from .core.spectral import fit
from .core.smoothness import estimate_from_data, truncation_estimate

__all__ = [
    "FilterKind",
    "KernelSpec",
    "SmoothnessEstimate",
    "fit",
    "estimate_from_data",
    "truncation_estimate",
]
