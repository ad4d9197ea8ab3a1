"""
Core module - Kernels, spectra, estimators and risk evaluation

This module contains the numerical heart of the laboratory:
- Kernel evaluation and Gram matrices
- Analytic and empirical eigensystems
- Spectral filters and the classifier they define
- Smoothness estimation and risk evaluation
"""

from .models import EigenSystem, FilterKind, FittedClassifier, GramMatrix, KernelSpec, SmoothnessEstimate
from .exceptions import KernelLabError, DomainError, NumericalError, ConfigError

__all__ = [
    "EigenSystem",
    "FilterKind",
    "FittedClassifier",
    "GramMatrix",
    "KernelSpec",
    "SmoothnessEstimate",
    "KernelLabError",
    "DomainError",
    "NumericalError",
    "ConfigError",
]
