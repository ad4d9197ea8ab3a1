"""
Data module - Synthetic conditional models and image dataset readers
"""

from .synth import named_model, sample_classification, sample_regression
from .datasets import load_cifar10, load_idx, two_class_subset

__all__ = [
    "named_model",
    "sample_classification",
    "sample_regression",
    "load_cifar10",
    "load_idx",
    "two_class_subset",
]
