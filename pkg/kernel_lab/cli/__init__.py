"""
CLI module - Command Line Interface for kernel-lab
"""

from .main import cli

__all__ = ["cli"]
