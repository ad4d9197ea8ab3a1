"""
Exception classes for kernel-lab

Every error raised by the library derives from KernelLabError. Each class
carries the process exit code the CLI uses when the error escapes a command.
"""

from typing import Any, Dict, Optional


class KernelLabError(Exception):
    """Base exception for kernel-lab operations"""
    exit_code = 1


class ConfigError(KernelLabError):
    """Exception raised for invalid flags or configuration files"""
    exit_code = 2


class DomainError(KernelLabError):
    """Exception raised when a point lies outside a kernel's input domain"""
    exit_code = 4

    def __init__(self, reason: str, point: Any = None):
        self.point = point
        self.reason = reason
        super().__init__(reason)

    def __str__(self):
        if self.point is not None:
            return f"{self.reason} (point: {self.point})"
        return self.reason


class NumericalError(KernelLabError):
    """Exception raised when a linear-algebra routine fails"""
    exit_code = 5


class SingularMatrixError(NumericalError):
    """Exception raised when every eigenvalue falls below the floor"""

    def __init__(self, n: int, top_eigenvalue: float):
        self.n = n
        self.top_eigenvalue = top_eigenvalue
        super().__init__(f"Gram matrix of size {n} is numerically singular (top eigenvalue {top_eigenvalue:.3e})")


class DegenerateFitError(KernelLabError):
    """Exception raised when a log-log least-squares fit has no usable slope"""
    exit_code = 6


class ModelError(KernelLabError):
    """Exception raised when a conditional model violates |f*| <= 1"""
    exit_code = 7


class SearchExhaustedError(KernelLabError):
    """Exception raised when the randomized codebook search hits its draw cap"""
    exit_code = 8

    def __init__(self, m: int, draws: int, found: int, required: int):
        self.m = m
        self.draws = draws
        self.found = found
        self.required = required
        super().__init__(
            f"Codebook search for m={m} stopped after {draws} draws with {found}/{required} codewords"
        )


class FormatError(KernelLabError):
    """Exception raised when a dataset file does not match its binary format"""
    exit_code = 9

    def __init__(self, path: Any, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}")


class LabelError(FormatError):
    """Exception raised when a CIFAR-10 record carries a label byte above 9"""

    def __init__(self, path: Any, label: int, record: int):
        self.label = label
        self.record = record
        super().__init__(path, f"record {record} has label {label} outside 0-9")


class InsufficientDataError(KernelLabError):
    """Exception raised when a subset asks for more points than exist"""
    exit_code = 10

    def __init__(self, required: int, available: int):
        self.required = required
        self.available = available
        super().__init__(f"Requested {required} points but only {available} are available")


class ZeroImageError(KernelLabError):
    """Exception raised when an all-zero image cannot be projected to the sphere"""
    exit_code = 10

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"Image {index} has all-zero pixels")


class ExperimentError(KernelLabError):
    """Exception raised when one replicate of an experiment fails"""
    exit_code = 11

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None):
        self.context = context or {}
        super().__init__(message)

    def __str__(self):
        if self.context:
            details = ", ".join(f"{k}={v}" for k, v in self.context.items())
            return f"{super().__str__()} [{details}]"
        return super().__str__()


# Short names used throughout the documentation
SingularMatrix = SingularMatrixError
DegenerateFit = DegenerateFitError
SearchExhausted = SearchExhaustedError
InsufficientData = InsufficientDataError
ZeroImage = ZeroImageError


EXIT_CODES = {
    "ConfigError": ConfigError.exit_code,
    "OSError": 3,
    "DomainError": DomainError.exit_code,
    "NumericalError": NumericalError.exit_code,
    "DegenerateFitError": DegenerateFitError.exit_code,
    "ModelError": ModelError.exit_code,
    "SearchExhaustedError": SearchExhaustedError.exit_code,
    "FormatError": FormatError.exit_code,
    "InsufficientDataError": InsufficientDataError.exit_code,
    "ExperimentError": ExperimentError.exit_code,
}
