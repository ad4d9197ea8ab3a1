"""
Eigensystems - analytic Mercer spectra, empirical eigendecompositions and decay diagnostics
"""

import logging
from typing import Callable, NamedTuple, Sequence, Tuple

import numpy as np
import scipy.linalg
from scipy import integrate

from .exceptions import DegenerateFitError, NumericalError
from .models import EigenSystem, EmpiricalSpectrum, GramMatrix

logger = logging.getLogger(__name__)

MIN_KERNEL_BETA = 2.0


class LogLogFit(NamedTuple):
    slope: float
    intercept: float
    residual: float
    count: int


def fit_loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> LogLogFit:
    """Ordinary least squares of log y on log x over the positive pairs"""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    keep = (x > 0) & (y > 0) & np.isfinite(x) & np.isfinite(y)
    if np.count_nonzero(keep) < 2:
        raise DegenerateFitError(f"log-log fit needs 2 positive points, got {np.count_nonzero(keep)}")
    log_x = np.log(x[keep])
    log_y = np.log(y[keep])
    centered = log_x - log_x.mean()
    spread = float(centered @ centered)
    if spread == 0.0:
        raise DegenerateFitError("log-log fit needs at least two distinct abscissae")
    slope = float(centered @ (log_y - log_y.mean()) / spread)
    intercept = float(log_y.mean() - slope * log_x.mean())
    residual = float(np.sqrt(np.mean((log_y - intercept - slope * log_x) ** 2)))
    return LogLogFit(slope, intercept, residual, int(log_x.size))


def min_kernel_eigenfunction(j, x):
    return np.sqrt(2.0) * np.sin((2 * j - 1) * np.pi * x / 2.0)


def min_kernel_eigensystem(j_max: int) -> EigenSystem:
    """Mercer system of min(x, x') under the uniform measure on [0, 1]

    lambda_j = ((2j - 1) pi / 2)^-2,  e_j(x) = sqrt(2) sin((2j - 1) pi x / 2)
    """
    if j_max < 1:
        raise ValueError("j_max must be at least 1")
    j = np.arange(1, j_max + 1, dtype=float)
    lambdas = ((2.0 * j - 1.0) * np.pi / 2.0) ** -2
    return EigenSystem(
        lambdas=lambdas,
        eigenfunction=min_kernel_eigenfunction,
        beta=MIN_KERNEL_BETA,
        measure="uniform[0,1]",
        eigenfunction_bound=float(np.sqrt(2.0)),
    )


def empirical_eigendecomposition(G: GramMatrix) -> EmpiricalSpectrum:
    """Eigenpairs of G/n in descending order

    Ties keep the solver's original (ascending) index order.
    """
    scaled = G.entries / G.n
    try:
        values, vectors = scipy.linalg.eigh(scaled)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NumericalError(f"Eigensolver failed on a {G.n}x{G.n} matrix: {e}")

    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]

    lowest = float(values[-1])
    if lowest < -1e-8 * max(1.0, float(values[0])):
        logger.warning(f"Gram matrix has eigenvalue {lowest:.3e}; clipping negative eigenvalues to 0")
    values = np.maximum(values, 0.0)
    return EmpiricalSpectrum(values=values, vectors=vectors)


def effective_dimension(lambdas: Sequence[float], nu: float) -> float:
    """N(nu) = sum_i lambda_i / (lambda_i + 1/nu)"""
    if nu <= 0:
        raise ValueError("nu must be positive")
    lam = np.asarray(lambdas, dtype=float)
    if lam.size == 0:
        raise ValueError("lambdas must be nonempty")
    return float(np.sum(nu * lam / (nu * lam + 1.0)))


def edr_fit(lambdas: Sequence[float], j_range: Tuple[int, int]) -> float:
    """Estimated eigenvalue decay rate over the 1-based inclusive index range"""
    start, stop = j_range
    if stop - start + 1 < 3:
        raise ValueError("edr_fit needs at least 3 indices")
    lam = np.asarray(lambdas, dtype=float)[start - 1:stop]
    if lam.size < stop - start + 1:
        raise ValueError(f"only {lam.size} eigenvalues available in range {j_range}")
    if np.any(lam <= 0):
        raise ValueError("edr_fit needs strictly positive eigenvalues")
    if np.all(lam == lam[0]):
        raise DegenerateFitError("all eigenvalues in range are equal")
    fit = fit_loglog_slope(np.arange(start, stop + 1), lam)
    return -fit.slope


def mercer_coefficients(system: EigenSystem, f: Callable[[float], float], j_max: int) -> np.ndarray:
    """f_j = integral over [0, 1] of f(x) e_j(x) dx for j = 1..j_max"""
    coefficients = np.empty(j_max)
    for j in range(1, j_max + 1):
        value, _ = integrate.quad(lambda x: f(x) * float(system.evaluate(j, x)), 0.0, 1.0, limit=200)
        coefficients[j - 1] = value
    return coefficients


def ntk_sphere_beta(d: int) -> float:
    """Eigenvalue decay rate of the NTK on the sphere S^{d-1}"""
    if d < 2:
        raise ValueError("the sphere needs ambient dimension d >= 2")
    return d / (d - 1.0)


def interpolation_smoothness(r: float, beta: float) -> float:
    """s = (2r - 1) / beta for coefficients decaying like j^-r"""
    return (2.0 * r - 1.0) / beta
