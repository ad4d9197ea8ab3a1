"""
Smoothness estimation - projection coefficients and Truncation Estimation

p_j = |Y^T v_j| decays like j^-r when f* has Mercer coefficients of order
j^-r; the relative smoothness follows as s = (2r - 1) / beta.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, List, Optional, Sequence, Tuple

import numpy as np

from .eigensystems import empirical_eigendecomposition, fit_loglog_slope, interpolation_smoothness
from .exceptions import DegenerateFitError, ExperimentError, KernelLabError
from .kernels import gram_matrix
from .models import EmpiricalSpectrum, KernelSpec, Sample, SmoothnessEstimate

logger = logging.getLogger(__name__)

DEFAULT_TRUNCATION = 100
COEFFICIENT_FLOOR = 1e-14

DataSource = Callable[[int, int], Sample]


def projection_coefficients(spectrum: EmpiricalSpectrum, Y: Any) -> np.ndarray:
    """p_j = |Y^T v_j| in descending-eigenvalue order"""
    labels = np.asarray(Y, dtype=float).reshape(-1)
    if labels.size != spectrum.n:
        raise ValueError(f"Y has length {labels.size}, spectrum has {spectrum.n}")
    return np.abs(spectrum.vectors.T @ labels)


def truncation_estimate(p: Sequence[float], truncation: int, beta: float) -> SmoothnessEstimate:
    """Log-log least squares of p_j on j over j = 1..truncation"""
    if truncation < 3:
        raise ValueError("truncation must be at least 3")
    if beta <= 1:
        raise ValueError("beta must exceed 1")
    coefficients = np.asarray(p, dtype=float)
    if coefficients.size < truncation:
        raise ValueError(f"only {coefficients.size} coefficients for truncation {truncation}")

    head = coefficients[:truncation]
    js = np.arange(1, truncation + 1)
    usable = head > COEFFICIENT_FLOOR
    if np.count_nonzero(usable) < 3:
        raise DegenerateFitError(f"only {np.count_nonzero(usable)} coefficients above {COEFFICIENT_FLOOR:g}")
    excluded = truncation - int(np.count_nonzero(usable))
    if excluded:
        logger.debug(f"Excluded {excluded} vanishing coefficients from the log fit")

    fit = fit_loglog_slope(js[usable], head[usable])
    r_hat = -fit.slope
    return SmoothnessEstimate(
        r_hat=r_hat,
        s_hat=interpolation_smoothness(r_hat, beta),
        slope=fit.slope,
        intercept=fit.intercept,
        truncation=truncation,
        n_used=fit.count,
        fit_residual=fit.residual,
        beta=beta,
    )


def naive_estimate(p: Sequence[float], beta: float) -> SmoothnessEstimate:
    """Fit over every coefficient, without truncation"""
    return truncation_estimate(p, len(p), beta)


def estimate_from_data(
    kernel: KernelSpec,
    X: Any,
    Y: Any,
    truncation: Optional[int],
    beta: float,
) -> SmoothnessEstimate:
    """Gram matrix -> eigendecomposition -> p_j -> truncated (or naive) fit"""
    spectrum = empirical_eigendecomposition(gram_matrix(kernel, X))
    p = projection_coefficients(spectrum, Y)
    if truncation is None:
        estimate = naive_estimate(p, beta)
    else:
        estimate = truncation_estimate(p, truncation, beta)
    return estimate.model_copy(update={"sample_size": spectrum.n})


def repeated_estimate(
    data_source: DataSource,
    kernel: KernelSpec,
    n: int,
    truncation: Optional[int],
    beta: float,
    reps: int,
    base_seed: int,
    threads: Optional[int] = 1,
    progress: Optional[Callable[[int], None]] = None,
) -> Tuple[float, float, List[float]]:
    """Mean and sample standard deviation of s_hat over replicates seeded base_seed + r"""
    if reps < 2:
        raise ValueError("repeated_estimate needs reps >= 2")

    def run(rep: int) -> float:
        try:
            X, Y = data_source(n, base_seed + rep)
            estimate = estimate_from_data(kernel, X, Y, truncation, beta)
        except KernelLabError as e:
            raise ExperimentError(f"smoothness replicate failed: {e}", {"n": n, "replicate": rep}) from e
        if progress is not None:
            progress(rep)
        return estimate.s_hat

    with ThreadPoolExecutor(max_workers=threads) as pool:
        estimates = list(pool.map(run, range(reps)))

    values = np.asarray(estimates)
    mean = float(np.mean(values))
    std = float(np.std(values, ddof=1))
    logger.info(f"Smoothness over {reps} replicates at n={n}: mean {mean:.4f}, std {std:.4f}")
    return mean, std, estimates


def sample_size_sweep(
    data_source: DataSource,
    kernel: KernelSpec,
    n_grid: Sequence[int],
    truncation: Optional[int],
    beta: float,
    reps: int,
    base_seed: int,
    threads: Optional[int] = 1,
    progress: Optional[Callable[[int], None]] = None,
) -> List[Tuple[int, float, float]]:
    """repeated_estimate at every n in the grid, smallest n first"""
    rows = []
    for n in sorted(set(int(n) for n in n_grid)):
        mean, std, _ = repeated_estimate(data_source, kernel, n, truncation, beta, reps, base_seed, threads, progress)
        rows.append((n, mean, std))
    return rows
