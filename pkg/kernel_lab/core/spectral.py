"""
Spectral algorithms - filter functions and the estimator f = phi_nu(T_X) g_Z

The estimator is realized through the eigendecomposition of K/n:
    c = (1/n) V phi_nu(Sigma) V^T Y,   f(x) = sum_i c_i K(x, X_i)
The gradient-flow closed form k(x)^T K^{-1} (I - exp(-(t/n) K)) Y is kept as an
independent oracle.
"""

import logging
from typing import Any, Optional, Sequence

import numpy as np

from .eigensystems import empirical_eigendecomposition
from .exceptions import SingularMatrixError
from .kernels import check_domain, cross_kernel, gram_matrix
from .models import (
    EmpiricalSpectrum,
    FilterBoundsReport,
    FilterKind,
    FilterVariant,
    FittedClassifier,
    GramMatrix,
    KernelSpec,
)

logger = logging.getLogger(__name__)

# Below this nu*z the exact series is used instead of expm1/log1p
SMALL_ARGUMENT = 1e-8
RATIO_TOLERANCE = 1e-12


def sign(values: Any) -> Any:
    """Sign with the convention sign(0) = +1"""
    array = np.asarray(values, dtype=float)
    result = np.where(array >= 0.0, 1.0, -1.0)
    return float(result) if result.ndim == 0 else result


def filter_phi(kind: FilterKind, nu: float, z: Any) -> Any:
    """phi_nu(z), with analytic limits at z = 0"""
    z = np.asarray(z, dtype=float)
    x = nu * z
    with np.errstate(divide="ignore", invalid="ignore"):
        if kind.variant == FilterVariant.GRADIENT_FLOW:
            # (1 - e^{-nu z}) / z = nu * (1 - e^{-x}) / x
            ratio = np.where(x > SMALL_ARGUMENT, -np.expm1(-x) / np.where(x > 0, x, 1.0), 1.0 - x / 2.0)
            result = nu * ratio
        elif kind.variant == FilterVariant.RIDGE:
            result = nu / (x + 1.0)
        elif kind.variant == FilterVariant.SPECTRAL_CUTOFF:
            result = np.where(z * nu >= 1.0, 1.0 / np.where(z > 0, z, 1.0), 0.0)
        else:
            m = kind.m
            # (1 - (1 + x)^{-m}) / z = nu * (1 - (1 + x)^{-m}) / x
            big = -np.expm1(-m * np.log1p(x)) / np.where(x > 0, x, 1.0)
            small = m - m * (m + 1) * x / 2.0
            result = nu * np.where(x > SMALL_ARGUMENT, big, small)
    return float(result) if result.ndim == 0 else result


def filter_psi(kind: FilterKind, nu: float, z: Any) -> Any:
    """Residual psi_nu(z) = 1 - z phi_nu(z)"""
    z = np.asarray(z, dtype=float)
    if kind.variant == FilterVariant.GRADIENT_FLOW:
        result = np.exp(-nu * z)
    elif kind.variant == FilterVariant.RIDGE:
        result = 1.0 / (nu * z + 1.0)
    elif kind.variant == FilterVariant.ITERATED_TIKHONOV:
        result = (nu * z + 1.0) ** (-kind.m)
    else:
        result = 1.0 - z * np.asarray(filter_phi(kind, nu, z))
    return float(result) if np.ndim(result) == 0 else result


def verify_filter_bounds(
    kind: FilterKind,
    nu_grid: Sequence[float],
    alpha_grid: Sequence[float],
    z_grid: Sequence[float],
    tau_check: float,
) -> FilterBoundsReport:
    """Check sup_z z^a phi(z) <= E nu^(1-a) and sup_z |psi(z)| z^a <= F_tau nu^(-a) on grids

    The first inequality is checked for every alpha in alpha_grid; the second
    for every alpha in alpha_grid scaled into [0, tau_check] plus tau_check itself.
    """
    nus = np.asarray(nu_grid, dtype=float)
    alphas = np.asarray(alpha_grid, dtype=float)
    zs = np.asarray(z_grid, dtype=float)
    if nus.size == 0 or alphas.size == 0 or zs.size == 0:
        raise ValueError("grids must be nonempty")
    if tau_check > kind.tau:
        raise ValueError(f"tau_check {tau_check} exceeds the qualification {kind.tau} of {kind.describe()}")

    E = kind.E
    F_tau = kind.F(tau_check)
    psi_alphas = np.unique(np.append(alphas * tau_check, tau_check))

    phi_ratio_max = 0.0
    psi_ratio_max = 0.0
    psi_by_alpha = {}
    failures = []

    for nu in nus:
        phi = np.asarray(filter_phi(kind, nu, zs))
        psi = np.abs(np.asarray(filter_psi(kind, nu, zs)))
        for alpha in alphas:
            ratio = float(np.max(_power(zs, alpha) * phi)) / nu ** (1.0 - alpha)
            phi_ratio_max = max(phi_ratio_max, ratio)
            if ratio > E * (1.0 + RATIO_TOLERANCE):
                failures.append(f"phi bound: nu={nu:g} alpha={alpha:g} ratio={ratio:.6g} > E={E:g}")
        for alpha in psi_alphas:
            ratio = float(np.max(psi * _power(zs, alpha))) * nu ** alpha
            psi_ratio_max = max(psi_ratio_max, ratio)
            key = float(alpha)
            psi_by_alpha[key] = max(psi_by_alpha.get(key, 0.0), ratio)
            if ratio > F_tau * (1.0 + RATIO_TOLERANCE):
                failures.append(f"psi bound: nu={nu:g} alpha={alpha:g} ratio={ratio:.6g} > F={F_tau:g}")

    report = FilterBoundsReport(
        filter=kind.describe(),
        tau_check=tau_check,
        E=E,
        F_tau=F_tau,
        sharp_constant=kind.sharp_constant(tau_check),
        phi_ratio_max=phi_ratio_max,
        psi_ratio_max=psi_ratio_max,
        phi_margin=E - phi_ratio_max,
        psi_margin=F_tau - psi_ratio_max,
        psi_ratio_by_alpha=psi_by_alpha,
        failures=failures,
        passed=not failures,
    )
    if failures:
        logger.warning(f"Filter {kind.describe()} violates its bounds at {len(failures)} grid points")
    return report


def _power(z: np.ndarray, alpha: float) -> np.ndarray:
    # z^0 = 1 including z = 0
    if alpha == 0:
        return np.ones_like(z)
    return np.power(z, alpha)


def filtered_coefficients(spectrum: EmpiricalSpectrum, Y: Any, kind: FilterKind, nu: float) -> np.ndarray:
    """c = (1/n) V phi_nu(Sigma) V^T Y over the eigenpairs above the floor"""
    usable = spectrum.usable
    V = spectrum.vectors[:, usable]
    weights = np.asarray(filter_phi(kind, nu, spectrum.values[usable]))
    dropped = spectrum.n - int(np.count_nonzero(usable))
    if dropped:
        logger.debug(f"Dropped {dropped} eigenpairs below the floor {spectrum.floor:.3e}")
    return V @ (weights * (V.T @ np.asarray(Y, dtype=float))) / spectrum.n


def fit(kernel: KernelSpec, X: Any, Y: Any, kind: FilterKind, nu: float) -> FittedClassifier:
    """Fit the spectral-algorithm estimator f_nu = phi_nu(T_X) g_Z"""
    if nu <= 0:
        raise ValueError("nu must be positive")
    points = check_domain(kernel, X)
    labels = np.asarray(Y, dtype=float).reshape(-1)
    if labels.size != points.shape[0]:
        raise ValueError(f"{points.shape[0]} points but {labels.size} labels")

    spectrum = empirical_eigendecomposition(gram_matrix(kernel, points))
    coefficients = filtered_coefficients(spectrum, labels, kind, nu)
    logger.debug(f"Fitted {kind.describe()} on n={labels.size} with nu={nu:.4g}")
    return FittedClassifier(kernel=kernel, train_X=points, coefficients=coefficients, nu=nu, filter=kind)


def predict_batch(model: FittedClassifier, X: Any) -> np.ndarray:
    """f(x) for every row of X"""
    return cross_kernel(model.kernel, X, model.train_X) @ model.coefficients


def predict(model: FittedClassifier, x: Any) -> float:
    """f(x) = sum_i c_i K(x, X_i) at one point"""
    return float(predict_batch(model, x)[0])


def classify(model: FittedClassifier, x: Any) -> float:
    """sign(f(x)) with sign(0) = +1"""
    return sign(predict(model, x))


def gradient_flow_closed_form(
    G: GramMatrix,
    Y: Any,
    t: float,
    k_row: Any,
    spectrum: Optional[EmpiricalSpectrum] = None,
) -> float:
    """k_row^T K^{-1} (I - exp(-(t/n) K)) Y through the eigendecomposition of K"""
    n = G.n
    row = np.asarray(k_row, dtype=float).reshape(-1)
    if row.size != n:
        raise ValueError(f"k_row has length {row.size}, expected {n}")
    spectrum = spectrum or empirical_eigendecomposition(G)
    usable = spectrum.usable
    if not np.any(usable) or spectrum.values[0] <= 0:
        raise SingularMatrixError(n, float(spectrum.values[0]))

    # eigenvalues of K itself
    mu = spectrum.values[usable] * n
    V = spectrum.vectors[:, usable]
    gain = -np.expm1(-(t / n) * mu) / mu
    return float((row @ V) @ (gain * (V.T @ np.asarray(Y, dtype=float))))
