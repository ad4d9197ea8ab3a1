"""
Risk evaluation - 0-1, excess and L2 risks, the nu selection rule and rate studies
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from .eigensystems import LogLogFit, fit_loglog_slope
from .exceptions import ExperimentError, KernelLabError
from .models import ConditionalModel, Domain, FilterKind, KernelSpec, RateRow, RateStudyResult
from .spectral import fit, sign

logger = logging.getLogger(__name__)

Classifier = Callable[[np.ndarray], np.ndarray]

DEFAULT_QUADRATURE_POINTS = 10001
QUADRATURE_SEED = 0

__all__ = [
    "Quadrature",
    "MonteCarlo",
    "LogLogFit",
    "fit_loglog_slope",
    "quadrature_nodes",
    "excess_risk",
    "zero_one_risk",
    "l2_risk",
    "bayes_risk",
    "nu_rule",
    "theoretical_slope",
    "rate_study",
]


class Quadrature(BaseModel):
    """Deterministic integration against mu"""
    points: int = Field(DEFAULT_QUADRATURE_POINTS, ge=10)


class MonteCarlo(BaseModel):
    """Integration against mu by sampling"""
    n_test: int = Field(..., ge=1)
    seed: int = 0


Method = Union[Quadrature, MonteCarlo]


def quadrature_nodes(model: ConditionalModel, points: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights (summing to 1) for integrals against mu

    Interval models use equispaced trapezoid nodes times the density; circles use
    equispaced angles; other domains fall back to a fixed-seed uniform design.
    """
    if model.domain == Domain.UNIT_INTERVAL and model.dim == 1:
        nodes = np.linspace(0.0, 1.0, points).reshape(-1, 1)
        weights = np.full(points, 1.0 / (points - 1))
        weights[[0, -1]] /= 2.0
        weights = weights * np.asarray(model.density(nodes), dtype=float)
    elif model.domain == Domain.SPHERE and model.dim == 2:
        angles = 2.0 * np.pi * np.arange(points) / points
        nodes = np.stack([np.cos(angles), np.sin(angles)], axis=1)
        weights = np.ones(points)
    else:
        rng = np.random.default_rng(QUADRATURE_SEED)
        nodes = model.sample_marginal(rng, points)
        weights = np.ones(points)
    total = float(np.sum(weights))
    if total <= 0:
        raise ValueError(f"model '{model.name}' has no mass on the quadrature nodes")
    return nodes, weights / total


def _integration_design(model: ConditionalModel, method: Method) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(method, Quadrature):
        return quadrature_nodes(model, method.points)
    X = model.sample_marginal(np.random.default_rng(method.seed), method.n_test)
    return X, np.full(X.shape[0], 1.0 / X.shape[0])


def excess_risk(model: ConditionalModel, classifier: Classifier, method: Optional[Method] = None) -> float:
    """E_X[|f*(X)| 1{sign f(X) != sign f*(X)}] with sign(0) = +1 on both sides"""
    method = method or Quadrature()
    X, weights = _integration_design(model, method)
    f_star = model.bayes_function(X)
    f_hat = np.asarray(classifier(X), dtype=float).reshape(-1)
    disagree = sign(f_hat) != sign(f_star)
    return float(np.sum(weights * np.abs(f_star) * disagree))


def zero_one_risk(classifier: Classifier, test_set: Tuple[Any, Any]) -> float:
    """Fraction of test points with sign(f(X)) != Y"""
    X, Y = test_set
    labels = np.asarray(Y, dtype=float).reshape(-1)
    if labels.size == 0:
        raise ValueError("test set is empty")
    predictions = sign(np.asarray(classifier(X), dtype=float).reshape(-1))
    return float(np.mean(predictions != labels))


def l2_risk(
    classifier: Classifier,
    f_star: Callable[[np.ndarray], np.ndarray],
    quadrature_points: int = DEFAULT_QUADRATURE_POINTS,
    model: Optional[ConditionalModel] = None,
) -> float:
    """Integral of (f - f*)^2 against mu (uniform on [0, 1] unless ``model`` is given)"""
    if quadrature_points < 10:
        raise ValueError("quadrature_points must be at least 10")
    if model is None:
        nodes = np.linspace(0.0, 1.0, quadrature_points).reshape(-1, 1)
        weights = np.full(quadrature_points, 1.0 / (quadrature_points - 1))
        weights[[0, -1]] /= 2.0
    else:
        nodes, weights = quadrature_nodes(model, quadrature_points)
    diff = np.asarray(classifier(nodes), dtype=float).reshape(-1) - np.asarray(f_star(nodes), dtype=float).reshape(-1)
    return float(np.sum(weights * diff ** 2))


def bayes_risk(model: ConditionalModel, method: Optional[Method] = None) -> float:
    """L* = E[min(eta, 1 - eta)]"""
    X, weights = _integration_design(model, method or Quadrature())
    eta = model.eta(X)
    return float(np.sum(weights * np.minimum(eta, 1.0 - eta)))


def nu_rule(n: int, s: float, beta: float, constant: float = 1.0) -> float:
    """nu = constant * n^(beta / (s beta + 1))"""
    if n < 1:
        raise ValueError("n must be at least 1")
    return constant * n ** (beta / (s * beta + 1.0))


def theoretical_slope(s: float, beta: float) -> float:
    """Exponent of n in the excess-risk rate n^(-s beta / (2 (s beta + 1)))"""
    return -s * beta / (2.0 * (s * beta + 1.0))


def _replicate_risk(
    model: ConditionalModel,
    kernel: KernelSpec,
    kind: FilterKind,
    n: int,
    nu: float,
    seed: int,
    method: Method,
) -> float:
    from ..data.synth import sample_classification

    X, Y = sample_classification(model, n, seed)
    classifier = fit(kernel, X, Y, kind, nu)
    return excess_risk(model, classifier, method)


def rate_study(
    model: ConditionalModel,
    kernel: KernelSpec,
    filter: FilterKind,
    n_grid: Sequence[int],
    s: float,
    beta: float,
    reps: int,
    base_seed: int,
    nu_constant: float = 1.0,
    quadrature_points: int = DEFAULT_QUADRATURE_POINTS,
    n_test: int = 20000,
    threads: Optional[int] = 1,
    progress: Optional[Callable[[int, int], None]] = None,
) -> RateStudyResult:
    """Mean excess risk over replicates at every n, and its log-log slope

    Replicate r at every n uses seed base_seed + r. Interval models are scored by
    quadrature, all others by Monte Carlo with n_test points.
    """
    sizes = sorted(set(int(n) for n in n_grid))
    if len(sizes) < 3 or sizes[0] < 32:
        raise ValueError("rate_study needs at least 3 distinct sizes, each >= 32")
    if reps < 3:
        raise ValueError("rate_study needs reps >= 3")

    if model.domain == Domain.UNIT_INTERVAL and model.dim == 1:
        method_for = lambda seed: Quadrature(points=quadrature_points)
    else:
        method_for = lambda seed: MonteCarlo(n_test=n_test, seed=seed + 7919)

    tasks = [(n, rep) for n in sizes for rep in range(reps)]

    def run(task):
        n, rep = task
        nu = nu_rule(n, s, beta, nu_constant)
        seed = base_seed + rep
        try:
            risk = _replicate_risk(model, kernel, filter, n, nu, seed, method_for(seed))
        except KernelLabError as e:
            raise ExperimentError(f"rate study replicate failed: {e}", {"n": n, "replicate": rep}) from e
        if progress is not None:
            progress(n, rep)
        return {"n": n, "rep": rep, "risk": risk, "nu": nu}

    with ThreadPoolExecutor(max_workers=threads) as pool:
        records = list(pool.map(run, tasks))

    frame = pd.DataFrame.from_records(records)
    grouped = frame.groupby("n", sort=True).agg(
        mean_excess_risk=("risk", "mean"),
        std=("risk", lambda r: float(np.std(r, ddof=1))),
        nu_used=("nu", "first"),
    )
    rows = [
        RateRow(n=int(n), mean_excess_risk=float(row["mean_excess_risk"]), std=float(row["std"]), nu_used=float(row["nu_used"]))
        for n, row in grouped.iterrows()
    ]
    slope_fit = fit_loglog_slope([row.n for row in rows], [row.mean_excess_risk for row in rows])
    result = RateStudyResult(
        rows=rows,
        fitted_slope=slope_fit.slope,
        fitted_intercept=slope_fit.intercept,
        theoretical_slope=theoretical_slope(s, beta),
        s=s,
        beta=beta,
    )
    logger.info(f"Rate study: fitted slope {result.fitted_slope:.4f} vs theoretical {result.theoretical_slope:.4f}")
    return result

