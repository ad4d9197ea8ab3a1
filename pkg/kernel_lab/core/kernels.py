"""
Kernel evaluation - min kernel, ReLU neural tangent kernel and truncated Mercer series

All functions are pure and vectorized over rows of point arrays. Points for
the min kernel live in [0, 1]; NTK inputs must lie on the unit sphere.
"""

import logging
from typing import Any

import numpy as np

from .exceptions import DomainError
from .models import Domain, GramMatrix, KernelKind, KernelSpec, as_points

logger = logging.getLogger(__name__)

SPHERE_TOLERANCE = 1e-9
CLAMP_TOLERANCE = 1e-12

# Cross-kernel blocks are built this many rows at a time
BLOCK_ROWS = 2048


def ntk_kappa(order: int, u: Any) -> Any:
    """Arc-cosine kernels of the ReLU NTK recursion

    kappa_0(u) = (pi - arccos u) / pi
    kappa_1(u) = (u (pi - arccos u) + sqrt(1 - u^2)) / pi
    """
    values = np.asarray(u, dtype=float)
    if np.any(np.abs(values) > 1.0 + CLAMP_TOLERANCE):
        raise DomainError("arc-cosine kernels need |u| <= 1", point=float(np.max(np.abs(values))))
    values = np.clip(values, -1.0, 1.0)
    angle = np.pi - np.arccos(values)
    if order == 0:
        result = angle / np.pi
    elif order == 1:
        result = (values * angle + np.sqrt(np.maximum(1.0 - values * values, 0.0))) / np.pi
    else:
        raise ValueError(f"order must be 0 or 1, got {order}")
    return float(result) if np.ndim(result) == 0 else result


def ntk_from_inner(u: Any, depth: int) -> np.ndarray:
    """NTK of a depth-L ReLU network as a function of u = <x, x'>

    K = sum_{r=0}^{L} kappa_1^(r)(u) prod_{s=r}^{L-1} kappa_0(kappa_1^(s)(u))
    """
    u = np.clip(np.asarray(u, dtype=float), -1.0, 1.0)
    # compositions kappa_1^(0..L)
    compositions = [u]
    for _ in range(depth):
        compositions.append(ntk_kappa(1, compositions[-1]))
    gates = [ntk_kappa(0, compositions[s]) for s in range(depth)]

    total = np.zeros_like(u)
    for r in range(depth + 1):
        term = np.array(compositions[r], dtype=float, copy=True)
        for s in range(r, depth):
            term = term * gates[s]
        total = total + term
    return total


def check_domain(spec: KernelSpec, X: Any) -> np.ndarray:
    """Return X as an (n, d) array, raising DomainError for off-domain rows"""
    points = _points_for(spec, X)
    domain = spec.domain
    if domain == Domain.UNIT_INTERVAL:
        if points.shape[1] != 1:
            raise DomainError(f"{spec.describe()} kernel takes scalar inputs, got dimension {points.shape[1]}")
        bad = (points[:, 0] < 0.0) | (points[:, 0] > 1.0) | ~np.isfinite(points[:, 0])
        if np.any(bad):
            raise DomainError(f"{spec.describe()} kernel inputs must lie in [0, 1]", point=float(points[bad][0, 0]))
    elif domain == Domain.SPHERE:
        norms = np.linalg.norm(points, axis=1)
        bad = np.abs(norms - 1.0) > SPHERE_TOLERANCE
        if np.any(bad):
            raise DomainError(f"{spec.describe()} kernel inputs must lie on the unit sphere", point=float(norms[bad][0]))
    return points


def _points_for(spec: KernelSpec, X: Any) -> np.ndarray:
    array = np.asarray(X, dtype=float)
    if spec.domain == Domain.SPHERE and array.ndim == 1:
        return array.reshape(1, -1)
    return as_points(array, 1 if spec.domain == Domain.UNIT_INTERVAL else None)


def _cross_block(spec: KernelSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    if spec.kind == KernelKind.MIN:
        return np.minimum(A[:, 0][:, None], B[:, 0][None, :])
    if spec.kind == KernelKind.NTK:
        return ntk_from_inner(A @ B.T, spec.depth)
    system = spec.eigensystem
    js = np.arange(1, spec.truncation_order + 1)
    phi_a = system.evaluate(js[None, :], A[:, 0][:, None])
    phi_b = system.evaluate(js[None, :], B[:, 0][:, None])
    return (phi_a * system.lambdas[: spec.truncation_order]) @ phi_b.T


def cross_kernel(spec: KernelSpec, A: Any, B: Any) -> np.ndarray:
    """Matrix of K(a_i, b_j) for two point sets"""
    A = check_domain(spec, A)
    B = check_domain(spec, B)
    if A.shape[0] <= BLOCK_ROWS:
        return _cross_block(spec, A, B)
    blocks = [_cross_block(spec, A[i:i + BLOCK_ROWS], B) for i in range(0, A.shape[0], BLOCK_ROWS)]
    return np.vstack(blocks)


def eval_kernel(spec: KernelSpec, x: Any, x_prime: Any) -> float:
    """K(x, x') for two single points"""
    return float(cross_kernel(spec, x, x_prime)[0, 0])


def gram_matrix(spec: KernelSpec, X: Any) -> GramMatrix:
    """Gram matrix K(X, X), symmetrized to absorb rounding"""
    points = check_domain(spec, X)
    if points.shape[0] < 1:
        raise ValueError("gram_matrix needs at least one point")
    if spec.kind == KernelKind.NTK:
        inner = points @ points.T
        # <x, x> = 1 on the sphere; arccos amplifies rounding just below 1
        np.fill_diagonal(inner, 1.0)
        entries = ntk_from_inner(inner, spec.depth)
    else:
        entries = cross_kernel(spec, points, points)
    entries = (entries + entries.T) / 2.0
    logger.debug(f"Built {spec.describe()} Gram matrix of size {points.shape[0]}")
    return GramMatrix(n=points.shape[0], entries=entries)


def uniform_sphere(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    """n points uniform on the unit sphere in R^d"""
    points = rng.standard_normal((n, d))
    return points / np.linalg.norm(points, axis=1, keepdims=True)
