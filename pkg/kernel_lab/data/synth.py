"""
Synthetic data - conditional models, samplers and the hard-instance family

Hard instances place a smooth bump of height C_psi q^(-sr) on every cell of
the regular grid G_q and flip its sign according to a codeword omega.
"""

import functools
import logging
import math
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from ..core.exceptions import ModelError, SearchExhaustedError
from ..core.kernels import uniform_sphere
from ..core.models import ConditionalModel, Design, Domain, HardInstance, Sample, as_points

logger = logging.getLogger(__name__)

ETA_TOLERANCE = 1e-12
QUAD_TOLERANCE = 1e-10
MC_KL_POINTS = 20000


# -- sampling -----------------------------------------------------------------

def _checked_bayes(model: ConditionalModel, X: np.ndarray) -> np.ndarray:
    f = model.bayes_function(X)
    if np.any(np.abs(f) > 1.0 + ETA_TOLERANCE) or not np.all(np.isfinite(f)):
        worst = float(np.max(np.abs(f)))
        raise ModelError(f"model '{model.name}' has |f*(x)| = {worst:.6g} > 1 at a sampled point")
    return np.clip(f, -1.0, 1.0)


def _inputs(model: ConditionalModel, rng: np.random.Generator, n: int, design: Design) -> np.ndarray:
    if Design(design) == Design.GRID:
        return model.grid_points(n)
    return model.sample_marginal(rng, n)


def sample_classification(model: ConditionalModel, n: int, seed: int, design: Design = Design.RANDOM) -> Sample:
    """Draw X ~ mu (or take the quantile grid) and Y = +1 with probability (1 + f*(X)) / 2"""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    X = _inputs(model, rng, n, design)
    eta = (1.0 + _checked_bayes(model, X)) / 2.0
    Y = np.where(rng.uniform(size=n) < eta, 1.0, -1.0)
    return X, Y


def sample_regression(
    model: ConditionalModel, n: int, sigma: float, seed: int, design: Design = Design.RANDOM
) -> Sample:
    """Draw X ~ mu (or take the quantile grid) and Y = f*(X) + sigma * N(0, 1)"""
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    rng = np.random.default_rng(seed)
    X = _inputs(model, rng, n, design)
    Y = model.bayes_function(X)
    if sigma > 0:
        Y = Y + sigma * rng.standard_normal(n)
    return X, Y


# -- named models --------------------------------------------------------------

def _uniform_interval(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.uniform(0.0, 1.0, size=(n, 1))


def _unit_density(X: np.ndarray) -> np.ndarray:
    return np.ones(as_points(X).shape[0])


def _uniform_quantile(levels: np.ndarray) -> np.ndarray:
    return np.asarray(levels, dtype=float).reshape(-1, 1)


def cosine_model() -> ConditionalModel:
    """f*(x) = cos(2 pi x) under the uniform measure on [0, 1]"""
    return ConditionalModel(
        name="cos2pix",
        f_star=lambda X: np.cos(2.0 * np.pi * X[:, 0]),
        sampler=_uniform_interval,
        density=_unit_density,
        domain=Domain.UNIT_INTERVAL,
        quantile=_uniform_quantile,
    )


def constant_model(value: float) -> ConditionalModel:
    """f* identically equal to ``value`` under the uniform measure on [0, 1]"""
    return ConditionalModel(
        name="zero" if value == 0 else ("one" if value == 1 else f"constant-{value:g}"),
        f_star=lambda X: np.full(X.shape[0], float(value)),
        sampler=_uniform_interval,
        density=_unit_density,
        domain=Domain.UNIT_INTERVAL,
        quantile=_uniform_quantile,
    )


def sphere_linear_model(d: int) -> ConditionalModel:
    """f*(x) = x_1 under the uniform measure on the sphere S^{d-1}"""
    if d < 2:
        raise ValueError("sphere models need d >= 2")
    return ConditionalModel(
        name=f"sphere-linear-{d}",
        f_star=lambda X: X[:, 0],
        sampler=lambda rng, n: uniform_sphere(rng, n, d),
        density=lambda X: np.ones(X.shape[0]),
        domain=Domain.SPHERE,
        dim=d,
    )


# -- bump function --------------------------------------------------------------

BUMP_TABLE_POINTS = 4097


def _u1(x: float) -> float:
    if 0.25 < x < 0.5:
        return math.exp(-1.0 / ((0.5 - x) * (x - 0.25)))
    return 0.0


@functools.lru_cache(maxsize=1)
def _bump_table() -> Tuple[np.ndarray, np.ndarray]:
    """Nodes on [1/4, 1/2] and u at each node, nonincreasing by construction

    u(x_k) is the right tail sum of nonnegative per-cell integrals of u_1,
    divided by the full integral.
    """
    nodes = np.linspace(0.25, 0.5, BUMP_TABLE_POINTS)
    pieces = np.empty(BUMP_TABLE_POINTS - 1)
    for k in range(BUMP_TABLE_POINTS - 1):
        # the integrand peaks near 1e-28, so only a relative tolerance is meaningful
        value, _ = integrate.quad(_u1, nodes[k], nodes[k + 1], epsabs=0.0, epsrel=QUAD_TOLERANCE, limit=50)
        pieces[k] = max(value, 0.0)
    tails = np.zeros(BUMP_TABLE_POINTS)
    tails[:-1] = np.cumsum(pieces[::-1])[::-1]
    values = tails / tails[0]
    values[0] = 1.0
    return nodes, values


def bump_u(x: Any) -> Any:
    """Smooth nonincreasing u with u = 1 on [0, 1/4] and u = 0 on [1/2, inf)

    Between table nodes u is interpolated linearly and clipped to the values
    of the enclosing nodes.
    """
    values = np.asarray(x, dtype=float)
    if np.any(values < 0):
        raise ValueError("bump_u is defined for x >= 0")
    nodes, table = _bump_table()
    clamped = np.clip(values, nodes[0], nodes[-1])
    cell = np.clip(np.searchsorted(nodes, clamped, side="right") - 1, 0, BUMP_TABLE_POINTS - 2)
    result = np.clip(np.interp(clamped, nodes, table), table[cell + 1], table[cell])
    return float(result) if result.ndim == 0 else result


# -- grid and hard instances -------------------------------------------------------

def grid_centers(q: int, d: int) -> np.ndarray:
    """Regular grid G_q in lexicographic order of (k_1, ..., k_d)"""
    axis = (2.0 * np.arange(q) + 1.0) / (2.0 * q)
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=1)


def cell_index(x: Any, q: int, d: int) -> Any:
    """Index of the nearest grid center; ties go to the center closest to 0"""
    points = as_points(x, d)
    # per coordinate: cell k covers (k/q, (k+1)/q], the lower cell wins on boundaries
    ks = np.clip(np.ceil(points * q) - 1, 0, q - 1).astype(int)
    flat = np.ravel_multi_index(tuple(ks.T), (q,) * d)
    return int(flat[0]) if np.ndim(x) == 0 or (np.ndim(x) == 1 and d > 1) else flat


def psi(x: Any, inst: HardInstance) -> Any:
    """psi(x) = C_psi q^(-sr) sum_k u(||q (x - z_k)||)

    Only the nearest center can contribute: u vanishes at distance >= 1/(2q).
    """
    points = as_points(x, inst.d)
    cells = np.atleast_1d(cell_index(points, inst.q, inst.d))
    centers = inst.grid[cells]
    distance = inst.q * np.linalg.norm(points - centers, axis=1)
    values = inst.amplitude * np.asarray(bump_u(distance))
    return float(values[0]) if np.ndim(x) == 0 or (np.ndim(x) == 1 and inst.d > 1) else values


def _ball_volume(radius: float, d: int) -> float:
    return math.exp(d / 2.0 * math.log(math.pi) - gammaln(d / 2.0 + 1.0)) * radius ** d


def _ball_sampler(inst: HardInstance):
    centers = inst.grid
    radius = inst.ball_radius

    def sample(rng: np.random.Generator, n: int) -> np.ndarray:
        cells = rng.integers(0, inst.cells, size=n)
        offsets = np.empty((n, inst.d))
        filled = 0
        # rejection from the bounding cube
        while filled < n:
            batch = rng.uniform(-radius, radius, size=(2 * (n - filled) + 8, inst.d))
            batch = batch[np.linalg.norm(batch, axis=1) <= radius]
            take = min(batch.shape[0], n - filled)
            offsets[filled:filled + take] = batch[:take]
            filled += take
        return centers[cells] + offsets

    return sample


def _ball_density(inst: HardInstance):
    height = inst.cell_mass / _ball_volume(inst.ball_radius, inst.d)

    def density(X: np.ndarray) -> np.ndarray:
        points = as_points(X, inst.d)
        cells = np.atleast_1d(cell_index(points, inst.q, inst.d))
        inside = np.linalg.norm(points - inst.grid[cells], axis=1) <= inst.ball_radius
        return np.where(inside, height, 0.0)

    return density


def hard_instance_model(inst: HardInstance) -> ConditionalModel:
    """Conditional model with f(x) = omega_k psi(x) on cell k and mu uniform on the balls"""

    def f_star(X: np.ndarray) -> np.ndarray:
        cells = np.atleast_1d(cell_index(X, inst.q, inst.d))
        return inst.omega[cells] * np.atleast_1d(psi(X, inst))

    return ConditionalModel(
        name=f"hard-q{inst.q}-d{inst.d}",
        f_star=f_star,
        sampler=_ball_sampler(inst),
        density=_ball_density(inst),
        domain=Domain.UNIT_INTERVAL if inst.d == 1 else Domain.CUBE,
        dim=inst.d,
    )


def hard_instance_for_n(n: int, s: float, r: float, d: int, c_psi: float, theta: float = 1.0) -> int:
    """Grid resolution q with n v q^(-2sr) = theta, i.e. q = (n / theta)^(1/(2sr + d))"""
    return max(1, int(round((n / theta) ** (1.0 / (2.0 * s * r + d)))))


def varshamov_gilbert(m: int, seed: int) -> np.ndarray:
    """At least 2^(m/8) sign vectors in {-1, +1}^m with pairwise sum |w_i - w_j| >= m/4

    Randomized greedy: draw uniform codewords and keep those far enough from
    every kept codeword, up to 1000 * 2^(m/8) draws.
    """
    if m < 8:
        raise ValueError("varshamov_gilbert needs m >= 8")
    required = int(math.ceil(2.0 ** (m / 8.0)))
    max_draws = int(1000 * 2.0 ** (m / 8.0))
    rng = np.random.default_rng(seed)

    kept: List[np.ndarray] = []
    draws = 0
    while len(kept) < required:
        if draws >= max_draws:
            raise SearchExhaustedError(m, draws, len(kept), required)
        candidate = rng.choice(np.array([-1, 1], dtype=np.int8), size=m)
        draws += 1
        if all(np.sum(np.abs(candidate - word)) >= m / 4.0 for word in kept):
            kept.append(candidate)
    if draws > required:
        logger.debug(f"Codebook for m={m}: {required} codewords after {draws} draws")
    return np.stack(kept)


def min_pairwise_distance(codebook: np.ndarray) -> float:
    """Smallest sum |w_i - w_j| over distinct pairs (brute force)"""
    words = np.asarray(codebook, dtype=int)
    best = math.inf
    for i in range(words.shape[0]):
        for j in range(i + 1, words.shape[0]):
            best = min(best, float(np.sum(np.abs(words[i] - words[j]))))
    return best


def _bernoulli_kl(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        first = np.where(p > 0, p * np.log(p / q), 0.0)
        second = np.where(p < 1, (1 - p) * np.log((1 - p) / (1 - q)), 0.0)
    return first + second


def per_sample_kl(inst_a: HardInstance, inst_b: HardInstance, seed: int = 0) -> float:
    """KL divergence of one labeled sample under P_a against P_b (same marginal)"""
    if (inst_a.q, inst_a.d) != (inst_b.q, inst_b.d):
        raise ValueError("instances must share the grid")
    differing = np.flatnonzero(inst_a.omega != inst_b.omega)
    if differing.size == 0:
        return 0.0

    def integrand(points: np.ndarray) -> np.ndarray:
        amp_a = inst_a.omega[np.atleast_1d(cell_index(points, inst_a.q, inst_a.d))]
        amp_b = inst_b.omega[np.atleast_1d(cell_index(points, inst_b.q, inst_b.d))]
        eta_a = (1.0 + amp_a * np.atleast_1d(psi(points, inst_a))) / 2.0
        eta_b = (1.0 + amp_b * np.atleast_1d(psi(points, inst_b))) / 2.0
        return _bernoulli_kl(eta_a, eta_b)

    if inst_a.d == 1:
        radius = inst_a.ball_radius
        height = inst_a.cell_mass / (2.0 * radius)
        total = 0.0
        for k in differing:
            center = float(inst_a.grid[k, 0])
            value, _ = integrate.quad(
                lambda x: float(integrand(np.array([[x]]))[0]),
                center - radius, center + radius, epsabs=QUAD_TOLERANCE, limit=200,
            )
            total += height * value
        return total

    rng = np.random.default_rng(seed)
    points = hard_instance_model(inst_a).sample_marginal(rng, MC_KL_POINTS)
    return float(np.mean(integrand(points)))


def hard_instance_separation(inst_a: HardInstance, inst_b: HardInstance, n_test: int, seed: int) -> float:
    """d(f_a, f_b) = E_x[|f_a(x)| 1{f_a(x) f_b(x) < 0}] by Monte Carlo under mu"""
    model_a = hard_instance_model(inst_a)
    model_b = hard_instance_model(inst_b)
    X = model_a.sample_marginal(np.random.default_rng(seed), n_test)
    f_a = model_a.bayes_function(X)
    f_b = model_b.bayes_function(X)
    return float(np.mean(np.abs(f_a) * (f_a * f_b < 0)))


def build_hard_family(q: int, d: int, sr: float, c_psi: float, seed: int) -> Tuple[List[HardInstance], np.ndarray]:
    """One HardInstance per Varshamov-Gilbert codeword over the q^d cells"""
    cells = q ** d
    if cells < 8:
        raise ValueError(f"q^d = {cells} cells; the codebook needs at least 8")
    codebook = varshamov_gilbert(cells, seed)
    family = [HardInstance(q=q, d=d, sr=sr, c_psi=c_psi, omega=word) for word in codebook]
    logger.info(f"Built hard family with {len(family)} instances on {cells} cells")
    return family, codebook


NAMED_MODELS: Dict[str, Any] = {
    "cos2pix": cosine_model,
    "zero": lambda: constant_model(0.0),
    "one": lambda: constant_model(1.0),
}


def named_model(name: str, d: Optional[int] = None) -> ConditionalModel:
    """Look up a shipped conditional model by name"""
    if name == "sphere-linear":
        return sphere_linear_model(d or 3)
    if name not in NAMED_MODELS:
        raise ValueError(f"Unknown model: {name}. Available: {sorted(NAMED_MODELS) + ['sphere-linear']}")
    return NAMED_MODELS[name]()
