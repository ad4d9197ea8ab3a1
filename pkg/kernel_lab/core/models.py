"""
Data models - Pydantic models for kernels, spectra, estimators and experiment results
"""

import math
from datetime import datetime
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


def frozen_array(value: Any, dtype=float) -> np.ndarray:
    """Copy ``value`` into a read-only numpy array"""
    array = np.array(value, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


def as_points(X: Any, dim: Optional[int] = None) -> np.ndarray:
    """Normalize a point, a list of points or a 1-D sample to shape (n, d)"""
    array = np.asarray(X, dtype=float)
    if array.ndim == 0:
        array = array.reshape(1, 1)
    elif array.ndim == 1:
        # a bare vector is a batch of scalars for d=1, otherwise one point
        array = array.reshape(-1, 1) if dim in (None, 1) else array.reshape(1, -1)
    elif array.ndim != 2:
        raise ValueError(f"Expected points of rank <= 2, got shape {array.shape}")
    return array


class Domain(str, Enum):
    """Input domain of a kernel or conditional model"""
    UNIT_INTERVAL = "interval"
    CUBE = "cube"
    SPHERE = "sphere"


class KernelKind(str, Enum):
    """Kernels shipped with the laboratory"""
    MIN = "min"
    NTK = "ntk"
    CUSTOM_MERCER = "custom-mercer"


class FilterVariant(str, Enum):
    """Spectral filter families"""
    GRADIENT_FLOW = "gradient-flow"
    RIDGE = "ridge"
    SPECTRAL_CUTOFF = "cutoff"
    ITERATED_TIKHONOV = "iterated-tikhonov"


class Design(str, Enum):
    """How the inputs of a synthetic sample are placed"""
    RANDOM = "random"
    GRID = "grid"


class EigenSystem(BaseModel):
    """Analytic Mercer eigensystem of a kernel-measure pair"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    lambdas: np.ndarray = Field(..., description="Eigenvalues, positive and nonincreasing")
    eigenfunction: Callable[[Any, Any], Any] = Field(..., description="(j, x) -> e_j(x), j starting at 1")
    beta: float = Field(..., gt=1, description="Eigenvalue decay rate")
    measure: str = Field(..., description="Description of the marginal measure")
    domain: Domain = Field(Domain.UNIT_INTERVAL, description="Domain the eigenfunctions live on")
    eigenfunction_bound: float = Field(1.0, gt=0, description="sup over j and x of |e_j(x)|")

    @field_validator("lambdas", mode="before")
    @classmethod
    def _check_lambdas(cls, value):
        lambdas = frozen_array(value)
        if lambdas.ndim != 1 or lambdas.size == 0:
            raise ValueError("lambdas must be a nonempty vector")
        if np.any(lambdas <= 0):
            raise ValueError("lambdas must be strictly positive")
        if np.any(np.diff(lambdas) > 0):
            raise ValueError("lambdas must be nonincreasing")
        return lambdas

    @property
    def j_max(self) -> int:
        return int(self.lambdas.size)

    def evaluate(self, j: Any, x: Any) -> np.ndarray:
        """Evaluate e_j(x) with numpy broadcasting over j and x"""
        return np.asarray(self.eigenfunction(np.asarray(j), np.asarray(x, dtype=float)), dtype=float)


class KernelSpec(BaseModel):
    """Declarative description of a positive-definite kernel"""
    model_config = ConfigDict(
        frozen=True,
        arbitrary_types_allowed=True,
        json_schema_extra={"example": {"kind": "ntk", "depth": 2}},
    )

    kind: KernelKind = Field(..., description="Kernel family")
    depth: Optional[int] = Field(None, ge=1, description="Number of hidden layers for the NTK")
    eigensystem: Optional[EigenSystem] = Field(None, description="Eigensystem for a custom Mercer kernel")
    truncation_order: Optional[int] = Field(None, ge=1, description="Number of Mercer terms kept")

    @model_validator(mode="after")
    def _check_kind_fields(self):
        if self.kind == KernelKind.NTK and self.depth is None:
            raise ValueError("NTK kernels need a depth >= 1")
        if self.kind == KernelKind.CUSTOM_MERCER:
            if self.eigensystem is None or self.truncation_order is None:
                raise ValueError("custom Mercer kernels need an eigensystem and a truncation order")
            if self.truncation_order > self.eigensystem.j_max:
                raise ValueError(
                    f"truncation order {self.truncation_order} exceeds the {self.eigensystem.j_max} available eigenpairs"
                )
        return self

    @classmethod
    def min_kernel(cls) -> "KernelSpec":
        return cls(kind=KernelKind.MIN)

    @classmethod
    def ntk_kernel(cls, depth: int) -> "KernelSpec":
        return cls(kind=KernelKind.NTK, depth=depth)

    @classmethod
    def mercer_kernel(cls, eigensystem: EigenSystem, truncation_order: int) -> "KernelSpec":
        return cls(kind=KernelKind.CUSTOM_MERCER, eigensystem=eigensystem, truncation_order=truncation_order)

    @property
    def domain(self) -> Domain:
        if self.kind == KernelKind.MIN:
            return Domain.UNIT_INTERVAL
        if self.kind == KernelKind.NTK:
            return Domain.SPHERE
        return self.eigensystem.domain

    @property
    def kappa_bound(self) -> float:
        """Upper bound on sup_x K(x, x)"""
        if self.kind == KernelKind.MIN:
            return 1.0
        if self.kind == KernelKind.NTK:
            return float(self.depth + 1)
        head = self.eigensystem.lambdas[: self.truncation_order]
        return float(np.sum(head) * self.eigensystem.eigenfunction_bound ** 2)

    def describe(self) -> str:
        if self.kind == KernelKind.NTK:
            return f"ntk-{self.depth}"
        if self.kind == KernelKind.CUSTOM_MERCER:
            return f"mercer-{self.truncation_order}"
        return self.kind.value


class GramMatrix(BaseModel):
    """Symmetric kernel matrix K(X, X)"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int = Field(..., ge=1, description="Sample count")
    entries: np.ndarray = Field(..., description="Symmetric n x n matrix")

    @field_validator("entries", mode="before")
    @classmethod
    def _freeze_entries(cls, value):
        return frozen_array(value)

    @model_validator(mode="after")
    def _check_shape(self):
        if self.entries.shape != (self.n, self.n):
            raise ValueError(f"entries have shape {self.entries.shape}, expected ({self.n}, {self.n})")
        scale = max(float(np.max(np.abs(self.entries))), 1.0)
        if np.max(np.abs(self.entries - self.entries.T)) > 1e-12 * scale:
            raise ValueError("Gram matrix is not symmetric")
        return self

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0])

    def is_psd(self) -> bool:
        return self.min_eigenvalue() >= -1e-8 * self.n


class EmpiricalSpectrum(BaseModel):
    """Eigendecomposition of K/n, eigenpairs sorted by descending value"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    values: np.ndarray = Field(..., description="Descending eigenvalues of K/n")
    vectors: np.ndarray = Field(..., description="Orthonormal eigenvectors stored as columns")

    @field_validator("values", "vectors", mode="before")
    @classmethod
    def _freeze(cls, value):
        return frozen_array(value)

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def floor(self) -> float:
        """Eigenvalues at or below this level are treated as zero"""
        top = float(self.values[0]) if self.values.size else 0.0
        return 1e-12 * max(top, 0.0)

    @property
    def usable(self) -> np.ndarray:
        return self.values > self.floor


class FilterKind(BaseModel):
    """A filter family with its qualification and Definition-style constants"""
    model_config = ConfigDict(frozen=True)

    variant: FilterVariant = Field(..., description="Filter family")
    m: int = Field(1, ge=1, description="Number of iterations for iterated Tikhonov")

    @classmethod
    def gradient_flow(cls) -> "FilterKind":
        return cls(variant=FilterVariant.GRADIENT_FLOW)

    @classmethod
    def ridge(cls) -> "FilterKind":
        return cls(variant=FilterVariant.RIDGE)

    @classmethod
    def spectral_cutoff(cls) -> "FilterKind":
        return cls(variant=FilterVariant.SPECTRAL_CUTOFF)

    @classmethod
    def iterated_tikhonov(cls, m: int) -> "FilterKind":
        return cls(variant=FilterVariant.ITERATED_TIKHONOV, m=m)

    @property
    def tau(self) -> float:
        """Qualification"""
        if self.variant == FilterVariant.RIDGE:
            return 1.0
        if self.variant == FilterVariant.ITERATED_TIKHONOV:
            return float(self.m)
        return math.inf

    @property
    def E(self) -> float:
        if self.variant == FilterVariant.ITERATED_TIKHONOV:
            return float(self.m)
        return 1.0

    def F(self, tau: float) -> float:
        """Residual constant F_tau valid for every alpha in [0, tau]"""
        if self.variant == FilterVariant.GRADIENT_FLOW:
            # psi(0) = 1 forces F >= 1 at alpha = 0
            return max(1.0, self.sharp_constant(tau))
        return 1.0

    def sharp_constant(self, tau: float) -> float:
        """Value of sup_z |psi(z)| z^tau nu^tau, attained for gradient flow at z = tau/nu"""
        if self.variant == FilterVariant.GRADIENT_FLOW:
            return (tau / math.e) ** tau if tau > 0 else 1.0
        return 1.0

    def describe(self) -> str:
        if self.variant == FilterVariant.ITERATED_TIKHONOV:
            return f"{self.variant.value}-{self.m}"
        return self.variant.value


class FilterBoundsReport(BaseModel):
    """Outcome of checking both filter inequalities on a grid"""
    filter: str = Field(..., description="Filter description")
    tau_check: float = Field(..., description="Qualification level checked")
    E: float = Field(..., description="Declared E")
    F_tau: float = Field(..., description="Declared F_tau")
    sharp_constant: float = Field(..., description="Sharp residual constant at alpha = tau")
    phi_ratio_max: float = Field(..., description="max of z^a phi(z) / nu^(1-a) over the grid")
    psi_ratio_max: float = Field(..., description="max of |psi(z)| z^a / nu^(-a) over the grid")
    phi_margin: float = Field(..., description="E minus phi_ratio_max")
    psi_margin: float = Field(..., description="F_tau minus psi_ratio_max")
    psi_ratio_by_alpha: Dict[float, float] = Field(default_factory=dict)
    failures: List[str] = Field(default_factory=list)
    passed: bool = Field(..., description="Both inequalities hold on the grid")


class FittedClassifier(BaseModel):
    """Spectral-algorithm estimator f(x) = sum_i c_i K(x, X_i)"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kernel: KernelSpec
    train_X: np.ndarray = Field(..., description="Training inputs, shape (n, d)")
    coefficients: np.ndarray = Field(..., description="Coefficient vector c, shape (n,)")
    nu: float = Field(..., gt=0, description="Regularization parameter")
    filter: FilterKind

    @field_validator("train_X", "coefficients", mode="before")
    @classmethod
    def _freeze(cls, value):
        return frozen_array(value)

    @model_validator(mode="after")
    def _check_lengths(self):
        if self.train_X.shape[0] != self.coefficients.shape[0]:
            raise ValueError("coefficients must match the number of training points")
        if not np.all(np.isfinite(self.coefficients)):
            raise ValueError("coefficients must be finite")
        return self

    @property
    def n(self) -> int:
        return int(self.coefficients.size)

    def __call__(self, X: Any) -> np.ndarray:
        from .spectral import predict_batch
        return predict_batch(self, X)


class ConditionalModel(BaseModel):
    """Bayes function f* and marginal mu of a binary classification problem"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str = Field(..., description="Model identifier")
    f_star: Callable[[np.ndarray], np.ndarray] = Field(..., description="(n, d) points -> f*(x) in [-1, 1]")
    sampler: Callable[[np.random.Generator, int], np.ndarray] = Field(..., description="(rng, n) -> (n, d) points")
    density: Callable[[np.ndarray], np.ndarray] = Field(..., description="Density of mu w.r.t. the reference measure")
    domain: Domain = Field(..., description="Support domain")
    dim: int = Field(1, ge=1, description="Ambient dimension")
    quantile: Optional[Callable[[np.ndarray], np.ndarray]] = Field(
        None, description="Inverse CDF of mu on [0, 1]; models without one support random designs only"
    )

    def bayes_function(self, X: Any) -> np.ndarray:
        return np.asarray(self.f_star(as_points(X, self.dim)), dtype=float)

    def eta(self, X: Any) -> np.ndarray:
        return (1.0 + self.bayes_function(X)) / 2.0

    def sample_marginal(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return as_points(self.sampler(rng, n), self.dim)

    def grid_points(self, n: int) -> np.ndarray:
        """Quantile grid x_i = F^-1(i / n), i = 1..n"""
        if self.quantile is None:
            raise ValueError(f"model '{self.name}' has no quantile function for a grid design")
        levels = np.arange(1, n + 1, dtype=float) / n
        return as_points(self.quantile(levels), self.dim)


class HardInstance(BaseModel):
    """One member P_omega of the hard family used by the lower bound"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    q: int = Field(..., ge=1, description="Grid resolution")
    d: int = Field(..., ge=1, description="Dimension")
    sr: float = Field(..., gt=0, description="Product of relative smoothness s and Sobolev order r")
    c_psi: float = Field(..., gt=0, le=1, description="Amplitude constant C_psi")
    omega: np.ndarray = Field(..., description="Sign codeword of length q^d")

    @field_validator("omega", mode="before")
    @classmethod
    def _freeze_omega(cls, value):
        return frozen_array(value, dtype=np.int8)

    @model_validator(mode="after")
    def _check_codeword(self):
        if self.omega.shape != (self.cells,):
            raise ValueError(f"omega must have length q^d = {self.cells}")
        if not np.all(np.isin(self.omega, (-1, 1))):
            raise ValueError("omega entries must be -1 or +1")
        return self

    @property
    def cells(self) -> int:
        return self.q ** self.d

    @property
    def cell_mass(self) -> float:
        """Marginal mass v carried by each ball"""
        return 1.0 / self.cells

    @property
    def ball_radius(self) -> float:
        return 1.0 / (4.0 * self.q)

    @property
    def amplitude(self) -> float:
        """sup_x |psi(x)| = C_psi q^(-sr)"""
        return self.c_psi * self.q ** (-self.sr)

    @property
    def grid(self) -> np.ndarray:
        from ..data.synth import grid_centers
        return grid_centers(self.q, self.d)


class SmoothnessEstimate(BaseModel):
    """Result of a log-log fit of projection coefficients"""
    r_hat: float = Field(..., description="Fitted coefficient-decay exponent")
    s_hat: float = Field(..., description="Estimated relative smoothness")
    slope: float = Field(..., description="OLS slope of log p_j on log j")
    intercept: float = Field(..., description="OLS intercept")
    truncation: int = Field(..., ge=1, description="Last index considered")
    n_used: int = Field(..., ge=0, description="Number of coefficients in the fit")
    fit_residual: float = Field(..., ge=0, description="RMS residual of the log fit")
    beta: float = Field(..., gt=1, description="Eigenvalue decay rate used for s_hat")
    sample_size: Optional[int] = Field(None, description="Data size when estimated from samples")


class RateRow(BaseModel):
    """Excess risk aggregated over replicates at one sample size"""
    n: int = Field(..., ge=1)
    mean_excess_risk: float = Field(..., ge=0)
    std: float = Field(..., ge=0)
    nu_used: float = Field(..., gt=0)


class RateStudyResult(BaseModel):
    """Convergence-rate study against the theoretical exponent"""
    rows: List[RateRow]
    fitted_slope: float
    fitted_intercept: float
    theoretical_slope: float
    s: float = Field(..., gt=0)
    beta: float = Field(..., gt=1)

    @model_validator(mode="after")
    def _check_rows(self):
        sizes = [row.n for row in self.rows]
        if sizes != sorted(sizes):
            raise ValueError("rows must be sorted by n")
        return self


class LabeledImages(BaseModel):
    """Flattened images with integer labels"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    images: np.ndarray = Field(..., description="Pixels, shape (n, d), values 0-255")
    labels: np.ndarray = Field(..., description="Class labels, shape (n,)")
    source: str = Field(..., description="Dataset identifier")

    @field_validator("images", mode="before")
    @classmethod
    def _freeze_images(cls, value):
        return frozen_array(value, dtype=np.uint8)

    @field_validator("labels", mode="before")
    @classmethod
    def _freeze_labels(cls, value):
        return frozen_array(value, dtype=np.int64)

    @model_validator(mode="after")
    def _check_lengths(self):
        if self.images.ndim != 2:
            raise ValueError("images must be flattened to shape (n, d)")
        if self.images.shape[0] != self.labels.shape[0]:
            raise ValueError("images and labels must have the same length")
        return self

    def __len__(self) -> int:
        return int(self.labels.size)


class ExperimentResult(BaseModel):
    """Outcome of one experiment run"""
    experiment_name: str = Field(..., description="Experiment name")
    timestamp: datetime = Field(default_factory=datetime.now)
    duration: float = Field(..., description="Wall time (seconds)")
    success: bool = Field(..., description="Experiment successful?")
    error_message: Optional[str] = Field(None, description="Error message")
    columns: List[str] = Field(default_factory=list, description="CSV columns of rows")
    rows: List[Dict[str, Any]] = Field(default_factory=list, description="Tabular output")
    summary: Dict[str, Any] = Field(default_factory=dict, description="Footer key/value pairs")
    metadata: Optional[Dict[str, Any]] = Field(None, description="Additional run info")

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "experiment_name": "rate-study",
                "duration": 41.7,
                "success": True,
                "columns": ["n", "mean_risk", "std", "nu"],
                "summary": {"fitted_slope": -0.26, "theoretical_slope": -0.25},
            }
        }
    )


Sample = Tuple[np.ndarray, np.ndarray]
