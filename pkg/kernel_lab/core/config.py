"""
Experiment configuration - one validated model behind every CLI command

Values come from an optional YAML file and from command-line flags; flags given
explicitly on the command line override file values.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional

import psutil
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .exceptions import ConfigError
from .models import Design, FilterKind, FilterVariant, KernelSpec

logger = logging.getLogger(__name__)

Command = Literal["estimate-smoothness", "rate-study", "fit-predict", "kernel-check", "hard-instance"]
DatasetName = Literal["mnist", "fashion-mnist", "cifar10"]
KernelName = Literal["min", "ntk"]


class ExperimentConfig(BaseModel):
    """Parameters of one experiment run"""
    model_config = ConfigDict(
        frozen=True,
        extra="forbid",
        json_schema_extra={
            "example": {
                "command": "rate-study",
                "kernel": "min",
                "model": "cos2pix",
                "s": 0.5,
                "beta": 2.0,
                "n_grid": [256, 512, 1024, 2048, 4096],
                "reps": 10,
                "seed": 1,
                "out": "rate.csv",
            }
        },
    )

    command: Command = Field(..., description="Pipeline to run")

    # kernel
    kernel: KernelName = Field("min", description="Kernel family")
    depth: int = Field(1, ge=1, description="NTK hidden layers")

    # data source: a synthetic model or a dataset on disk
    model: Optional[str] = Field(None, description="Named synthetic model")
    dataset: Optional[DatasetName] = Field(None, description="Image dataset")
    images: Optional[Path] = Field(None, description="IDX image file")
    labels: Optional[Path] = Field(None, description="IDX label file")
    cifar_batches: List[Path] = Field(default_factory=list, description="CIFAR-10 binary batches")
    d: Optional[int] = Field(None, ge=1, description="Ambient dimension for sphere models and kernel checks")
    sigma: Optional[float] = Field(None, ge=0, description="Regression noise level; 0 gives noiseless responses")
    design: Optional[Design] = Field(None, description="Input placement for synthetic models (default: grid when the model has one)")

    # sample sizes and replication
    n: Optional[int] = Field(None, ge=2, description="Sample size")
    n_grid: Optional[List[int]] = Field(None, description="Sample sizes for sweeps and rate studies")
    reps: int = Field(50, ge=1, description="Replicates")
    seed: int = Field(0, ge=0, description="Base seed; replicate r uses seed + r")
    threads: Optional[int] = Field(None, ge=1, description="Worker threads (default: logical CPUs)")

    # smoothness estimation
    truncation: int = Field(100, ge=3, description="Truncation point")
    naive: bool = Field(False, description="Fit the slope over the whole spectrum instead of truncating")
    beta: Optional[float] = Field(None, gt=1, description="Eigenvalue decay rate")

    # estimator
    filter: FilterVariant = Field(FilterVariant.GRADIENT_FLOW, description="Spectral filter")
    tikhonov_m: int = Field(2, ge=1, description="Iterations of iterated Tikhonov")
    nu: Optional[float] = Field(None, gt=0, description="Fixed regularization parameter")
    s: Optional[float] = Field(None, gt=0, description="Relative smoothness for the nu rule")
    nu_constant: float = Field(1.0, gt=0, description="Constant of the nu rule")
    n_test: int = Field(2000, ge=1, description="Held-out or Monte Carlo sample size")
    quadrature_points: int = Field(10001, ge=10, description="Quadrature nodes for risks on [0, 1]")

    # hard instances
    q: Optional[int] = Field(None, ge=1, description="Grid resolution")
    sr: float = Field(1.0, gt=0, description="Product s * r")
    c_psi: float = Field(1.0, gt=0, le=1, description="Bump amplitude constant")

    # output
    out: Optional[Path] = Field(None, description="Output file (stdout when omitted)")
    format: Literal["csv", "json"] = Field("csv", description="Output format")

    @model_validator(mode="after")
    def _check_sources(self):
        if self.model is not None and self.dataset is not None:
            raise ValueError("--model and --dataset are mutually exclusive")
        if self.dataset is not None:
            if self.command != "estimate-smoothness":
                raise ValueError("--dataset is only supported by estimate-smoothness")
            if self.kernel != "ntk":
                raise ValueError("image datasets live on the sphere and need --kernel ntk")
            if self.dataset == "cifar10":
                if not self.cifar_batches or self.images or self.labels:
                    raise ValueError("cifar10 needs --cifar-batch paths and no --images/--labels")
            elif self.images is None or self.labels is None or self.cifar_batches:
                raise ValueError(f"{self.dataset} needs --images and --labels")
        elif self.images or self.labels or self.cifar_batches:
            raise ValueError("dataset files given without --dataset")
        if self.command in ("estimate-smoothness", "rate-study", "fit-predict") and self.model is None and self.dataset is None:
            raise ValueError(f"{self.command} needs --model or --dataset")
        if self.sigma is not None and self.dataset is not None:
            raise ValueError("--sigma applies to synthetic models only")
        if self.design is not None:
            if self.command != "estimate-smoothness":
                raise ValueError("--design is only supported by estimate-smoothness")
            if self.dataset is not None:
                raise ValueError("--design applies to synthetic models only")
        return self

    @model_validator(mode="after")
    def _check_command_fields(self):
        if self.command == "estimate-smoothness" and self.n is None and not self.n_grid:
            raise ValueError("estimate-smoothness needs --n or --n-grid")
        if self.naive and self.command != "estimate-smoothness":
            raise ValueError("--naive is only supported by estimate-smoothness")
        if self.command == "rate-study":
            if not self.n_grid or len(set(self.n_grid)) < 3:
                raise ValueError("rate-study needs --n-grid with at least 3 sizes")
            if self.s is None or self.beta is None:
                raise ValueError("rate-study needs --s and --beta")
        if self.command == "fit-predict":
            if self.n is None:
                raise ValueError("fit-predict needs --n")
            if (self.nu is None) == (self.s is None):
                raise ValueError("fit-predict needs exactly one of --nu or --s (with --beta)")
            if self.s is not None and self.beta is None:
                raise ValueError("--s needs --beta")
        if self.command == "hard-instance" and self.q is None and self.n is None:
            raise ValueError("hard-instance needs --q or --n")
        if self.n_grid is not None and any(n < 2 for n in self.n_grid):
            raise ValueError("every --n-grid size must be at least 2")
        return self

    @property
    def worker_threads(self) -> int:
        return self.threads or psutil.cpu_count(logical=True) or 1

    def kernel_spec(self) -> KernelSpec:
        if self.kernel == "ntk":
            return KernelSpec.ntk_kernel(self.depth)
        return KernelSpec.min_kernel()

    def filter_kind(self) -> FilterKind:
        if self.filter == FilterVariant.ITERATED_TIKHONOV:
            return FilterKind.iterated_tikhonov(self.tikhonov_m)
        return FilterKind(variant=self.filter)


def load_config_file(path: Path) -> Dict[str, Any]:
    """Read a YAML mapping of option names (dashes or underscores) to values"""
    try:
        with open(path, encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigError(f"Cannot parse config file {path}: {e}") from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {path} must contain a mapping, got {type(data).__name__}")
    return {str(key).replace("-", "_"): value for key, value in data.items()}


def build_config(
    command: str,
    file_values: Optional[Mapping[str, Any]] = None,
    flag_values: Optional[Mapping[str, Any]] = None,
) -> ExperimentConfig:
    """Merge file values with flag values (flags win) and validate"""
    merged: Dict[str, Any] = dict(file_values or {})
    merged.pop("command", None)
    merged.update({k: v for k, v in (flag_values or {}).items() if v is not None})
    merged["command"] = command
    try:
        config = ExperimentConfig(**merged)
    except ValidationError as e:
        raise ConfigError(_summarize(e)) from e
    logger.debug(f"Configuration: {config.model_dump(exclude_defaults=True)}")
    return config


def _summarize(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = ".".join(str(part) for part in item.get("loc", ()))
        parts.append(f"{location}: {item['msg']}" if location else item["msg"])
    return "Invalid configuration: " + "; ".join(parts)
