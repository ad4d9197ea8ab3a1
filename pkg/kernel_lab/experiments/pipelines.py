"""
Experiment pipelines - one class per CLI command
"""

import logging
from typing import Any, Dict, List, Optional

import numpy as np

from .base import BaseExperiment
from ..core.eigensystems import MIN_KERNEL_BETA, empirical_eigendecomposition, min_kernel_eigensystem, ntk_sphere_beta
from ..core.exceptions import ConfigError
from ..core.kernels import gram_matrix, uniform_sphere
from ..core.models import ConditionalModel, Design, Domain, KernelKind
from ..core.risk import MonteCarlo, Quadrature, excess_risk, nu_rule, rate_study, zero_one_risk
from ..core.smoothness import estimate_from_data, repeated_estimate, sample_size_sweep
from ..core.spectral import fit
from ..data import datasets, synth

logger = logging.getLogger(__name__)

DEFAULT_SPHERE_DIM = 3
DEFAULT_CHECK_POINTS = 2000
DEFAULT_HARD_SAMPLES = 1000
# offset separating the held-out stream from the training stream
TEST_SEED_OFFSET = 104729
CHECK_TOLERANCE = 1e-9
NYSTROM_TOLERANCE = 0.05


def point_columns(dim: int) -> List[str]:
    return ["x"] if dim == 1 else [f"x_{i + 1}" for i in range(dim)]


def point_fields(x: np.ndarray) -> Dict[str, float]:
    values = np.atleast_1d(x)
    return dict(zip(point_columns(values.size), (float(v) for v in values)))


class ModelExperiment(BaseExperiment):
    """Shared resolution of the synthetic model named in the configuration"""

    def resolve_model(self) -> ConditionalModel:
        name = self.config.model
        if name == "hard":
            d = self.config.d or 1
            q = self.config.q or synth.hard_instance_for_n(self.config.n or 1000, self.config.sr, 1.0, d, self.config.c_psi)
            family, _ = synth.build_hard_family(q, d, self.config.sr, self.config.c_psi, self.config.seed)
            return synth.hard_instance_model(family[0])
        try:
            model = synth.named_model(name, self.config.d)
        except ValueError as e:
            raise ConfigError(str(e)) from e
        if model.domain != self.config.kernel_spec().domain:
            raise ConfigError(f"model '{name}' lives on the {model.domain.value}, kernel {self.config.kernel} does not")
        return model

    def default_beta(self, dim: int) -> float:
        if self.config.beta is not None:
            return self.config.beta
        if self.config.kernel == KernelKind.NTK.value:
            return ntk_sphere_beta(dim)
        return MIN_KERNEL_BETA


class SmoothnessExperiment(ModelExperiment):
    """Truncation Estimation of the relative smoothness over replicates or a sample-size sweep"""

    name = "estimate-smoothness"
    columns = ["rep", "s_hat"]

    def setup(self) -> bool:
        config = self.config
        self.kernel = config.kernel_spec()
        if config.dataset is not None:
            if config.dataset == "cifar10":
                data = datasets.load_cifar10(config.cifar_batches)
            else:
                data = datasets.load_idx_dataset(config.images, config.labels, config.dataset)
            label_pos, label_neg = datasets.CLASS_PAIRS[config.dataset]
            self.data_source = datasets.subset_source(data, label_pos, label_neg)
            self.beta = self.default_beta(data.images.shape[1])
            self.metadata["source"] = f"{config.dataset} {label_pos}-vs-{label_neg}"
        else:
            model = self.resolve_model()
            design = self.input_design(model)
            if config.sigma is not None:
                self.data_source = lambda n, seed: synth.sample_regression(model, n, config.sigma, seed, design)
            else:
                self.data_source = lambda n, seed: synth.sample_classification(model, n, seed, design)
            self.beta = self.default_beta(model.dim)
            self.metadata["source"] = model.name
            self.metadata["design"] = design.value
        return True

    def input_design(self, model: ConditionalModel) -> Design:
        """Grid inputs whenever the model has a quantile function, unless --design says otherwise"""
        if self.config.design is None:
            return Design.RANDOM if model.quantile is None else Design.GRID
        if self.config.design == Design.GRID and model.quantile is None:
            raise ConfigError(f"model '{model.name}' has no grid design; use --design random")
        return self.config.design

    def total_steps(self) -> int:
        sizes = len(set(self.config.n_grid)) if self.config.n_grid else 1
        return sizes * self.config.reps

    def run_experiment(self) -> Dict[str, Any]:
        config = self.config
        threads = config.worker_threads
        truncation = None if config.naive else config.truncation
        summary: Dict[str, Any] = {"beta": self.beta, "truncation": "none" if truncation is None else truncation}

        if config.n_grid:
            sweep = sample_size_sweep(
                self.data_source, self.kernel, config.n_grid, truncation, self.beta,
                config.reps, config.seed, threads, self.tick,
            )
            rows = [{"n": n, "mean": mean, "std": std} for n, mean, std in sweep]
            return {"columns": ["n", "mean", "std"], "rows": rows, "summary": summary}

        if config.reps == 1:
            X, Y = self.data_source(config.n, config.seed)
            estimate = estimate_from_data(self.kernel, X, Y, truncation, self.beta)
            self.tick()
            summary.update({"mean": estimate.s_hat, "r_hat": estimate.r_hat, "fit_residual": estimate.fit_residual})
            return {"rows": [{"rep": 0, "s_hat": estimate.s_hat}], "summary": summary}

        mean, std, estimates = repeated_estimate(
            self.data_source, self.kernel, config.n, truncation, self.beta,
            config.reps, config.seed, threads, self.tick,
        )
        summary.update({"mean": mean, "std": std})
        rows = [{"rep": rep, "s_hat": value} for rep, value in enumerate(estimates)]
        return {"rows": rows, "summary": summary}


class RateStudyExperiment(ModelExperiment):
    """Mean excess risk against n with the nu rule, compared with the theoretical exponent"""

    name = "rate-study"
    columns = ["n", "mean_risk", "std", "nu"]

    def setup(self) -> bool:
        self.model = self.resolve_model()
        return True

    def total_steps(self) -> int:
        return len(set(self.config.n_grid)) * self.config.reps

    def run_experiment(self) -> Dict[str, Any]:
        config = self.config
        result = rate_study(
            self.model,
            config.kernel_spec(),
            config.filter_kind(),
            config.n_grid,
            config.s,
            config.beta,
            config.reps,
            config.seed,
            nu_constant=config.nu_constant,
            quadrature_points=config.quadrature_points,
            n_test=config.n_test,
            threads=config.worker_threads,
            progress=self.tick,
        )
        rows = [
            {"n": row.n, "mean_risk": row.mean_excess_risk, "std": row.std, "nu": row.nu_used}
            for row in result.rows
        ]
        summary = {
            "fitted_slope": result.fitted_slope,
            "fitted_intercept": result.fitted_intercept,
            "theoretical_slope": result.theoretical_slope,
        }
        return {"rows": rows, "summary": summary}


class FitPredictExperiment(ModelExperiment):
    """Fit one spectral-algorithm classifier and score it on a held-out sample"""

    name = "fit-predict"

    def setup(self) -> bool:
        self.model = self.resolve_model()
        return True

    def total_steps(self) -> int:
        return 1

    def run_experiment(self) -> Dict[str, Any]:
        config = self.config
        model = self.model
        nu = config.nu if config.nu is not None else nu_rule(config.n, config.s, config.beta, config.nu_constant)

        X, Y = synth.sample_classification(model, config.n, config.seed)
        classifier = fit(config.kernel_spec(), X, Y, config.filter_kind(), nu)
        X_test, Y_test = synth.sample_classification(model, config.n_test, config.seed + TEST_SEED_OFFSET)
        f_hat = classifier(X_test)
        f_star = model.bayes_function(X_test)
        self.tick()

        if model.domain == Domain.UNIT_INTERVAL and model.dim == 1:
            method = Quadrature(points=config.quadrature_points)
        else:
            method = MonteCarlo(n_test=config.n_test, seed=config.seed + TEST_SEED_OFFSET)

        rows = [
            {**point_fields(x), "f_hat": float(fh), "label": float(y), "f_star": float(fs)}
            for x, fh, y, fs in zip(X_test, f_hat, Y_test, f_star)
        ]
        summary = {
            "nu": nu,
            "zero_one_risk": zero_one_risk(classifier, (X_test, Y_test)),
            "excess_risk": excess_risk(model, classifier, method),
        }
        columns = point_columns(model.dim) + ["f_hat", "label", "f_star"]
        return {"columns": columns, "rows": rows, "summary": summary}


class KernelCheckExperiment(BaseExperiment):
    """Diagonal, symmetry and PSD checks of a Gram matrix on a random sample"""

    name = "kernel-check"
    columns = ["check", "value", "expected", "passed"]

    def total_steps(self) -> int:
        return 1

    def run_experiment(self) -> Dict[str, Any]:
        config = self.config
        kernel = config.kernel_spec()
        n = config.n or DEFAULT_CHECK_POINTS
        rng = np.random.default_rng(config.seed)

        if kernel.domain == Domain.SPHERE:
            d = config.d or DEFAULT_SPHERE_DIM
            X = uniform_sphere(rng, n, d)
            diagonal_expected = np.full(n, kernel.kappa_bound)
        else:
            d = 1
            X = rng.uniform(0.0, 1.0, size=(n, 1))
            # min(x, x) = x
            diagonal_expected = X[:, 0]

        G = gram_matrix(kernel, X)
        diagonal = np.diag(G.entries)
        rows = [
            self._row("max_diagonal_error", float(np.max(np.abs(diagonal - diagonal_expected))), 0.0),
            self._row("max_asymmetry", float(np.max(np.abs(G.entries - G.entries.T))), 0.0),
            {
                "check": "min_eigenvalue",
                "value": G.min_eigenvalue(),
                "expected": -1e-8 * n,
                "passed": G.is_psd(),
            },
        ]
        if kernel.kind == KernelKind.NTK:
            rows.insert(0, self._row("diagonal", float(np.mean(diagonal)), kernel.kappa_bound))
        else:
            rows.extend(self._nystrom_rows(G))
        self.tick()

        passed = all(row["passed"] for row in rows)
        if not passed:
            logger.warning(f"Kernel {kernel.describe()} failed {sum(not r['passed'] for r in rows)} checks")
        return {"rows": rows, "summary": {"kernel": kernel.describe(), "n": n, "d": d, "passed": passed}}

    @staticmethod
    def _row(check: str, value: float, expected: float) -> Dict[str, Any]:
        return {"check": check, "value": value, "expected": expected, "passed": abs(value - expected) <= CHECK_TOLERANCE * max(1.0, abs(expected))}

    @staticmethod
    def _nystrom_rows(G, count: int = 5) -> List[Dict[str, Any]]:
        """Top empirical eigenvalues of K/n against the analytic min-kernel spectrum"""
        spectrum = empirical_eigendecomposition(G)
        analytic = min_kernel_eigensystem(count).lambdas
        rows = []
        for j in range(min(count, spectrum.n)):
            value = float(spectrum.values[j])
            expected = float(analytic[j])
            rows.append({
                "check": f"eigenvalue_{j + 1}",
                "value": value,
                "expected": expected,
                "passed": abs(value - expected) <= NYSTROM_TOLERANCE * expected,
            })
        return rows


class HardInstanceExperiment(BaseExperiment):
    """Build a Varshamov-Gilbert hard family and sample its first member"""

    name = "hard-instance"

    def total_steps(self) -> int:
        return 1

    def run_experiment(self) -> Dict[str, Any]:
        config = self.config
        d = config.d or 1
        n = config.n or DEFAULT_HARD_SAMPLES
        q = config.q or synth.hard_instance_for_n(n, config.sr, 1.0, d, config.c_psi)

        family, codebook = synth.build_hard_family(q, d, config.sr, config.c_psi, config.seed)
        instance = family[0]
        model = synth.hard_instance_model(instance)
        X, Y = synth.sample_classification(model, n, config.seed)
        cells = np.atleast_1d(synth.cell_index(X, q, d))
        f_values = model.bayes_function(X)
        self.tick()

        rows = [
            {**point_fields(x), "y": float(y), "cell": int(cell), "f": float(f)}
            for x, y, cell, f in zip(X, Y, cells, f_values)
        ]
        sup_psi = float(np.max(np.abs(synth.psi(instance.grid, instance))))
        summary = {
            "q": q,
            "cells": instance.cells,
            "codebook_size": int(codebook.shape[0]),
            "min_pairwise_distance": synth.min_pairwise_distance(codebook),
            "sup_psi": sup_psi,
            "amplitude": instance.amplitude,
            "kl_first_pair": synth.per_sample_kl(family[0], family[1], seed=config.seed),
            "separation_first_pair": synth.hard_instance_separation(family[0], family[1], config.n_test, config.seed),
        }
        columns = point_columns(d) + ["y", "cell", "f"]
        return {"columns": columns, "rows": rows, "summary": summary}
