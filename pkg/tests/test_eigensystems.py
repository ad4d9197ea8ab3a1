import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import trapezoid

from kernel_lab.core.eigensystems import (
    MIN_KERNEL_BETA,
    edr_fit,
    effective_dimension,
    empirical_eigendecomposition,
    fit_loglog_slope,
    interpolation_smoothness,
    mercer_coefficients,
    min_kernel_eigensystem,
    ntk_sphere_beta,
)
from kernel_lab.core.exceptions import DegenerateFitError
from kernel_lab.core.kernels import gram_matrix
from kernel_lab.core.models import GramMatrix, KernelSpec


def test_min_kernel_eigenvalues():
    system = min_kernel_eigensystem(5)
    assert system.lambdas[0] == pytest.approx(0.4052847, rel=1e-6)
    assert system.lambdas[1] == pytest.approx(0.0450316, rel=1e-5)
    assert system.beta == MIN_KERNEL_BETA
    assert np.all(np.diff(system.lambdas) < 0)


def test_min_kernel_eigenfunctions():
    system = min_kernel_eigensystem(3)
    assert float(system.evaluate(1, 1.0)) == pytest.approx(math.sqrt(2.0))
    assert float(system.evaluate(2, 0.0)) == pytest.approx(0.0)
    # orthonormal in L2[0, 1] (trapezoid rule)
    x = np.linspace(0, 1, 20001)
    e1 = system.evaluate(1, x)
    e2 = system.evaluate(2, x)
    assert trapezoid(e1 * e1, x) == pytest.approx(1.0, abs=1e-6)
    assert trapezoid(e1 * e2, x) == pytest.approx(0.0, abs=1e-6)


def test_min_kernel_eigensystem_requires_positive_size():
    with pytest.raises(ValueError):
        min_kernel_eigensystem(0)


def test_identity_gram():
    spectrum = empirical_eigendecomposition(GramMatrix(n=3, entries=3.0 * np.eye(3)))
    np.testing.assert_allclose(spectrum.values, 1.0)
    np.testing.assert_allclose(spectrum.vectors.T @ spectrum.vectors, np.eye(3), atol=1e-12)


def test_rank_one_gram(min_kernel):
    spectrum = empirical_eigendecomposition(gram_matrix(min_kernel, [0.5] * 4))
    assert spectrum.values[0] == pytest.approx(0.5)
    assert np.all(spectrum.values[1:] <= 1e-10)
    assert spectrum.usable.tolist() == [True, False, False, False]


def test_empirical_values_descending(rng, min_kernel):
    spectrum = empirical_eigendecomposition(gram_matrix(min_kernel, rng.uniform(size=50)))
    assert np.all(np.diff(spectrum.values) <= 0)
    np.testing.assert_allclose(spectrum.vectors.T @ spectrum.vectors, np.eye(50), atol=1e-10)


def test_nystrom_matches_analytic_spectrum(min_kernel):
    rng = np.random.default_rng(3)
    X = rng.uniform(size=2000)
    spectrum = empirical_eigendecomposition(gram_matrix(min_kernel, X))
    analytic = min_kernel_eigensystem(20).lambdas
    np.testing.assert_allclose(spectrum.values[:20], analytic, rtol=0.05)


def test_effective_dimension_examples():
    assert effective_dimension([1.0], 1.0) == pytest.approx(0.5)
    lambdas = min_kernel_eigensystem(1000).lambdas
    values = [effective_dimension(lambdas, nu) for nu in (1e-6, 1.0, 10.0, 100.0)]
    assert values[0] < 1e-6
    assert values == sorted(values)


def test_effective_dimension_rejects_bad_input():
    with pytest.raises(ValueError):
        effective_dimension([1.0], 0.0)
    with pytest.raises(ValueError):
        effective_dimension([], 1.0)


def test_effective_dimension_slope():
    lambdas = min_kernel_eigensystem(10 ** 6).lambdas
    nus = [1e3, 1e4, 1e5, 1e6, 1e7]
    fit = fit_loglog_slope(nus, [effective_dimension(lambdas, nu) for nu in nus])
    assert fit.slope == pytest.approx(1.0 / MIN_KERNEL_BETA, abs=0.05)


def test_edr_fit_exact_power_laws():
    j = np.arange(1, 101, dtype=float)
    assert edr_fit(j ** -2.0, (1, 100)) == pytest.approx(2.0, abs=1e-12)
    assert edr_fit(3.0 * j ** -1.5, (1, 100)) == pytest.approx(1.5, abs=1e-12)


def test_edr_fit_min_kernel():
    # (2j - 1)^-2 bends away from j^-2 at small j, so the fit starts past the bend
    lambdas = min_kernel_eigensystem(200).lambdas
    assert edr_fit(lambdas, (20, 200)) == pytest.approx(2.0, abs=0.02)


def test_edr_fit_errors():
    with pytest.raises(DegenerateFitError):
        edr_fit(np.ones(10), (1, 10))
    with pytest.raises(ValueError):
        edr_fit(np.ones(10), (1, 2))
    with pytest.raises(ValueError):
        edr_fit(np.ones(10), (1, 20))


@settings(max_examples=30, deadline=None)
@given(
    st.floats(min_value=1.1, max_value=4.0),
    st.floats(min_value=1e-3, max_value=1e3),
)
def test_edr_fit_scale_invariant(beta, scale):
    j = np.arange(1, 51, dtype=float)
    assert edr_fit(scale * j ** -beta, (1, 50)) == pytest.approx(beta, abs=1e-9)


def test_mercer_coefficients_of_cosine():
    system = min_kernel_eigensystem(50)
    coefficients = mercer_coefficients(system, lambda x: math.cos(2 * math.pi * x), 50)
    # |f_j| = a / |a^2 - 4 pi^2| with a = (2j - 1) pi / 2, close to 1/a past j = 10
    j = np.arange(10, 51)
    fit = fit_loglog_slope(j, np.abs(coefficients[9:]))
    assert fit.slope == pytest.approx(-1.0, abs=0.1)


def test_ntk_sphere_beta():
    assert ntk_sphere_beta(3) == pytest.approx(1.5)
    assert ntk_sphere_beta(784) == pytest.approx(784 / 783)
    with pytest.raises(ValueError):
        ntk_sphere_beta(1)


def test_interpolation_smoothness():
    assert interpolation_smoothness(1.0, 2.0) == pytest.approx(0.5)


def test_fit_loglog_slope_needs_points():
    with pytest.raises(DegenerateFitError):
        fit_loglog_slope([1.0], [1.0])
    with pytest.raises(DegenerateFitError):
        fit_loglog_slope([2.0, 2.0], [1.0, 3.0])


def test_ntk_gram_spectrum_nonnegative(rng):
    from kernel_lab.core.kernels import uniform_sphere
    G = gram_matrix(KernelSpec.ntk_kernel(2), uniform_sphere(rng, 80, 3))
    spectrum = empirical_eigendecomposition(G)
    assert np.all(spectrum.values >= 0)
