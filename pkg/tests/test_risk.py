import math

import numpy as np
import pytest

from kernel_lab.core.exceptions import ExperimentError, ModelError
from kernel_lab.core.models import ConditionalModel, Domain, FilterKind, RateRow, RateStudyResult
from kernel_lab.core.risk import (
    MonteCarlo,
    Quadrature,
    bayes_risk,
    excess_risk,
    l2_risk,
    nu_rule,
    quadrature_nodes,
    rate_study,
    theoretical_slope,
    zero_one_risk,
)
from kernel_lab.core.spectral import sign
from kernel_lab.data.synth import sample_classification, sphere_linear_model


def cosine(X):
    return np.cos(2.0 * np.pi * np.asarray(X, dtype=float).reshape(-1))


def test_excess_risk_closed_forms(cos_model):
    assert excess_risk(cos_model, cosine) == pytest.approx(0.0)
    assert excess_risk(cos_model, lambda X: -cosine(X)) == pytest.approx(2.0 / math.pi, abs=1e-6)
    assert excess_risk(cos_model, lambda X: np.ones(len(X))) == pytest.approx(1.0 / math.pi, abs=1e-6)


def test_excess_risk_monte_carlo(cos_model):
    risk = excess_risk(cos_model, lambda X: -cosine(X), MonteCarlo(n_test=200000, seed=3))
    assert risk == pytest.approx(2.0 / math.pi, abs=0.01)


@pytest.mark.parametrize(
    "classifier,seed",
    [
        (lambda X: np.ones(len(X)), 0),
        (lambda X: -cosine(X), 1),
        (lambda X: np.asarray(X, dtype=float).reshape(-1) - 0.4, 2),
        (lambda X: np.sin(2.0 * np.pi * np.asarray(X, dtype=float).reshape(-1)), 3),
    ],
)
def test_quadrature_and_monte_carlo_agree(cos_model, classifier, seed):
    n_test = 5000
    exact = excess_risk(cos_model, classifier, Quadrature(points=20001))
    sampled = excess_risk(cos_model, classifier, MonteCarlo(n_test=n_test, seed=seed))
    nodes, weights = quadrature_nodes(cos_model, 20001)
    f_star = cos_model.bayes_function(nodes)
    disagree = sign(classifier(nodes)) != sign(f_star)
    second_moment = float(np.sum(weights * f_star ** 2 * disagree))
    sigma = math.sqrt(max(second_moment - exact ** 2, 0.0) / n_test)
    assert abs(sampled - exact) <= 3.0 * sigma + 1e-12


def test_zero_one_risk_examples():
    X = np.linspace(0.0, 1.0, 10).reshape(-1, 1)
    Y = np.array([1.0, -1.0] * 5)
    assert zero_one_risk(lambda Z: Y, (X, Y)) == 0.0
    # f = 0 predicts +1 everywhere
    assert zero_one_risk(lambda Z: np.zeros(len(Z)), (X, Y)) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        zero_one_risk(lambda Z: Z, (np.empty((0, 1)), np.empty(0)))


def test_bayes_classifier_reaches_bayes_risk(cos_model):
    expected = (1.0 - 2.0 / math.pi) / 2.0
    assert bayes_risk(cos_model) == pytest.approx(expected, abs=1e-6)
    X, Y = sample_classification(cos_model, 200000, seed=4)
    assert zero_one_risk(cosine, (X, Y)) == pytest.approx(expected, abs=0.005)


def test_l2_risk_examples():
    assert l2_risk(cosine, cosine) == pytest.approx(0.0, abs=1e-12)
    assert l2_risk(lambda X: np.zeros(len(X)), cosine) == pytest.approx(0.5, abs=1e-6)
    assert l2_risk(lambda X: cosine(X) + 0.1, cosine) == pytest.approx(0.01, abs=1e-9)
    with pytest.raises(ValueError):
        l2_risk(cosine, cosine, quadrature_points=5)


def test_l2_risk_against_sphere_model():
    model = sphere_linear_model(2)
    # E[x_1^2] = 1/2 on the circle
    value = l2_risk(lambda X: np.zeros(len(X)), lambda X: X[:, 0], quadrature_points=1000, model=model)
    assert value == pytest.approx(0.5, abs=1e-9)


def test_quadrature_weights_sum_to_one(cos_model):
    nodes, weights = quadrature_nodes(cos_model, 101)
    assert nodes.shape == (101, 1)
    assert weights.sum() == pytest.approx(1.0)
    with pytest.raises(ValueError):
        Quadrature(points=3)


def test_quadrature_rejects_massless_model():
    model = ConditionalModel(
        name="empty",
        f_star=lambda X: np.zeros(len(X)),
        sampler=lambda rng, n: rng.uniform(size=(n, 1)),
        density=lambda X: np.zeros(len(X)),
        domain=Domain.UNIT_INTERVAL,
    )
    with pytest.raises(ValueError):
        quadrature_nodes(model, 11)


def test_excess_risk_is_risk_gap(cos_model):
    # L(f) - L(f*) equals E[|f*| 1{disagreement}] up to Monte Carlo error
    X, Y = sample_classification(cos_model, 200000, seed=9)
    shifted = lambda Z: cosine(Z) + 0.5
    gap = zero_one_risk(shifted, (X, Y)) - zero_one_risk(cosine, (X, Y))
    assert gap == pytest.approx(excess_risk(cos_model, shifted), abs=0.005)


def test_nu_rule_examples():
    assert nu_rule(1024, 0.5, 2.0) == pytest.approx(1024.0)
    assert nu_rule(256, 1.0, 2.0) == pytest.approx(256 ** (2.0 / 3.0))
    assert nu_rule(256, 1.0, 2.0) == pytest.approx(40.317, abs=1e-3)
    assert nu_rule(10 ** 6, 1e9, 2.0, constant=3.0) == pytest.approx(3.0, rel=1e-6)
    with pytest.raises(ValueError):
        nu_rule(0, 0.5, 2.0)


def test_theoretical_slope():
    assert theoretical_slope(0.5, 2.0) == pytest.approx(-0.25)
    assert theoretical_slope(1.0, 2.0) == pytest.approx(-1.0 / 3.0)


def test_exact_power_law_rows_give_exact_slope():
    from kernel_lab.core.risk import fit_loglog_slope
    sizes = [256, 512, 1024, 2048]
    fit = fit_loglog_slope(sizes, [0.7 * n ** -0.25 for n in sizes])
    assert fit.slope == pytest.approx(-0.25, abs=1e-12)
    assert math.exp(fit.intercept) == pytest.approx(0.7)


def test_rate_study_validation(cos_model, min_kernel):
    gf = FilterKind.gradient_flow()
    with pytest.raises(ValueError):
        rate_study(cos_model, min_kernel, gf, [64, 128], 0.5, 2.0, reps=3, base_seed=0)
    with pytest.raises(ValueError):
        rate_study(cos_model, min_kernel, gf, [16, 64, 128], 0.5, 2.0, reps=3, base_seed=0)
    with pytest.raises(ValueError):
        rate_study(cos_model, min_kernel, gf, [64, 128, 256], 0.5, 2.0, reps=2, base_seed=0)


def test_small_rate_study(cos_model, min_kernel):
    calls = []
    result = rate_study(
        cos_model, min_kernel, FilterKind.gradient_flow(), [256, 64, 128], 0.5, 2.0,
        reps=3, base_seed=1, quadrature_points=2001, progress=lambda n, rep: calls.append((n, rep)),
    )
    assert [row.n for row in result.rows] == [64, 128, 256]
    assert [row.nu_used for row in result.rows] == pytest.approx([64.0, 128.0, 256.0])
    assert all(0.0 <= row.mean_excess_risk <= 2.0 / math.pi for row in result.rows)
    assert result.theoretical_slope == pytest.approx(-0.25)
    assert sorted(calls) == [(n, r) for n in (64, 128, 256) for r in range(3)]


def test_rate_study_is_reproducible(cos_model, min_kernel):
    kwargs = dict(reps=3, base_seed=4, quadrature_points=501)
    gf = FilterKind.gradient_flow()
    first = rate_study(cos_model, min_kernel, gf, [32, 64, 128], 0.5, 2.0, **kwargs)
    second = rate_study(cos_model, min_kernel, gf, [32, 64, 128], 0.5, 2.0, threads=3, **kwargs)
    assert first.model_dump() == second.model_dump()


def test_rate_study_wraps_replicate_failures(min_kernel):
    broken = ConditionalModel(
        name="broken",
        f_star=lambda X: np.full(len(X), 2.0),
        sampler=lambda rng, n: rng.uniform(size=(n, 1)),
        density=lambda X: np.ones(len(X)),
        domain=Domain.UNIT_INTERVAL,
    )
    with pytest.raises(ExperimentError) as info:
        rate_study(broken, min_kernel, FilterKind.ridge(), [32, 64, 128], 0.5, 2.0, reps=3, base_seed=0)
    assert isinstance(info.value.__cause__, ModelError)
    assert "replicate" in str(info.value)


def test_rate_rows_must_be_sorted():
    rows = [RateRow(n=128, mean_excess_risk=0.1, std=0.0, nu_used=1.0), RateRow(n=64, mean_excess_risk=0.2, std=0.0, nu_used=1.0)]
    with pytest.raises(ValueError):
        RateStudyResult(rows=rows, fitted_slope=0.0, fitted_intercept=0.0, theoretical_slope=-0.25, s=0.5, beta=2.0)


@pytest.mark.slow
def test_rate_study_matches_theoretical_exponent(cos_model, min_kernel):
    result = rate_study(
        cos_model, min_kernel, FilterKind.gradient_flow(),
        [256, 512, 1024, 2048, 4096, 8192], 0.5, 2.0, reps=10, base_seed=1, threads=4,
    )
    assert result.fitted_slope == pytest.approx(-0.25, abs=0.1)
