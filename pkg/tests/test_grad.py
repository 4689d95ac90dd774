import numpy as np
import pytest

import reactlearn as rl
from reactlearn.errors import ContractViolationError, GradientEstimationError


def test_constant_objective_gives_exact_zero():
    cfg = rl.EstimatorConfig(samples=50, sigma=0.2)
    estimate = rl.estimate_gradient(lambda theta, rng: 3.7, np.zeros(4), cfg, rl.RngStream(0))
    assert np.all(estimate.vector == 0.0)
    assert estimate.evaluations_used == 51


def test_linear_objective_within_standard_errors():
    a = np.array([1.5, -2.0, 0.7, 3.0, -0.4])
    cfg = rl.EstimatorConfig(samples=10_000, sigma=0.2)
    estimate = rl.estimate_gradient(lambda theta, rng: a @ theta, np.zeros(5), cfg, rl.RngStream(1))
    # per-sample term is (a.u) u_i with variance |a|^2 + a_i^2
    se = np.sqrt((a @ a + a * a) / cfg.samples)
    assert np.all(np.abs(estimate.vector - a) <= 5 * se)


def test_quadratic_at_origin_is_near_zero():
    cfg = rl.EstimatorConfig(samples=10_000, sigma=0.2)
    estimate = rl.estimate_gradient(
        lambda theta, rng: theta @ theta, np.zeros(3), cfg, rl.RngStream(2)
    )
    # per-sample term is sigma * |u|^2 * u_i; bound its std by Monte Carlo
    gen = rl.RngStream(3).generator
    u = gen.standard_normal((100_000, 3))
    term_std = (np.sum(u * u, axis=1)[:, None] * u).std(axis=0)
    se = cfg.sigma * term_std / np.sqrt(cfg.samples)
    assert np.all(np.abs(estimate.vector) <= 5 * se)


def test_estimator_linearity_with_shared_perturbations():
    cfg = rl.EstimatorConfig(samples=200, sigma=0.5)
    theta = np.array([0.3, -1.2])
    f = lambda th, rng: float(th[0] ** 2 - th[1])
    g = lambda th, rng: float(np.sin(th[0]) + th[1] ** 2)
    fg = lambda th, rng: f(th, rng) + g(th, rng)
    est_f = rl.estimate_gradient(f, theta, cfg, rl.RngStream(4)).vector
    est_g = rl.estimate_gradient(g, theta, cfg, rl.RngStream(4)).vector
    est_fg = rl.estimate_gradient(fg, theta, cfg, rl.RngStream(4)).vector
    assert est_fg == pytest.approx(est_f + est_g)


def test_estimator_scaling_with_shared_perturbations():
    cfg = rl.EstimatorConfig(samples=200, sigma=0.5)
    theta = np.array([0.3, -1.2])
    f = lambda th, rng: float(th[0] ** 2 - th[1])
    kf = lambda th, rng: 3.0 * f(th, rng)
    est_f = rl.estimate_gradient(f, theta, cfg, rl.RngStream(5)).vector
    est_kf = rl.estimate_gradient(kf, theta, cfg, rl.RngStream(5)).vector
    assert est_kf == pytest.approx(3.0 * est_f)


def test_parallel_estimate_equals_sequential():
    cfg = rl.EstimatorConfig(samples=100, sigma=0.2)
    f = lambda th, rng: float(np.sum(th**2))
    theta = np.array([1.0, 2.0, 3.0])
    seq = rl.estimate_gradient(f, theta, cfg, rl.RngStream(6)).vector
    par = rl.estimate_gradient(f, theta, cfg, rl.RngStream(6), jobs=4).vector
    assert np.array_equal(seq, par)


def test_non_finite_objective_raises_with_sample_id():
    cfg = rl.EstimatorConfig(samples=10, sigma=0.2)

    def bad(theta, rng):
        return float("nan") if np.any(theta != 0) else 0.0

    with pytest.raises(GradientEstimationError, match="sample"):
        rl.estimate_gradient(bad, np.zeros(2), cfg, rl.RngStream(7))


def test_config_validation():
    with pytest.raises(ContractViolationError):
        rl.EstimatorConfig(samples=0, sigma=0.2)
    with pytest.raises(ContractViolationError):
        rl.EstimatorConfig(samples=10, sigma=0.0)


def test_oracle_quadratic():
    f = lambda th, rng: float(th @ th)
    grad = rl.finite_difference_oracle(f, np.array([1.0, 2.0]), 1e-4)
    assert grad == pytest.approx([2.0, 4.0], abs=1e-6)


def test_oracle_constant_and_linear():
    assert np.all(rl.finite_difference_oracle(lambda th, rng: 5.0, np.ones(3), 0.1) == 0.0)
    a = np.array([2.0, -3.0])
    grad = rl.finite_difference_oracle(lambda th, rng: float(a @ th), np.zeros(2), 0.5)
    assert grad == pytest.approx(a, rel=1e-12)


def test_estimator_matches_oracle_on_quadratic():
    gen = rl.RngStream(8).generator
    m = gen.standard_normal((4, 4))
    a = m.T @ m + 0.5 * np.eye(4)
    b = gen.standard_normal(4)
    f = lambda th, rng: float(0.5 * th @ a @ th + b @ th)
    theta = gen.standard_normal(4)
    cfg = rl.EstimatorConfig(samples=50_000, sigma=0.2)
    estimate = rl.estimate_gradient(f, theta, cfg, rl.RngStream(9)).vector
    oracle = rl.finite_difference_oracle(f, theta, 1e-4)
    assert estimate == pytest.approx(oracle, rel=0.05, abs=0.05)
