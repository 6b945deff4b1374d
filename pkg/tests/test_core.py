import numpy as np
import pytest

import helpers
from attnopt import (
    Problem,
    gamma,
    grad_hessian,
    posterior_covariance,
    posterior_variance,
)
from attnopt.core import posterior_covariance_woodbury
from attnopt.errors import NonPDError


class TestProblemValidation:
    def test_rejects_asymmetric_sigma(self):
        with pytest.raises(NonPDError):
            Problem([[2.0, 0.5], [0.1, 1.0]], [1.0, 1.0])

    def test_symmetrizes_tiny_asymmetry(self):
        p = Problem([[2.0, 0.5 + 1e-13], [0.5, 1.0]], [1.0, 1.0])
        assert p.sigma[0, 1] == p.sigma[1, 0]

    def test_rejects_indefinite_sigma(self):
        with pytest.raises(NonPDError):
            Problem([[1.0, 2.0], [2.0, 1.0]], [1.0, 1.0])

    def test_rejects_nonpositive_weights(self):
        with pytest.raises(ValueError):
            Problem(np.eye(2), [1.0, 0.0])

    def test_rejects_single_source(self):
        with pytest.raises(ValueError):
            Problem([[1.0]], [1.0])

    def test_mu_defaults_to_zero(self):
        p = Problem(np.eye(3), np.ones(3))
        assert np.all(p.mu == 0.0) and p.mu.size == 3

    def test_rejects_negative_attention(self):
        p = Problem(np.eye(2), np.ones(2))
        with pytest.raises(ValueError):
            posterior_variance(p, [-0.1, 0.2])


class TestPosteriorCovariance:
    def test_example_reaches_identity(self):
        p = Problem([[6.0, 0.0], [0.0, 1.0]], [1.0, 1.0])
        cov = posterior_covariance(p, [5.0 / 6.0, 0.0])
        assert np.allclose(cov, np.eye(2), atol=1e-12)

    def test_zero_attention_returns_prior(self):
        rng = np.random.default_rng(5)
        p = helpers.random_spd_problem(rng, 4)
        assert np.allclose(posterior_covariance(p, np.zeros(4)), p.sigma, atol=1e-10)

    def test_correlated_example_matrix(self):
        p = Problem([[6.0, 2.0], [2.0, 1.0]], [1.0, 1.0])
        cov = posterior_covariance(p, [2.5, 0.0])
        assert np.allclose(cov, [[3 / 8, 1 / 8], [1 / 8, 3 / 8]], atol=1e-12)

    def test_two_forms_agree(self):
        rng = np.random.default_rng(7)
        for _ in range(60):
            k = int(rng.integers(2, 7))
            p = helpers.random_spd_problem(rng, k)
            q = rng.uniform(0.05, 5.0, size=k)
            a = posterior_covariance(p, q)
            b = posterior_covariance_woodbury(p, q)
            assert np.max(np.abs(a - b)) <= 1e-9 * (1.0 + np.max(np.abs(a)))

    def test_woodbury_requires_positive_attention(self):
        p = Problem(np.eye(2), np.ones(2))
        with pytest.raises(ValueError):
            posterior_covariance_woodbury(p, [1.0, 0.0])


class TestPosteriorVariance:
    def test_prior_variance(self):
        p = Problem([[6.0, 0.0], [0.0, 1.0]], [1.0, 1.0])
        assert posterior_variance(p, [0.0, 0.0]) == pytest.approx(7.0, abs=1e-12)

    def test_rational_form_example(self):
        p = Problem(**helpers.FAIL_K2)
        for q1, q2 in [(1.0, 0.0), (0.3, 0.7), (2.0, 5.0), (0.0, 0.0)]:
            expect = (2 + 16 * q1 + q2) / ((1 + q1) * (10 + q2) - 9)
            assert posterior_variance(p, [q1, q2]) == pytest.approx(expect, rel=1e-12)
        assert posterior_variance(p, [1.0, 0.0]) == pytest.approx(18 / 11, rel=1e-12)

    def test_unequal_weights_example(self):
        p = Problem([[6.0, 2.0], [2.0, 1.0]], [1.0, 2.0])
        assert posterior_variance(p, [1.5, 0.0]) == pytest.approx(3.0, rel=1e-12)

    def test_monotone_in_information(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            k = int(rng.integers(2, 7))
            p = helpers.random_spd_problem(rng, k)
            q = rng.uniform(0.0, 3.0, size=k)
            q2 = q + rng.uniform(0.0, 2.0, size=k)
            assert posterior_variance(p, q2) <= posterior_variance(p, q) + 1e-12

    def test_convexity(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            k = int(rng.integers(2, 7))
            p = helpers.random_spd_problem(rng, k)
            qa = rng.uniform(0.0, 4.0, size=k)
            qb = rng.uniform(0.0, 4.0, size=k)
            lam = rng.uniform()
            mix = lam * posterior_variance(p, qa) + (1 - lam) * posterior_variance(p, qb)
            assert posterior_variance(p, lam * qa + (1 - lam) * qb) <= mix + 1e-12


class TestGamma:
    def test_counterexample_values(self):
        p = Problem(**helpers.FAIL_K3)
        assert np.allclose(gamma(p, [1.0, 14.0, 0.0]), [-1.0, 1.0, 1.0], atol=1e-10)
        assert np.allclose(gamma(p, [0.0, 15.0, 20.0]), [-0.5, 0.5, 0.5], atol=1e-10)

    def test_prior_state_covariances(self):
        p = Problem([[6.0, 2.0], [2.0, 1.0]], [1.0, 2.0])
        assert np.allclose(gamma(p, [0.0, 0.0]), [10.0, 4.0], atol=1e-12)

    def test_matches_covariance_times_weights(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            k = int(rng.integers(2, 6))
            p = helpers.random_spd_problem(rng, k)
            q = rng.uniform(0.0, 3.0, size=k)
            assert np.allclose(
                gamma(p, q), posterior_covariance(p, q) @ p.alpha, atol=1e-10
            )


class TestDerivatives:
    def test_gradient_from_gamma_squares(self):
        p = Problem(**helpers.FAIL_K3)
        grad, _ = grad_hessian(p, [1.0, 14.0, 0.0])
        assert np.allclose(grad, [-1.0, -1.0, -1.0], atol=1e-10)

    def test_against_finite_differences(self):
        rng = np.random.default_rng(19)
        for _ in range(40):
            k = int(rng.integers(2, 6))
            p = helpers.random_spd_problem(rng, k)
            q = rng.uniform(0.1, 3.0, size=k)
            grad, hess = grad_hessian(p, q)
            fd_g = helpers.fd_gradient(p, q)
            fd_h = helpers.fd_hessian(p, q)
            assert np.max(np.abs(grad - fd_g)) <= 1e-4 * (1 + np.max(np.abs(grad)))
            assert np.max(np.abs(hess - fd_h)) <= 1e-4 * (1 + np.max(np.abs(hess)))

    def test_hessian_psd_and_gradient_nonpositive(self):
        rng = np.random.default_rng(23)
        for _ in range(30):
            k = int(rng.integers(2, 7))
            p = helpers.random_spd_problem(rng, k)
            grad, hess = grad_hessian(p, rng.uniform(0.0, 4.0, size=k))
            assert np.all(grad <= 0.0)
            assert np.min(np.linalg.eigvalsh(hess)) >= -1e-10

    def test_diagonal_prior_gives_diagonal_hessian(self):
        p = Problem(np.diag([2.0, 3.0, 0.5]), [1.0, 2.0, 0.7])
        _, hess = grad_hessian(p, [0.4, 0.0, 1.2])
        assert np.allclose(hess - np.diag(np.diag(hess)), 0.0, atol=1e-14)
