"""Backend lockstep: the compiled extension must reproduce the pure-NumPy
kernels (and both must satisfy the kernels' mathematical contracts)."""

import numpy as np
import pytest

import helpers
from attnopt import _kernels
from attnopt._kernels import pure

compiled = pytest.importorskip(
    "attnopt._kernels._speedups", reason="compiled extension not built"
)


def _random_inputs(rng, k):
    p = helpers.random_spd_problem(rng, k)
    q = rng.uniform(0.0, 3.0, size=k)
    return p.precision, q, p.alpha


class TestGammaValue:
    def test_backends_agree(self):
        rng = np.random.default_rng(149)
        for _ in range(50):
            k = int(rng.integers(2, 9))
            prec, q, alpha = _random_inputs(rng, k)
            g_a, v_a = pure.gamma_value(prec, q, alpha)
            g_b, v_b = compiled.gamma_value(prec, q, alpha)
            assert np.allclose(g_a, g_b, atol=1e-12, rtol=1e-12)
            assert v_a == pytest.approx(v_b, rel=1e-12)

    def test_compiled_rejects_indefinite(self):
        bad = np.array([[1.0, 2.0], [2.0, 1.0]])
        with pytest.raises(np.linalg.LinAlgError):
            compiled.gamma_value(bad, np.zeros(2), np.ones(2))


class TestProjection:
    @pytest.mark.parametrize("impl", [pure, compiled])
    def test_feasibility_and_optimality(self, impl):
        rng = np.random.default_rng(151)
        for _ in range(60):
            k = int(rng.integers(2, 9))
            v = rng.normal(scale=3.0, size=k)
            floor = rng.uniform(0.0, 0.3, size=k)
            budget = float(np.sum(floor) + rng.uniform(0.1, 5.0))
            w = impl.project_budget(v, floor, budget)
            assert np.all(w >= floor - 1e-12)
            assert np.sum(w) == pytest.approx(budget, abs=1e-10)
            # projection of a feasible point is itself
            again = impl.project_budget(w, floor, budget)
            assert np.allclose(w, again, atol=1e-10)

    def test_backends_agree(self):
        rng = np.random.default_rng(157)
        for _ in range(60):
            k = int(rng.integers(2, 9))
            v = rng.normal(scale=2.0, size=k)
            floor = rng.uniform(0.0, 0.5, size=k)
            budget = float(np.sum(floor) + rng.uniform(0.0, 4.0) + 0.05)
            a = pure.project_budget(v, floor, budget)
            b = compiled.project_budget(v, floor, budget)
            assert np.allclose(a, b, atol=1e-12)


class TestPgd:
    def test_backends_reach_same_optimum(self):
        rng = np.random.default_rng(163)
        for _ in range(20):
            k = int(rng.integers(2, 7))
            prec, _, alpha = _random_inputs(rng, k)
            floor = np.zeros(k)
            budget = float(rng.uniform(0.5, 6.0))
            q0 = np.full(k, budget / k)
            q_a, _, _ = pure.pgd_minimize(prec, alpha, floor, budget, q0, 5000, 1e-10)
            q_b, _, _ = compiled.pgd_minimize(prec, alpha, floor, budget, q0, 5000, 1e-10)
            assert np.allclose(q_a, q_b, atol=1e-7)

    def test_active_backend_is_exported(self):
        assert _kernels.backend() in ("compiled", "pure")
        assert _kernels.pgd_minimize is not None


class TestDpSweep:
    def test_backends_agree(self):
        rng = np.random.default_rng(167)
        y = np.linspace(-8.0, 8.0, 161)
        sig0 = 5.0
        vs = np.linspace(0.0, sig0 * 0.99, 400)
        times = vs / (sig0 - vs) * 3.0
        sigma2 = sig0 - vs
        for cost in (0.01, 0.1, 1.0):
            a = pure.dp_sweep(y, times, sigma2, cost)
            b = compiled.dp_sweep(y, times, sigma2, cost)
            assert np.allclose(a, b, atol=1e-10, equal_nan=True)

    def test_boundary_monotone_in_cost(self):
        y = np.linspace(-8.0, 8.0, 321)
        sig0 = 5.0
        vs = np.linspace(0.0, sig0 * 0.999, 2000)
        times = vs / (sig0 - vs) * 3.0
        sigma2 = sig0 - vs
        cheap = _kernels.dp_sweep(y, times, sigma2, 0.02)
        dear = _kernels.dp_sweep(y, times, sigma2, 0.2)
        assert cheap[0] > dear[0]
