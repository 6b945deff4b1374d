import numpy as np
import pytest

import helpers
from attnopt import Problem, constrained_t_optimal
from attnopt.errors import UnsupportedPriorError
from attnopt.manipulation import catch_up_time, compare_cumulative, manipulated_path

EXAMPLE = Problem(**helpers.DOM_K3)
T_FORCED = 0.1
STAGE2_START = 7.0 / 15.0
CATCH_UP = 0.8


class TestManipulatedPath:
    def test_during_manipulation(self):
        assert np.allclose(manipulated_path(EXAMPLE, T_FORCED, 0.06), [0.06, 0, 0])

    def test_resumes_with_third_source(self):
        for t in (0.2, 0.35, STAGE2_START):
            q = manipulated_path(EXAMPLE, T_FORCED, t)
            assert np.allclose(q, [T_FORCED, 0.0, t - T_FORCED], atol=1e-8)

    def test_second_stage_ratio(self):
        q_lo = manipulated_path(EXAMPLE, T_FORCED, STAGE2_START)
        q_hi = manipulated_path(EXAMPLE, T_FORCED, CATCH_UP)
        step = (q_hi - q_lo) / (CATCH_UP - STAGE2_START)
        assert np.allclose(step, [0.0, 0.3, 0.7], atol=1e-7)

    def test_equal_thirds_after_catch_up(self):
        q1 = manipulated_path(EXAMPLE, T_FORCED, 0.8)
        q2 = manipulated_path(EXAMPLE, T_FORCED, 1.1)
        assert np.allclose((q2 - q1) / 0.3, np.full(3, 1 / 3), atol=1e-7)

    def test_matches_constrained_oracle(self):
        floor = np.array([T_FORCED, 0.0, 0.0])
        for t in (0.3, 0.6, 0.75, 1.4):
            a = manipulated_path(EXAMPLE, T_FORCED, t)
            b = constrained_t_optimal(EXAMPLE, t, floor).q_star.q
            assert np.allclose(a, b, atol=1e-7)

    def test_unsupported_prior_rejected(self):
        with pytest.raises(UnsupportedPriorError):
            manipulated_path(Problem(**helpers.FAIL_K3), 0.5, 1.0)


class TestCatchUpTime:
    def test_example_value(self):
        assert catch_up_time(EXAMPLE, T_FORCED) == pytest.approx(CATCH_UP, abs=1e-10)

    def test_zero_duration(self):
        assert catch_up_time(EXAMPLE, 0.0) == 0.0

    def test_front_loaded_source_catches_immediately(self):
        p = Problem([[6.0, 0.0], [0.0, 1.0]], [1.0, 1.0])
        assert catch_up_time(p, 0.5) == pytest.approx(0.5, abs=1e-12)


class TestCumulativeComparison:
    def test_example_report(self):
        grid = np.linspace(0.02, 1.4, 70)
        rep = compare_cumulative(EXAMPLE, T_FORCED, grid)
        assert rep.T_star == pytest.approx(CATCH_UP, abs=1e-9)
        inside = (grid > T_FORCED + 1e-9) & (grid < CATCH_UP - 1e-9)
        assert np.all(rep.diffs[inside, 0] > 1e-9)
        after = grid >= CATCH_UP
        assert np.max(np.abs(rep.diffs[after, 0])) <= 1e-9
        # complementarity pushes attention TOWARD source 2 between the
        # manipulated second stage and the catch-up time
        window = (grid > STAGE2_START + 1e-6) & (grid < CATCH_UP - 1e-6)
        assert np.all(rep.diffs[window, 1] > 1e-9)
        assert np.max(np.abs(rep.diffs.sum(axis=1))) <= 1e-10

    def test_zero_duration_all_zero(self):
        rep = compare_cumulative(EXAMPLE, 0.0, np.linspace(0.1, 1.0, 5))
        assert rep.T_star == 0.0
        assert np.all(rep.diffs == 0.0)

    def test_substitutes_lose_everywhere_else(self):
        rng = np.random.default_rng(137)
        grid = np.linspace(0.05, 6.0, 40)
        for _ in range(10):
            k = int(rng.integers(2, 6))
            p = helpers.substitutes_problem(rng, k)
            rep = compare_cumulative(p, 0.3, grid)
            assert np.max(rep.diffs[:, 1:]) <= 1e-9

    def test_two_source_case_always_decreases_other(self):
        p = Problem([[2.0, 1.0], [1.0, 2.0]], [1.0, 1.0])
        rep = compare_cumulative(p, 0.3, np.linspace(0.05, 4.0, 40))
        assert np.max(rep.diffs[:, 1]) <= 1e-9
