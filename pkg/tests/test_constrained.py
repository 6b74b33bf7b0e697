import io
import math
from contextlib import redirect_stdout

import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st

from cemethod.constrained import (BARRIER_EPS, SHIFT_FLOOR, MultiplierState, augmented_objective,
                                  ce_minimize_constrained, constraint_values,
                                  constraint_violation, shift_vector, update_multipliers)
from cemethod.core import Constraints, ProblemError, ProblemSpec, default_settings
from cemethod.stats import RngStream


def scalar_problem(F, H=None, G=None, vectorized=True):
    return ProblemSpec(F, [-3.0], [3.0], Constraints(equality=H, inequality=G),
                       is_vectorized=vectorized)


def toy_problem():
    return ProblemSpec(lambda X: np.sum(X**2, axis=1), [-2.0, -2.0], [2.0, 2.0],
                       Constraints(equality=lambda X: X[:, 0] + X[:, 1] - 1.0), is_vectorized=True)


class TestShift:
    def test_ratio(self):
        assert np.array_equal(shift_vector(MultiplierState([], [1.0], 1.0)), [1.0])

    def test_floor(self):
        assert np.array_equal(shift_vector(MultiplierState([], [0.0], 10.0)), [1e-8])
        assert SHIFT_FLOOR == 1e-8

    def test_componentwise(self):
        assert np.array_equal(shift_vector(MultiplierState([], [4.0, 2.0], 2.0)), [2.0, 1.0])


class TestAugmentedObjective:
    def test_quadratic_penalty(self):
        p = scalar_problem(lambda X: X[:, 0] ** 2, H=lambda X: X[:, 0] - 1.0)
        f = augmented_objective(p, MultiplierState([0.0], [], 2.0))
        assert f(np.array([[0.0]]))[0] == 1.0

    def test_barrier_zero_at_unit_gap(self):
        p = scalar_problem(lambda X: 0.0 * X[:, 0], G=lambda X: 0.0 * X[:, 0])
        f = augmented_objective(p, MultiplierState([], [1.0], 1.0))
        assert f(np.array([[0.3]]))[0] == 0.0

    def test_barrier_log_e(self):
        p = scalar_problem(lambda X: 0.0 * X[:, 0], G=lambda X: np.full(len(X), 1.0 - math.e))
        f = augmented_objective(p, MultiplierState([], [1.0], 1.0))
        assert f(np.array([[0.0]]))[0] == pytest.approx(-1.0, abs=1e-15)

    def test_single_point_callable(self):
        p = scalar_problem(lambda x: x[0] ** 2, H=lambda x: x[0] - 1.0, vectorized=False)
        f = augmented_objective(p, MultiplierState([0.5], [], 2.0))
        # 0 + 0.5*(-1) + 0.5*2*1
        assert f(np.array([0.0])) == 0.5

    def test_reduces_to_objective(self):
        p = ProblemSpec(lambda X: np.sin(X[:, 0]) * X[:, 1], [-1, -1], [1, 1], is_vectorized=True)
        f = augmented_objective(p, MultiplierState([], [], 10.0))
        X = np.random.default_rng(0).uniform(-1, 1, (50, 2))
        assert np.array_equal(f(X), p.objective(X))

    def test_zero_multipliers_feasible_region_is_objective(self):
        p = scalar_problem(lambda X: X[:, 0] ** 2, G=lambda X: X[:, 0] - 2.0)
        f = augmented_objective(p, MultiplierState([], [0.0], 10.0))
        X = np.linspace(-3, 1.9, 30)[:, None]
        assert np.array_equal(f(X), X[:, 0] ** 2)

    @given(st.floats(-1e6, 1e6), st.floats(0.0, 100.0), st.floats(1e-3, 1e8))
    def test_finite_everywhere(self, g, lam, nu):
        p = scalar_problem(lambda X: 0.0 * X[:, 0], G=lambda X: np.full(len(X), g))
        f = augmented_objective(p, MultiplierState([], [lam], nu))
        assert np.isfinite(f(np.array([[0.0]]))[0])

    def test_barrier_continuous_and_monotone(self):
        p = scalar_problem(lambda X: 0.0 * X[:, 0], G=lambda X: X[:, 0])
        m = MultiplierState([], [1.0], 1.0)  # s = 1
        f = augmented_objective(p, m)
        thr = 1.0 - BARRIER_EPS
        left = f(np.array([[thr - 1e-12]]))[0]
        right = f(np.array([[thr + 1e-12]]))[0]
        assert abs(left - right) < 1e-5
        g = np.linspace(-2, 3, 2001)[:, None]
        vals = f(g)
        assert np.all(np.diff(vals) > 0)


class TestUpdate:
    def test_equality(self):
        m = update_multipliers(MultiplierState([0.0], [], 2.0), [0.5], [], 10, 1e8)
        assert m.lambda_e[0] == 1.0 and m.nu == 20.0 and m.outer_iter == 1

    def test_inequality(self):
        m = update_multipliers(MultiplierState([], [1.0], 2.0), [], [-0.25], 10, 1e8)
        assert m.lambda_i[0] == 0.5

    def test_clamp(self):
        m = update_multipliers(MultiplierState([], [0.1], 2.0), [], [-1.0], 10, 1e8)
        assert m.lambda_i[0] == 0.0

    def test_cap(self):
        m = update_multipliers(MultiplierState([], [], 5e7), [], [], 10, 1e8)
        assert m.nu == 1e8

    def test_non_finite(self):
        with pytest.raises(ValueError):
            update_multipliers(MultiplierState([0.0], [], 2.0), [np.nan], [], 10, 1e8)

    @given(st.lists(st.tuples(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3)), min_size=1, max_size=30),
           st.floats(1.01, 100.0), st.floats(1.0, 1e10))
    def test_sequences(self, steps, factor, cap):
        m = MultiplierState([0.0], [1.0], 1.0)
        for h, g in steps:
            nu_before = m.nu
            m = update_multipliers(m, [h], [g], factor, cap)
            assert m.lambda_i[0] >= 0.0
            assert m.nu >= nu_before
            assert m.nu <= max(cap, 1.0)


class TestViolation:
    def test_feasible(self):
        assert constraint_violation([0.0], [-1.0]) == 0.0

    def test_equality_max(self):
        assert constraint_violation([0.2, -0.1], []) == 0.2

    def test_positive_part(self):
        assert constraint_violation([], [0.05, -3.0]) == 0.05

    def test_empty(self):
        assert constraint_violation([], []) == 0.0


class TestSolver:
    def test_toy_equality(self):
        p = toy_problem()
        res = ce_minimize_constrained(p, [0.0, 0.0], [2.0, 2.0], default_settings(2), RngStream(0))
        assert np.allclose(res.xopt, [0.5, 0.5], atol=5e-3)
        assert res.fopt == pytest.approx(0.5, abs=5e-3)
        h, g = constraint_values(p, res.xopt)
        assert constraint_violation(h, g) <= 1e-3
        assert res.convergence_status

    def test_inactive_constraint_one_outer_iteration(self):
        p = ProblemSpec(lambda X: np.sum((X - 0.5) ** 2, axis=1), [-2.0, -2.0], [2.0, 2.0],
                        Constraints(inequality=lambda X: X[:, 0] - 1.5), is_vectorized=True)
        zero = MultiplierState([], [0.0], 10.0)
        s = default_settings(2)
        one = ce_minimize_constrained(p, [0, 0], [1, 1], s, RngStream(2), max_outer=1, multipliers=zero)
        full = ce_minimize_constrained(p, [0, 0], [1, 1], s, RngStream(2), multipliers=zero)
        assert full.history == one.history and full.convergence_status
        assert np.allclose(full.xopt, [0.5, 0.5], atol=1e-3)

    def test_feasible_when_converged(self):
        p = toy_problem()
        for seed in range(3):
            res = ce_minimize_constrained(p, [0.0, 0.0], [2.0, 2.0], default_settings(2).replace(max_iter=600),
                                          RngStream(seed))
            if res.convergence_status:
                h, g = constraint_values(p, res.xopt)
                assert constraint_violation(h, g) <= 1e-3
            assert res.exit_flag in (1, 4, 5, 6) or not res.convergence_status

    def test_budgets_are_global(self):
        p = toy_problem()
        res = ce_minimize_constrained(p, [0.0, 0.0], [2.0, 2.0], default_settings(2).replace(max_iter=30),
                                      RngStream(0))
        assert res.niter == 30 and res.exit_flag == 1 and not res.convergence_status
        res = ce_minimize_constrained(p, [0.0, 0.0], [2.0, 2.0],
                                      default_settings(2).replace(max_fcount=2500), RngStream(0))
        assert res.fcount == 2500 and res.exit_flag == 3

    def test_history_numbering_and_fcount(self):
        res = ce_minimize_constrained(toy_problem(), [0.0, 0.0], [2.0, 2.0], default_settings(2), RngStream(1))
        assert [r.iter for r in res.history] == list(range(1, res.niter + 1))
        assert np.all(np.diff(res.column("fcount")) == 100)
        assert np.all(res.column("error_c") >= 0)

    def test_deterministic_any_worker_count(self):
        p = ProblemSpec(lambda x: float(x @ x), [-2.0, -2.0], [2.0, 2.0],
                        Constraints(equality=lambda x: x[0] + x[1] - 1.0))
        s = default_settings(2).replace(max_iter=80)
        a = ce_minimize_constrained(p, [0.0, 0.0], [2.0, 2.0], s, RngStream(5), workers=1)
        b = ce_minimize_constrained(p, [0.0, 0.0], [2.0, 2.0], s, RngStream(5), workers=3)
        assert a.history == b.history and a.xopt.tobytes() == b.xopt.tobytes()

    def test_requires_constraints(self):
        p = ProblemSpec(lambda X: X[:, 0], [0.0], [1.0], is_vectorized=True)
        with pytest.raises(ProblemError):
            ce_minimize_constrained(p, [0.5], [0.1])

    def test_verbose_appends_violation_and_penalty(self):
        buf = io.StringIO()
        s = default_settings(2).replace(max_iter=5, verbose=True)
        with redirect_stdout(buf):
            res = ce_minimize_constrained(toy_problem(), [0.0, 0.0], [2.0, 2.0], s, RngStream(0))
        cols = buf.getvalue().strip().splitlines()[-1].split()
        assert len(cols) == 7
        assert float(cols[5]) == pytest.approx(res.history[-1].error_c, rel=1e-4)
        assert float(cols[6]) == 10.0


@given(st.integers(0, 2**31), st.floats(-1.0, 1.0))
@hsettings(max_examples=10, deadline=None)
def test_reported_point_feasible_on_success(seed, shift):
    p = ProblemSpec(lambda X: np.sum((X - shift) ** 2, axis=1), [-2.0, -2.0], [2.0, 2.0],
                    Constraints(inequality=lambda X: X[:, 0] + X[:, 1] - 0.5), is_vectorized=True)
    res = ce_minimize_constrained(p, [0.0, 0.0], [1.0, 1.0], default_settings(2).replace(max_iter=400),
                                  RngStream(seed))
    assert p.contains(res.xopt)
    if res.convergence_status:
        h, g = constraint_values(p, res.xopt)
        assert constraint_violation(h, g) <= 1e-3
        assert res.fopt == p.objective(res.xopt[None, :])[0]
