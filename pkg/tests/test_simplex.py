"""LP kernel: hand-checked cases, a HiGHS cross-check, and backend agreement."""

import numpy as np
import pytest

import hybzono.simplex as simplex
from hybzono.errors import DimensionError, InvalidInputError
from hybzono.simplex import LpProblem, lp_solve, tighten_box


def box_problem(c, A, b, n):
    return LpProblem(c, A, b, -np.ones(n), np.ones(n))


class TestExamples:
    def test_minimize_over_interval(self):
        res = lp_solve(box_problem([1.0], np.zeros((0, 1)), [], 1))
        assert res.status == "optimal"
        assert res.value == pytest.approx(-1.0, abs=1e-9)

    def test_fixed_outside_bounds_infeasible(self):
        res = lp_solve(box_problem([0.0], [[1.0]], [2.0], 1))
        assert res.status == "infeasible"

    def test_diagonal_constraint_vertex(self):
        res = lp_solve(box_problem([1.0, 1.0], [[1.0, -1.0]], [0.0], 2))
        assert res.status == "optimal"
        assert res.value == pytest.approx(-2.0, abs=1e-9)
        np.testing.assert_allclose(res.point, [-1.0, -1.0], atol=1e-9)

    def test_optimal_point_feasible(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            m, n = 4, 9
            A = rng.normal(size=(m, n))
            x0 = rng.uniform(-1, 1, n)
            b = A @ x0
            res = lp_solve(box_problem(rng.normal(size=n), A, b, n))
            assert res.status == "optimal"
            assert np.max(np.abs(A @ res.point - b)) < 1e-7
            assert np.all(res.point >= -1 - 1e-9)
            assert np.all(res.point <= 1 + 1e-9)

    def test_validation(self):
        with pytest.raises(InvalidInputError):
            LpProblem([1.0], np.zeros((0, 1)), [], [-np.inf], [1.0])
        with pytest.raises(InvalidInputError):
            LpProblem([1.0], np.zeros((0, 1)), [], [2.0], [1.0])
        with pytest.raises(DimensionError):
            LpProblem([1.0, 2.0], [[1.0]], [0.0], [-1, -1], [1, 1])


class TestAgainstHiGHS:
    def test_values_match_scipy(self):
        scipy_opt = pytest.importorskip("scipy.optimize")
        rng = np.random.default_rng(42)
        for _ in range(40):
            m = int(rng.integers(0, 5))
            n = int(rng.integers(1, 10))
            A = rng.normal(size=(m, n))
            x0 = rng.uniform(-1, 1, n)
            b = A @ x0
            c = rng.normal(size=n)
            mine = lp_solve(box_problem(c, A, b, n))
            ref = scipy_opt.linprog(c, A_eq=A if m else None,
                                    b_eq=b if m else None,
                                    bounds=[(-1, 1)] * n, method="highs")
            assert mine.status == "optimal"
            assert ref.status == 0
            assert mine.value == pytest.approx(ref.fun, abs=1e-7)

    def test_infeasible_agreement(self):
        scipy_opt = pytest.importorskip("scipy.optimize")
        rng = np.random.default_rng(3)
        seen_infeasible = 0
        for _ in range(40):
            m, n = 3, 4
            A = rng.normal(size=(m, n))
            b = rng.normal(size=m) * 3.0
            mine = lp_solve(box_problem(np.zeros(n), A, b, n))
            ref = scipy_opt.linprog(np.zeros(n), A_eq=A, b_eq=b,
                                    bounds=[(-1, 1)] * n, method="highs")
            assert (mine.status == "optimal") == (ref.status == 0)
            if mine.status == "infeasible":
                seen_infeasible += 1
        assert seen_infeasible > 5


class TestDeterminism:
    def test_repeat_solves_identical(self):
        rng = np.random.default_rng(0)
        A = rng.normal(size=(3, 8))
        b = A @ rng.uniform(-1, 1, 8)
        c = rng.normal(size=8)
        p = box_problem(c, A, b, 8)
        r1 = lp_solve(p)
        r2 = lp_solve(p)
        assert r1.value == r2.value
        assert np.array_equal(r1.point, r2.point)


class TestBackendAgreement:
    """The compiled kernel and the pure-Python source must agree."""

    def test_compiled_vs_plain(self, monkeypatch):
        if not simplex.NUMBA_ENABLED:
            pytest.skip("numba path disabled; single backend active")
        rng = np.random.default_rng(11)
        cases = []
        for _ in range(25):
            m = int(rng.integers(0, 4))
            n = int(rng.integers(1, 8))
            A = rng.normal(size=(m, n))
            if rng.random() < 0.7:
                b = A @ rng.uniform(-1, 1, n)
            else:
                b = rng.normal(size=m)
            cases.append((rng.normal(size=n), A, b,
                          -np.ones(n), np.ones(n)))
        compiled = [simplex._simplex(A, b, c, lo, hi, simplex.FEAS_TOL,
                                     simplex.PIVOT_TOL, 10000)
                    for (c, A, b, lo, hi) in cases]
        monkeypatch.setattr(simplex, "_pivot_loop", simplex._pivot_loop_impl)
        plain = [simplex._simplex_impl(A, b, c, lo, hi, simplex.FEAS_TOL,
                                       simplex.PIVOT_TOL, 10000)
                 for (c, A, b, lo, hi) in cases]
        for (cs, xs, _), (cp, xp, _), (c, A, b, lo, hi) in zip(
                compiled, plain, cases):
            assert cs == cp
            if cs == 0:
                assert float(c @ xs) == pytest.approx(float(c @ xp), abs=1e-9)

    def test_tighten_backends_agree(self, monkeypatch):
        if not simplex.NUMBA_ENABLED:
            pytest.skip("numba path disabled; single backend active")
        rng = np.random.default_rng(5)
        for _ in range(20):
            m, n = 2, 5
            A = rng.normal(size=(m, n))
            b = A @ rng.uniform(-1, 1, n)
            lo, hi = -np.ones(n), np.ones(n)
            ok1, lo1, hi1 = simplex._tighten(A, b, lo, hi, 2, simplex.FEAS_TOL)
            ok2, lo2, hi2 = simplex._tighten_impl(A, b, lo, hi, 2,
                                                  simplex.FEAS_TOL)
            assert ok1 == ok2
            np.testing.assert_allclose(lo1, lo2, atol=1e-12)
            np.testing.assert_allclose(hi1, hi2, atol=1e-12)


class TestTighten:
    def test_never_cuts_feasible_points(self):
        rng = np.random.default_rng(9)
        for _ in range(30):
            m, n = 2, 6
            A = rng.normal(size=(m, n))
            x0 = rng.uniform(-1, 1, n)
            b = A @ x0
            ok, lo, hi = tighten_box(A, b, -np.ones(n), np.ones(n))
            assert ok
            assert np.all(x0 >= lo - 1e-9)
            assert np.all(x0 <= hi + 1e-9)

    def test_detects_obvious_infeasibility(self):
        A = np.array([[1.0, 1.0]])
        b = np.array([5.0])
        ok, _, _ = tighten_box(A, b, -np.ones(2), np.ones(2))
        assert not ok
