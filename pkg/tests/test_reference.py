"""Golden algebraic solutions: values, branch maps, constants."""

import math

import numpy as np
import pytest

import taudet as td
from taudet import reference
from taudet.errors import DomainError
from taudet.reference import example1, example2, example3


class TestExample1:
    def test_small_t_limit(self):
        assert example1(0.25, 1e-9) == pytest.approx(1.0, abs=1e-12)

    def test_series_coefficient(self):
        # tau = 1 - (1-4 th^2)/128 t^2 + O(t^3); the t^3 term equals the
        # t^2 term in magnitude, so at t = 1e-4 the bound 1e-12 holds
        t = 1e-4
        assert example1(0.0, t) == pytest.approx(1.0 - t * t / 128.0, abs=1e-12)
        # at t = 1e-3 the cubic term contributes ~8e-12
        t = 1e-3
        assert example1(0.0, t) == pytest.approx(1.0 - t * t / 128.0, abs=2e-11)

    def test_t_near_one(self):
        # matches C (1-t)^(3/64) within the O(sqrt(1-t)) band at t = 0.99
        th = 0.25
        t = 0.99
        lead = 2.0 ** (3.0 / 16.0) * (1.0 - t) ** (3.0 / 64.0)
        assert abs(example1(th, t) / lead - 1.0) <= 0.25 * math.sqrt(1.0 - t) * 3

    def test_domain(self):
        with pytest.raises(DomainError):
            example1(0.6, 0.5)
        with pytest.raises(DomainError):
            example1(0.25, 1.5)


class TestExample2:
    def test_small_t_series(self):
        t = 1e-2
        assert example2(t) == pytest.approx(1.0 - 16.0 / 19683.0 * t ** 3, abs=1e-10)

    def test_t_near_one(self):
        t = 0.999
        lead = 3.0 ** (15 / 8) * 2.0 ** (-17 / 6) * (1.0 - t) ** (1.0 / 36.0)
        # branch-correction band O((1-t)^(1/3))
        assert abs(example2(t) / lead - 1.0) <= 3.0 * (1.0 - t) ** (1.0 / 3.0)

    def test_branch_map_monotone(self):
        s = np.linspace(2.0 + 1e-6, 50.0, 100)
        t = np.array([reference._ex2_t(v) for v in s])
        assert np.all(np.diff(t) > 0)
        assert 0.0 < t[0] < t[-1] < 1.0

    def test_inversion_round_trip(self):
        for t in (1e-3, 0.3, 0.9, 0.999):
            s = reference._ex2_s_of_t(t)
            assert reference._ex2_t(s) == pytest.approx(t, rel=1e-12)


class TestExample3:
    def test_small_t_series(self):
        # the cubic term has coefficient ~0.007, so 1e-10 needs t = 1e-3
        t = 1e-3
        assert example3(t) == pytest.approx(1.0 + 15.0 / 2048.0 * t ** 2, abs=1e-10)
        t = 1e-2
        assert example3(t) == pytest.approx(1.0 + 15.0 / 2048.0 * t ** 2, abs=1e-8)

    def test_branch_map_monotone(self):
        s = np.linspace(1e-6, 1.0 - 1e-6, 100)
        t = np.array([reference._ex3_t(v) for v in s])
        assert np.all(np.diff(t) > 0)

    def test_inversion_round_trip(self):
        for t in (1e-3, 0.5, 0.99):
            s = reference._ex3_s_of_t(t)
            assert reference._ex3_t(s) == pytest.approx(t, rel=1e-12)

    def test_t_near_one_constant(self):
        t = 0.9999
        lead = 2.0 ** (25 / 18) * 3.0 ** (-15 / 16) * (1.0 - t) ** (-5.0 / 144.0)
        assert abs(example3(t) / lead - 1.0) <= 3.0 * (1.0 - t) ** (1.0 / 3.0)


class TestGoldenData:
    @pytest.mark.parametrize("name,theta1", [("ex1", 0.0), ("ex1", 0.25),
                                             ("ex2", None), ("ex3", None)])
    def test_kappa_and_c(self, name, theta1):
        sol = td.get_solution(name, theta1=theta1) if theta1 is not None else td.get_solution(name)
        assert td.kappa(sol.params) == pytest.approx(sol.golden_kappa, abs=1e-12)
        assert td.conjectured_C(sol.params) == pytest.approx(sol.golden_C, abs=1e-10)

    def test_tau_tends_to_one(self):
        for name in ("ex2", "ex3"):
            sol = td.get_solution(name)
            assert sol.tau(1e-6) == pytest.approx(1.0, abs=1e-11)

    @pytest.mark.parametrize("name", ["ex1", "ex2", "ex3"])
    def test_sigma_form_residual(self, name):
        # t in [0.1, 0.99]: closer to 1 the rational-branch inversion
        # roundoff (~1e-13 in sigma) is amplified by the FD second
        # derivative beyond the 1e-8 target
        sol = td.get_solution(name, theta1=0.25) if name == "ex1" else td.get_solution(name)
        grid = 1.0 - np.geomspace(1e-2, 0.9, 400)[::-1]
        curve = reference.sigma_curve_from_solution(sol, grid)
        stats = td.sigma_form_residual(curve, "pvi", sol.params.theta)
        assert stats.max_scaled <= 1e-8

    def test_log_deriv_consistency(self):
        # analytic d ln tau / dt against central differences
        for name in ("ex1", "ex2", "ex3"):
            sol = td.get_solution(name, theta1=0.3) if name == "ex1" else td.get_solution(name)
            t, h = 0.55, 1e-6
            fd = (math.log(sol.tau(t + h)) - math.log(sol.tau(t - h))) / (2 * h)
            assert sol.log_deriv(t) == pytest.approx(fd, rel=1e-8)

    def test_unknown_id(self):
        with pytest.raises(DomainError):
            td.get_solution("ex9")
