"""Expansion coefficients, conjectured constants, extraction machinery."""

import math

import numpy as np
import pytest

import taudet as td
from taudet import asymptotics, specfun
from taudet.errors import DomainError, IllConditionedFit


class TestKappa:
    def test_integer_z_gives_zero(self):
        p = td.KernelParams(1.0, 0.2, 0.4, 0.1)
        assert asymptotics.kappa(p) == 0.0

    def test_example2_value(self):
        p = td.KernelParams(1 / 6, 1 / 6, 7 / 6, 0.5)
        assert asymptotics.kappa(p) == pytest.approx(16.0 / 19683.0, rel=1e-13)

    def test_example3_value(self):
        p = td.KernelParams(5 / 12, -1 / 12, 5 / 6, -1 / 6)
        assert asymptotics.kappa(p) == pytest.approx(-15.0 / 2048.0, rel=1e-13)

    def test_s2_invariance(self, p_each):
        p2 = td.apply_symmetry(p_each, "S2")
        assert asymptotics.kappa(p2) == pytest.approx(asymptotics.kappa(p_each), abs=1e-12)


class TestT1Expansion:
    def test_symmetric_in_z(self):
        m1 = td.t1_expansion(td.KernelParams(0.3, 0.2, 0.4, 0.1))
        m2 = td.t1_expansion(td.KernelParams(0.2, 0.3, 0.4, 0.1))
        for key in ("a_plus", "a_minus", "linear"):
            assert m1.coefficients[key] == pytest.approx(m2.coefficients[key], rel=1e-12)

    def test_example1_exponent(self):
        sol = td.get_solution("ex1", theta1=0.25)
        m = td.t1_expansion(sol.params)
        assert m.leading_exponent == pytest.approx(3.0 / 64.0, abs=1e-15)
        assert m.leading_exponent == pytest.approx((1 - 4 * 0.25 ** 2) / 16.0, abs=1e-15)

    def test_a_minus_lambda1_consistency(self, p_main):
        # two printed formulas for the same object: lambda1 bracket equals
        # (1-Z)^2 a^- / (w (Z+w'))
        z, zp, w, wp = p_main.astuple()
        Z = z + zp
        am = td.t1_expansion(p_main).coefficients["a_minus"]
        lam1_bracket = specfun.gamma_bracket(
            [Z, Z, 1 - z, 1 - zp, w, 1 + wp],
            [1 - Z, 1 - Z, z, zp, Z + w, 1 + Z + wp])
        assert lam1_bracket == pytest.approx((1 - Z) ** 2 / (w * (Z + wp)) * am, rel=1e-12)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            td.t1_expansion(td.KernelParams(0.6, 0.5, 0.4, 0.1))   # z+z' >= 1
        with pytest.raises(DomainError):
            td.t1_expansion(td.KernelParams(1.0, 0.2, 0.4, 0.3))   # z integer

    def test_log_case_detected(self, p_log):
        m = td.t1_expansion(p_log)
        assert m.is_log_case
        assert m.leading_exponent == pytest.approx(-0.09, abs=1e-14)
        z, w, wp = 0.3, 0.6, 0.2
        expect = specfun.digamma(1 + z) + specfun.digamma(1 - z) \
            + specfun.digamma(1 + w) + specfun.digamma(1 + wp) - 4 * specfun.digamma(1.0)
        assert m.coefficients["a_prime"] == pytest.approx(expect, rel=1e-13)

    def test_power_log_agreement_near_zero_sum(self):
        # z+z' = 1e-4: power-case model at 1-t = 1e-3 matches the log-case
        # bracket within 1e-3 relative
        eps = 1e-4
        z, w, wp = 0.3, 0.6, 0.2
        p_pow = td.KernelParams(z + eps / 2, -(z - eps / 2), w, wp)
        with pytest.warns(UserWarning):
            m_pow = td.t1_expansion(p_pow)
        m_log = td.t1_expansion(td.KernelParams(z, -z, w, wp))
        tau = 1e-3
        v_pow = m_pow.model_values(np.array([tau]))[0]
        v_log = m_log.model_values(np.array([tau]))[0]
        assert v_pow == pytest.approx(v_log, rel=1e-3)

    def test_a_product_continuity(self, p_main):
        # a+ a- continuous under 1e-6 perturbations inside the admissible set
        m0 = td.t1_expansion(p_main)
        base = m0.coefficients["a_plus"] * m0.coefficients["a_minus"]
        z, zp, w, wp = p_main.astuple()
        for dz in (1e-6, -1e-6):
            m = td.t1_expansion(td.KernelParams(z + dz, zp, w, wp))
            prod = m.coefficients["a_plus"] * m.coefficients["a_minus"]
            assert prod == pytest.approx(base, rel=1e-4)


class TestConjecturedC:
    @pytest.mark.parametrize("name,theta1,expect", [
        ("ex1", 0.0, 2.0 ** 0.25),
        ("ex1", 0.25, 2.0 ** (3.0 / 16.0)),
        ("ex2", None, 3.0 ** (15 / 8) * 2.0 ** (-17 / 6)),
        ("ex3", None, 2.0 ** (25 / 18) * 3.0 ** (-15 / 16)),
    ])
    def test_golden_values(self, name, theta1, expect):
        sol = td.get_solution(name, theta1=theta1) if theta1 is not None else td.get_solution(name)
        assert td.conjectured_C(sol.params) == pytest.approx(expect, abs=1e-10)

    def test_b_zero_specialization(self):
        # at w' = w - z - z' the general bracket equals the 8-over-6 form
        # specialized with the doubled 1+w argument
        z, zp, w = 0.25, 0.15, 0.7
        wp = w - z - zp
        p = td.KernelParams(z, zp, w, wp)
        general = td.conjectured_C(p)
        special = specfun.barnes_bracket(
            [1 - z, 1 + z, 1 - zp, 1 + zp, 1 + w, 1 + w, 1 + z + zp + w, 1 - z - zp + w],
            [1 - z - zp, 1 + z + zp, 1 + z + w, 1 - z + w, 1 + zp + w, 1 - zp + w])
        assert general == pytest.approx(special, rel=1e-12)

    def test_s1_s2_invariance(self, p_each):
        c0 = td.conjectured_C(p_each)
        for which in ("S1a", "S1b", "S2"):
            c1 = td.conjectured_C(td.apply_symmetry(p_each, which))
            assert c1 == pytest.approx(c0, abs=1e-12)


class TestLimitConstants:
    def test_cl_is_w_prime_limit_of_c(self):
        z, zp, w = 0.3, 0.2, 0.4
        _, cl = td.limit_constants_pv(z, zp, w)
        wp = 1e4
        c_full = td.conjectured_C(td.KernelParams(z, zp, w, wp))
        assert wp ** (-z * zp) * c_full == pytest.approx(cl, rel=1e-3)

    def test_al_symmetric(self):
        m1, _ = td.limit_constants_pv(0.3, 0.2, 0.4)
        m2, _ = td.limit_constants_pv(0.2, 0.3, 0.4)
        for key in ("a_plus", "a_minus"):
            assert m1.coefficients[key] == pytest.approx(m2.coefficients[key], rel=1e-12)

    def test_al_minus_is_w_prime_limit(self):
        # a_L^- equals the w' -> infinity limit of a^- after removing the
        # (w')^(1-Z) growth of Gamma(1+w')/Gamma(w'+Z)
        z, zp, w = 0.3, 0.2, 0.4
        Z = z + zp
        mL, _ = td.limit_constants_pv(z, zp, w)
        wp = 1e6 + 0.25
        m = td.t1_expansion(td.KernelParams(z, zp, w, wp))
        scaled = m.coefficients["a_minus"] * wp ** (-(1.0 - Z))
        assert scaled == pytest.approx(mL.coefficients["a_minus"], rel=1e-3)

    def test_cm_is_w_limit_of_cl(self):
        z, zp = 0.3, 0.2
        _, cm = td.limit_constants_piii(z, zp)
        w = 1e4 + 0.25
        _, cl = td.limit_constants_pv(z, zp, w)
        assert w ** (-z * zp) * cl == pytest.approx(cm, rel=1e-3)

    def test_am_symmetric(self):
        m1, _ = td.limit_constants_piii(0.3, 0.2)
        m2, _ = td.limit_constants_piii(0.2, 0.3)
        for key in ("a_plus", "a_minus"):
            assert m1.coefficients[key] == pytest.approx(m2.coefficients[key], rel=1e-12)

    def test_cm_closing_identity(self):
        # C_M(z, z) = 2^{-4z^2} cos(pi z) G[1/2^4 / (1/2+z)^2 (1/2-z)^2]
        z = 0.25
        _, cm = td.limit_constants_piii(z, z)
        rhs = 2.0 ** (-4 * z * z) * math.cos(math.pi * z) * specfun.barnes_bracket(
            [0.5] * 4, [0.5 + z, 0.5 + z, 0.5 - z, 0.5 - z])
        assert cm == pytest.approx(rhs, abs=1e-10)

    def test_genericity_enforced(self):
        with pytest.raises(DomainError):
            td.limit_constants_pv(0.3, 0.2, 1.0)   # w integer
        with pytest.raises(DomainError):
            td.limit_constants_piii(1.0, 0.2)


class TestTracyBeta:
    def test_at_zero(self):
        alpha, beta = td.tracy_beta(0.0)
        assert alpha == 0.0
        assert beta == pytest.approx(0.0, abs=1e-12)

    def test_sigma_inverts_sine(self):
        for z in (0.0, 0.1, 0.3, 0.45):
            nu = math.sin(math.pi * z) / math.pi
            alpha, _ = td.tracy_beta(nu)
            assert math.sqrt(2 * alpha) == pytest.approx(2 * z, abs=1e-12)

    def test_reproduces_cm_diagonal(self):
        z = 0.3
        _, cm = td.limit_constants_piii(z, z)
        alpha, beta = td.tracy_beta(math.sin(math.pi * z) / math.pi)
        assert 2.0 ** alpha * math.exp(-beta) == pytest.approx(cm, abs=1e-10)

    def test_domain(self):
        with pytest.raises(DomainError):
            td.tracy_beta(1.0 / math.pi)


class TestExtraction:
    def test_synthetic_self_consistency(self, p_main):
        # samples generated exactly from the model with C = 1
        model = td.t1_expansion(p_main)
        taus = np.geomspace(1e-3, 5e-2, 40)
        d = model.model_values(taus)
        rep = td.extract_constant(np.column_stack([1 - taus, d]), model, conjectured=1.0)
        assert rep.extracted_C == pytest.approx(1.0, abs=1e-10)
        assert rep.abs_error <= 1e-10

    def test_ill_conditioned_window(self, p_main):
        model = td.t1_expansion(p_main)
        taus = np.full(8, 1e-3) * (1.0 + 1e-13 * np.arange(8))
        d = model.model_values(taus)
        with pytest.raises(IllConditionedFit):
            td.extract_constant(np.column_stack([1 - taus, d]),
                                model, window=(9e-4, 2e-3))

    def test_example1_quarter_with_override(self):
        # closed-form samples; fit exponent overridden to 1/2 per the
        # O(sqrt(1-t)) correction of the two-branch solution
        sol = td.get_solution("ex1", theta1=0.25)
        model = td.t1_expansion(sol.params)
        taus = np.geomspace(1e-4, 1e-3, 30)
        d = np.asarray(sol.tau(1 - taus))
        rep = td.extract_constant(np.column_stack([1 - taus, d]), model,
                                  conjectured=sol.golden_C,
                                  fit_exponent=sol.correction_exponent,
                                  window=sol.fit_window)
        assert rep.abs_error <= 1e-5

    def test_generic_pipeline(self, p_main):
        model = td.t1_expansion(p_main)
        conj = td.conjectured_C(p_main)
        curve = td.integrate_tau_pvi(p_main, t1=1 - 1e-3, tol=1e-11, n_grid=200)
        keep = (1 - curve.t >= 1e-3) & (1 - curve.t <= 5e-2)
        samples = np.column_stack([curve.t[keep], np.exp(curve.ln_d[keep])])
        rep = td.extract_constant(samples, model, conjectured=conj)
        assert rep.abs_error / conj <= 1e-3
        assert rep.diagnostics["n_samples"] >= 10

    def test_report_invariant(self, p_main):
        model = td.t1_expansion(p_main)
        taus = np.geomspace(1e-3, 5e-2, 20)
        d = model.model_values(taus) * 2.5
        rep = td.extract_constant(np.column_stack([1 - taus, d]), model, conjectured=2.0)
        assert rep.abs_error == pytest.approx(abs(rep.extracted_C - rep.conjectured_C), rel=1e-12)
