"""Golden self-test suite: closed-form identities and cross-route spot checks.

Every check returns (name, passed, detail); the CLI `selftest` command
prints one line per check and exits nonzero on any failure.  Checks are
chosen to complete in well under a minute.
"""

from __future__ import annotations

import math

import numpy as np

from . import asymptotics, fredholm, kernels, painleve, reference, specfun


def _check(name, err, tol):
    return (name, bool(err <= tol), f"err={err:.3e} tol={tol:.1e}")


def check_barnes_special_values():
    """Seven closed-form ln G values at rational points, 1e-10."""
    lnA = specfun.LN_GLAISHER
    K = specfun.CATALAN
    pi = math.pi
    lgamma = specfun.log_gamma
    tri = specfun.trigamma
    sqrt3 = math.sqrt(3.0)
    vals = {
        0.5: math.log(2) / 24 - math.log(pi) / 4 - 1.5 * lnA + 0.125,
        1 / 3: math.log(3) / 72 + pi / (18 * sqrt3) - (2 / 3) * lgamma(1 / 3)
            - (4 / 3) * lnA - tri(1 / 3) / (12 * pi * sqrt3) + 1 / 9,
        2 / 3: math.log(3) / 72 + pi / (18 * sqrt3) - (1 / 3) * lgamma(2 / 3)
            - (4 / 3) * lnA - tri(2 / 3) / (12 * pi * sqrt3) + 1 / 9,
        1 / 6: -math.log(12) / 144 + pi / (20 * sqrt3) - (5 / 6) * lgamma(1 / 6)
            - (5 / 6) * lnA - tri(1 / 6) / (40 * pi * sqrt3) + 5 / 72,
        5 / 6: -math.log(12) / 144 + pi / (20 * sqrt3) - (1 / 6) * lgamma(5 / 6)
            - (5 / 6) * lnA - tri(5 / 6) / (40 * pi * sqrt3) + 5 / 72,
        0.25: -(3 / 4) * lgamma(0.25) - (9 / 8) * lnA + 3 / 32 - K / (4 * pi),
        0.75: -(1 / 4) * lgamma(0.75) - (9 / 8) * lnA + 3 / 32 + K / (4 * pi),
    }
    err = max(abs(specfun.log_barnes_g(x) - v) for x, v in vals.items())
    return _check("barnes special values", err, 1e-10)


def check_barnes_multiplication():
    """Multiplication formula residual for n = 2, 3 at x = 0.4, 0.9."""
    lnA = specfun.LN_GLAISHER
    worst = 0.0
    for n in (2, 3):
        for x in (0.4, 0.9):
            rhs = (n * n * x * x / 2 - n * x) * math.log(n) \
                - (n - 1) * (n * x - 1) / 2 * specfun.LN_2PI \
                + (5 / 12) * math.log(n) - (n * n - 1) / 12 + (n * n - 1) * lnA
            for j in range(n):
                for k in range(n):
                    rhs += specfun.log_barnes_g(x + (j + k) / n)
            worst = max(worst, abs(specfun.log_barnes_g(n * x) - rhs))
    return _check("barnes multiplication formula", worst, 1e-10)


def check_gamma_relations():
    """Gamma multiplication and trigamma reflection identities."""
    worst = 0.0
    for n in (2, 3, 4):
        for x in (0.31, 0.77, 1.23):
            lhs = specfun.log_gamma(n * x)
            rhs = -(n - 1) / 2 * specfun.LN_2PI + (n * x - 0.5) * math.log(n) \
                + sum(specfun.log_gamma(x + k / n) for k in range(n))
            worst = max(worst, abs(lhs - rhs))
    for x in (1 / 3, 0.4, 0.77):
        lhs = specfun.trigamma(x) + specfun.trigamma(1 - x)
        worst = max(worst, abs(lhs - math.pi ** 2 / math.sin(math.pi * x) ** 2) / abs(lhs))
    return _check("gamma multiplication / trigamma reflection", worst, 1e-12)


def check_golden_kappas():
    worst = 0.0
    for name, th in (("ex1", 0.0), ("ex1", 0.25), ("ex2", None), ("ex3", None)):
        sol = reference.get_solution(name, theta1=th) if th is not None else reference.get_solution(name)
        worst = max(worst, abs(asymptotics.kappa(sol.params) - sol.golden_kappa))
    return _check("golden small-t coefficients", worst, 1e-12)


def check_conjecture_brackets():
    worst = 0.0
    for name, th in (("ex1", 0.0), ("ex1", 0.25), ("ex1", 0.13), ("ex2", None), ("ex3", None)):
        sol = reference.get_solution(name, theta1=th) if th is not None else reference.get_solution(name)
        worst = max(worst, abs(asymptotics.conjectured_C(sol.params) - sol.golden_C))
    return _check("conjectured C vs golden closed forms", worst, 1e-10)


def check_closing_identity():
    worst = 0.0
    for z in (0.1, 0.3, 0.45):
        lhs = specfun.barnes_bracket([1 + z, 1 + z, 1 - z, 1 - z], [1 + 2 * z, 1 - 2 * z])
        rhs = 2.0 ** (-4 * z * z) * math.cos(math.pi * z) * specfun.barnes_bracket(
            [0.5] * 4, [0.5 + z, 0.5 + z, 0.5 - z, 0.5 - z])
        worst = max(worst, abs(lhs - rhs))
    return _check("closing Barnes identity", worst, 1e-10)


def check_tracy_beta():
    worst = 0.0
    for z in (0.1, 0.3, 0.45):
        _, cm = asymptotics.limit_constants_piii(z, z)
        alpha, beta = asymptotics.tracy_beta(math.sin(math.pi * z) / math.pi)
        worst = max(worst, abs(cm - 2.0 ** alpha * math.exp(-beta)))
    return _check("C_M from sinh-Gordon beta(nu)", worst, 1e-10)


def check_kernel_symmetries():
    p = kernels.KernelParams(0.3, 0.2, 0.4, 0.1)
    k = kernels.build_f21_kernel(p)
    k2 = kernels.build_f21_kernel(kernels.apply_symmetry(p, "S2"))
    xs = np.linspace(0.1, 0.9, 5)
    worst = 0.0
    for x in xs:
        for y in xs:
            worst = max(worst, abs(k.k_point(x, y) - k.k_point(y, x)))
            worst = max(worst, abs(k.k_point(x, y) - k2.k_point(x, y)))
    return _check("kernel symmetry and S2 invariance", worst, 1e-9)


def check_pbt_kappa():
    p = kernels.PBTParams(mu=0.4, nu1=-0.3, nu2=-0.6, b=0.2)
    err = abs(asymptotics.kappa(kernels.map_pbt_params(p)) - kernels.kappa_pbt(p))
    return _check("kappa equals kappa_PBT under the parameter map", err, 1e-10)


def check_rank_one_det():
    """K = phi(x) psi(y) with phi = psi = 1 on (0, t): det = 1 - t."""
    t = 0.37
    rule = fredholm.gauss_legendre(48)
    x = 0.5 * (rule.nodes + 1.0) * t
    dx = 0.5 * rule.weights * t
    khat = np.sqrt(dx)[:, None] * np.ones((48, 48)) * np.sqrt(dx)[None, :]
    det = np.linalg.det(np.eye(48) - khat)
    return _check("rank-one determinant", abs(det - (1 - t)), 1e-12)


def check_ode_vs_fredholm():
    p = kernels.KernelParams(0.3, 0.2, 0.4, 0.1)
    k = kernels.build_f21_kernel(p)
    curve = painleve.integrate_tau_pvi(p, tol=1e-9, grid=np.array([0.3]))
    dn = fredholm.fredholm_det_finite(k, 0.3, n=64)
    err = abs(math.exp(curve.ln_d[0]) - dn.value)
    return _check("ODE route vs Nystrom determinant at t=0.3", err, 1e-6)


ALL_CHECKS = (
    check_barnes_special_values,
    check_barnes_multiplication,
    check_gamma_relations,
    check_golden_kappas,
    check_conjecture_brackets,
    check_closing_identity,
    check_tracy_beta,
    check_kernel_symmetries,
    check_pbt_kappa,
    check_rank_one_det,
    check_ode_vs_fredholm,
)


def run_selftest():
    """Run all golden checks; returns (results, all_passed)."""
    results = [fn() for fn in ALL_CHECKS]
    return results, all(ok for _, ok, _ in results)
