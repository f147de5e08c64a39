"""Golden closed-form tau functions and their parameter maps.

Three algebraic PVI solutions serve as exact oracles: a two-branch
family with a free angle parameter, a three-branch rational curve, and
a four-branch rational curve.  Each carries its kernel parameters,
exact constants, and an analytic log-derivative for sigma curves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BranchInversionFailure, DomainError
from .kernels import KernelParams

_NEWTON_TOL = 1e-13


@dataclass(frozen=True)
class AlgebraicSolution:
    """Closed-form tau function with golden constants for testing."""

    id: str
    params: KernelParams
    tau: Callable
    log_deriv: Callable          # d ln tau / dt
    golden_C: float
    golden_kappa: float
    correction_exponent: float | None   # extraction fit-exponent override
    fit_window: tuple


def example1(theta1: float, t) -> float | np.ndarray:
    """Two-branch solution: [2 (1-t)^(1/4) / (1 + sqrt(1-t))]^((1-4 theta1^2)/4)."""
    if not abs(theta1) < 0.5:
        raise DomainError(f"|theta1| < 1/2 required, got {theta1}")
    t = np.asarray(t, float)
    if np.any((t <= 0) | (t >= 1)):
        raise DomainError("t must lie in (0, 1)")
    e = (1.0 - 4.0 * theta1 ** 2) / 4.0
    r = np.sqrt(1.0 - t)
    out = (2.0 * (1.0 - t) ** 0.25 / (1.0 + r)) ** e
    return float(out) if out.ndim == 0 else out


def _example1_log_deriv(theta1: float, t):
    t = np.asarray(t, float)
    e = (1.0 - 4.0 * theta1 ** 2) / 4.0
    r = np.sqrt(1.0 - t)
    out = e * (-0.25 / (1.0 - t) + 1.0 / (2.0 * r * (1.0 + r)))
    return float(out) if out.ndim == 0 else out


# -- rational branch maps -------------------------------------------------

def _ex2_t(s):
    return (s + 1.0) ** 2 * (s - 2.0) / ((s - 1.0) ** 2 * (s + 2.0))


def _ex2_dt_ds(s):
    return _ex2_t(s) * (2.0 / (s + 1.0) + 1.0 / (s - 2.0) - 2.0 / (s - 1.0) - 1.0 / (s + 2.0))


def _ex2_log_tau(s):
    return (15.0 / 8.0) * math.log(3.0) - (25.0 / 9.0) * math.log(2.0) \
        + math.log(s) + (8.0 / 9.0) * math.log(s + 2.0) \
        - (15.0 / 8.0) * math.log(s + 1.0) - (7.0 / 72.0) * math.log(s - 1.0)


def _ex2_dlog_tau_ds(s):
    return 1.0 / s + (8.0 / 9.0) / (s + 2.0) - (15.0 / 8.0) / (s + 1.0) - (7.0 / 72.0) / (s - 1.0)


def _ex3_t(s):
    return s * (2.0 - s) ** 3 / (3.0 - 2.0 * s)


def _ex3_dt_ds(s):
    return _ex3_t(s) * (1.0 / s - 3.0 / (2.0 - s) + 2.0 / (3.0 - 2.0 * s))


def _ex3_log_tau(s):
    return (5.0 / 12.0) * math.log(2.0) - (15.0 / 16.0) * math.log(3.0) \
        + (15.0 / 16.0) * math.log(3.0 - s) - (5.0 / 12.0) * math.log(2.0 - s) \
        - (5.0 / 48.0) * math.log(1.0 - s)


def _ex3_dlog_tau_ds(s):
    return -(15.0 / 16.0) / (3.0 - s) + (5.0 / 12.0) / (2.0 - s) + (5.0 / 48.0) / (1.0 - s)


def _invert_monotone(tfun, dtfun, t_target: float, lo: float, hi: float) -> float:
    """Bracketed bisection plus Newton polish for strictly monotone t(s)."""
    f_lo = tfun(lo) - t_target
    f_hi = tfun(hi) - t_target
    if f_lo * f_hi > 0:
        raise BranchInversionFailure(
            f"target t = {t_target} not bracketed on [{lo}, {hi}]")
    a, b = lo, hi
    for _ in range(200):
        mid = 0.5 * (a + b)
        fm = tfun(mid) - t_target
        if fm == 0.0:
            a = b = mid
            break
        if f_lo * fm < 0:
            b = mid
        else:
            a, f_lo = mid, fm
        if b - a < 1e-9 * max(1.0, abs(mid)):
            break
    s = 0.5 * (a + b)
    for _ in range(60):
        f = tfun(s) - t_target
        d = dtfun(s)
        if d == 0.0:
            break
        step = f / d
        s_new = s - step
        if not (lo <= s_new <= hi):
            s_new = max(lo, min(hi, s_new))
        if abs(s_new - s) <= _NEWTON_TOL * max(1.0, abs(s)):
            s = s_new
            break
        s = s_new
    if abs(tfun(s) - t_target) > 1e-10 * max(t_target, 1.0 - t_target):
        raise BranchInversionFailure(f"inversion stalled at t = {t_target}")
    return s


def _ex2_s_of_t(t: float) -> float:
    # s in (2, inf) maps bijectively onto t in (0, 1); 1-t ~ 4/s^3 near s = inf
    hi = max(1e6, 4.0 * (4.0 / max(1.0 - t, 1e-15)) ** (1.0 / 3.0))
    return _invert_monotone(_ex2_t, _ex2_dt_ds, t, 2.0 + 1e-9, hi)


def _ex3_s_of_t(t: float) -> float:
    return _invert_monotone(_ex3_t, _ex3_dt_ds, t, 1e-9, 1.0 - 1e-9)


def example2(t) -> float | np.ndarray:
    """Three-branch rational solution, branch s in (2, inf)."""
    tt = np.atleast_1d(np.asarray(t, float))
    if np.any((tt <= 0) | (tt >= 1)):
        raise DomainError("t must lie in (0, 1)")
    out = np.array([math.exp(_ex2_log_tau(_ex2_s_of_t(tv))) for tv in tt])
    return float(out[0]) if np.ndim(t) == 0 else out


def example3(t) -> float | np.ndarray:
    """Four-branch rational solution, branch s in (0, 1)."""
    tt = np.atleast_1d(np.asarray(t, float))
    if np.any((tt <= 0) | (tt >= 1)):
        raise DomainError("t must lie in (0, 1)")
    out = np.array([math.exp(_ex3_log_tau(_ex3_s_of_t(tv))) for tv in tt])
    return float(out[0]) if np.ndim(t) == 0 else out


def _ex2_log_deriv(t):
    tt = np.atleast_1d(np.asarray(t, float))
    out = np.empty_like(tt)
    for i, tv in enumerate(tt):
        s = _ex2_s_of_t(tv)
        out[i] = _ex2_dlog_tau_ds(s) / _ex2_dt_ds(s)
    return float(out[0]) if np.ndim(t) == 0 else out


def _ex3_log_deriv(t):
    tt = np.atleast_1d(np.asarray(t, float))
    out = np.empty_like(tt)
    for i, tv in enumerate(tt):
        s = _ex3_s_of_t(tv)
        out[i] = _ex3_dlog_tau_ds(s) / _ex3_dt_ds(s)
    return float(out[0]) if np.ndim(t) == 0 else out


def get_solution(name: str, theta1: float = 0.25) -> AlgebraicSolution:
    """Golden solution by id: 'ex1' (needs theta1), 'ex2' or 'ex3'."""
    if name == "ex1":
        e = (1.0 - 4.0 * theta1 ** 2) / 4.0
        return AlgebraicSolution(
            id=f"ex1(theta1={theta1})",
            params=KernelParams((1 + 2 * theta1) / 4.0, (1 - 2 * theta1) / 4.0,
                                (1 + 2 * theta1) / 4.0, (1 - 2 * theta1) / 4.0),
            tau=lambda t, th=theta1: example1(th, t),
            log_deriv=lambda t, th=theta1: _example1_log_deriv(th, t),
            golden_C=2.0 ** e,
            golden_kappa=(1.0 - 4.0 * theta1 ** 2) / 128.0,
            correction_exponent=0.5,
            fit_window=(1e-4, 1e-3))
    if name == "ex2":
        return AlgebraicSolution(
            id="ex2",
            params=KernelParams(1.0 / 6.0, 1.0 / 6.0, 7.0 / 6.0, 0.5),
            tau=example2,
            log_deriv=_ex2_log_deriv,
            golden_C=3.0 ** (15.0 / 8.0) * 2.0 ** (-17.0 / 6.0),
            golden_kappa=16.0 / 19683.0,
            correction_exponent=None,
            fit_window=(1e-4, 1e-3))
    if name == "ex3":
        return AlgebraicSolution(
            id="ex3",
            params=KernelParams(5.0 / 12.0, -1.0 / 12.0, 5.0 / 6.0, -1.0 / 6.0),
            tau=example3,
            log_deriv=_ex3_log_deriv,
            golden_C=2.0 ** (25.0 / 18.0) * 3.0 ** (-15.0 / 16.0),
            golden_kappa=-15.0 / 2048.0,
            correction_exponent=None,
            fit_window=(1e-4, 1e-3))
    raise DomainError(f"unknown solution id {name!r}")


ALL_SOLUTION_IDS = ("ex1", "ex2", "ex3")


def sigma_curve_from_solution(sol: AlgebraicSolution, grid: np.ndarray):
    """Exact sigma(t) samples of a golden solution on a grid."""
    from .painleve import SigmaCurve
    grid = np.asarray(grid, float)
    th0, th1, tht, thinf = sol.params.theta
    ld = np.asarray(sol.log_deriv(grid), float)
    sigma = grid * (grid - 1.0) * ld + grid * (tht ** 2 - thinf ** 2) / 4.0 \
        - (tht ** 2 + th0 ** 2 - th1 ** 2 - thinf ** 2) / 8.0
    lnd = np.log(np.asarray(sol.tau(grid), float))
    return SigmaCurve(grid=grid, sigma=sigma, lnd=lnd)
