"""ODE routes to the determinant and sigma-form residual validators.

Primary route: the Tracy-Widom first-order system in (q, p, u, v, w)
augmented with ln D, integrated by an embedded Dormand-Prince 5(4) pair
with step rejection on first-integral drift.  Secondary route: the PVI
transcendent q(t) itself.  sigma-forms of PVI/PV/PIII act as residual
validators on computed curves; the PV/PIII curves come from
differentiating log-determinants on uniform-in-log grids.

Sign convention: in the diagonal gauge the squared normalization
constant is const^2 = -lam (1+c)/(w-w'), which is negative for generic
admissible parameters.  The state stores the real rescaled pair, and
every quadratic monomial in the true (q, p) equals quad_sign times the
same monomial in the stored values; this keeps the whole flow real.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import factorial
from typing import Callable, Optional

import numpy as np

from . import fredholm, specfun
from .errors import (DomainError, InconsistentInit, InsufficientGrid,
                     PoleEncountered)
from .kernels import IntegrableKernel, KernelParams, build_f21_kernel


@dataclass(frozen=True)
class TWState:
    """Tracy-Widom 5-vector plus accumulated ln D at a point t."""

    t: float
    q: float
    p: float
    u: float
    v: float
    w_tw: float
    lnD: float

    def as_array(self) -> np.ndarray:
        return np.array([self.q, self.p, self.u, self.v, self.w_tw, self.lnD])


@dataclass
class SigmaCurve:
    """Samples of sigma(t) (and optionally derivatives) on a grid."""

    grid: np.ndarray
    sigma: np.ndarray
    sigma_prime: Optional[np.ndarray] = None
    sigma_second: Optional[np.ndarray] = None
    lnd: Optional[np.ndarray] = None


@dataclass
class TauCurve:
    """ODE-route output: ln D and sigma with first-integral drifts."""

    t: np.ndarray
    ln_d: np.ndarray
    sigma: np.ndarray
    sigma_prime: Optional[np.ndarray]
    sigma_second: Optional[np.ndarray]
    i1_drift: Optional[np.ndarray]
    i2_drift: Optional[np.ndarray]
    complete: bool = True

    def sigma_curve(self) -> SigmaCurve:
        return SigmaCurve(grid=self.t, sigma=self.sigma,
                          sigma_prime=self.sigma_prime,
                          sigma_second=self.sigma_second, lnd=self.ln_d)


@dataclass(frozen=True)
class ResidualStats:
    max_scaled: float
    rms_scaled: float
    n_points: int


class TracyWidomSystem:
    """First-order system (twe) for the hypergeometric kernel determinant."""

    def __init__(self, params: KernelParams):
        self.params = params
        self.kernel = build_f21_kernel(params)
        tw = self.kernel.tw_normalization   # raises DegenerateParams at w = w'
        self.tw = tw
        self.c = params.c
        th = params.theta
        # sigma(t) = zeta(t) - alpha1^2 t + (alpha1^2 + k1 k2)/2,
        # with k1 k2 = (theta1^2 - theta0^2)/4.
        k1k2 = (th[1] ** 2 - th[0] ** 2) / 4.0
        self.sigma_shift = (tw.alpha1 ** 2 + k1k2) / 2.0

    # state layout: y = [q, p, u, v, w_tw, lnD]

    def _coeffs(self, t: float, y: np.ndarray):
        tw = self.tw
        al = tw.alpha0 + tw.alpha1 * t + y[3]
        be = tw.beta0 + (2.0 * tw.alpha1 - 1.0) * y[2]
        ga = tw.gamma0 - (2.0 * tw.alpha1 + 1.0) * y[4]
        return al, be, ga

    def rhs(self, t: float, y: np.ndarray) -> np.ndarray:
        if t <= 0.0 or t >= 1.0:
            raise DomainError(f"Tracy-Widom flow defined on t in (0,1), got {t}")
        q, p = y[0], y[1]
        eps = self.tw.quad_sign
        al, be, ga = self._coeffs(t, y)
        s = 1.0 / (t * (1.0 - t))
        zeta = 2.0 * self.tw.alpha1 * y[3] + self.first_integrals(t, y)[0]
        return np.array([
            (al * q + be * p) * s,
            (-ga * q - al * p) * s,
            eps * q * q,
            eps * p * q,
            eps * p * p,
            zeta / (t * (t - 1.0)),
        ])

    def first_integrals(self, t: float, y: np.ndarray):
        q, p = y[0], y[1]
        eps = self.tw.quad_sign
        al, be, ga = self._coeffs(t, y)
        quad = eps * (2.0 * al * p * q + be * p * p + ga * q * q)
        i1 = quad - 2.0 * self.tw.alpha1 * y[3]
        i2 = (y[3] + self.tw.alpha0) ** 2 - be * ga \
            - 2.0 * self.tw.alpha1 * t * (1.0 - t) * eps * p * q \
            + 2.0 * self.tw.alpha1 * (1.0 - t) * y[3] - i1 * t
        return i1, i2

    def zeta(self, t: float, y: np.ndarray) -> float:
        i1, _ = self.first_integrals(t, y)
        return 2.0 * self.tw.alpha1 * y[3] + i1

    def zeta_quadratic(self, t: float, y: np.ndarray) -> float:
        """zeta as the quadratic form 2 alpha p q + beta p^2 + gamma q^2."""
        q, p = y[0], y[1]
        al, be, ga = self._coeffs(t, y)
        return self.tw.quad_sign * (2.0 * al * p * q + be * p * p + ga * q * q)

    def zeta_prime(self, t: float, y: np.ndarray) -> float:
        return 2.0 * self.tw.alpha1 * self.tw.quad_sign * y[0] * y[1]

    def zeta_second(self, t: float, y: np.ndarray) -> float:
        q, p = y[0], y[1]
        _, be, ga = self._coeffs(t, y)
        return 2.0 * self.tw.alpha1 * self.tw.quad_sign * (be * p * p - ga * q * q) \
            / (t * (1.0 - t))

    def sigma(self, t: float, y: np.ndarray) -> float:
        return self.zeta(t, y) - self.tw.alpha1 ** 2 * t + self.sigma_shift

    def sigma_prime(self, t: float, y: np.ndarray) -> float:
        return self.zeta_prime(t, y) - self.tw.alpha1 ** 2

    def initial_state(self, t0: float, n_quad: int = 48) -> TWState:
        """Regular-solution state at small t0 (first Neumann order).

        q = phi(t0), p = psi(t0); u, v, w are quadratures of phi^2,
        phi psi, psi^2 on (0, t0); ln D comes from the two-term trace
        expansion, consistent with the small-t expansion 1 - kappa t^(1+c).
        """
        if not 0.0 < t0 <= 1e-2:
            raise DomainError(f"initial point must satisfy 0 < t0 <= 1e-2, got {t0}")
        tw = self.tw
        kern = self.kernel
        m = fredholm.substitution_power(self.c)
        base = fredholm.gauss_legendre(n_quad)
        uu = 0.5 * (base.nodes + 1.0)
        du = 0.5 * base.weights
        x = t0 * uu ** m
        dx = t0 * m * uu ** (m - 1) * du

        A, B = kern.ab(x)
        phi = tw.chat * (A + tw.rho * B)
        psi = -tw.chat * (A + tw.eta * B)
        A0, B0 = kern.ab(np.array([t0]))
        q0 = tw.chat * (A0[0] + tw.rho * B0[0])
        p0 = -tw.chat * (A0[0] + tw.eta * B0[0])
        eps = tw.quad_sign
        u0 = eps * float(np.sum(phi * phi * dx))
        v0 = eps * float(np.sum(phi * psi * dx))
        w0 = eps * float(np.sum(psi * psi * dx))

        khat = np.sqrt(dx)[:, None] * kern.k_matrix(x) * np.sqrt(dx)[None, :]
        tr1 = float(np.trace(khat))
        tr2 = float(np.sum(khat * khat.T))
        lnD0 = -tr1 - tr2 / 2.0

        from .asymptotics import kappa as _kappa
        kap = _kappa(self.params)
        lead = kap * t0 ** (1.0 + self.c)
        if abs(-math.expm1(lnD0) - lead) > 10.0 * t0 ** (2.0 + self.c) + 1e-13:
            raise InconsistentInit(
                f"initial ln D inconsistent with small-t law: 1-D = {-math.expm1(lnD0):.6e}, "
                f"kappa t0^(1+c) = {lead:.6e}")
        return TWState(t=t0, q=q0, p=p0, u=u0, v=v0, w_tw=w0, lnD=lnD0)


def tw_vector_field(state: TWState, params: KernelParams) -> TWState:
    """t-derivative of the Tracy-Widom state (fields hold derivatives, t -> 1)."""
    sys_ = TracyWidomSystem(params)
    d = sys_.rhs(state.t, state.as_array())
    return TWState(t=1.0, q=d[0], p=d[1], u=d[2], v=d[3], w_tw=d[4], lnD=d[5])


def tw_initial_state(params: KernelParams, t0: float) -> TWState:
    return TracyWidomSystem(params).initial_state(t0)


# ---------------------------------------------------------------------------
# Embedded Dormand-Prince 5(4) integrator
# ---------------------------------------------------------------------------

_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


def _integrate_dp54(f: Callable, t0: float, y0: np.ndarray, t_out: np.ndarray,
                    rtol: float, atol: float,
                    invariant: Optional[Callable] = None,
                    inv_tol: float = math.inf):
    """Integrate y' = f(t, y) hitting every t_out point exactly.

    `invariant(t, y)` returns a per-step drift measure; steps with drift
    above inv_tol are rejected with a halved step.  Returns (ys, complete)
    where ys rows align with t_out (NaN rows after a failure point).
    """
    t_out = np.asarray(t_out, float)
    n_out = len(t_out)
    ys = np.full((n_out, len(y0)), np.nan)
    t, y = float(t0), y0.copy()
    k1 = f(t, y)
    inv_prev = invariant(t, y) if invariant else None
    h = (t_out[-1] - t0) * 1e-4
    idx = 0
    hmin_scale = 1e-13 * max(abs(t0), abs(t_out[-1]), 1.0)
    while idx < n_out:
        if t >= t_out[idx] - 1e-15:
            ys[idx] = y
            idx += 1
            continue
        h = min(h, t_out[idx] - t)
        if h < hmin_scale:
            return ys, False
        ks = [k1]
        try:
            for i in range(1, 7):
                yi = y + h * (np.stack(ks, axis=0).T @ _DP_A[i])
                ks.append(f(t + _DP_C[i] * h, yi))
        except (FloatingPointError, DomainError):
            h *= 0.5
            continue
        K = np.stack(ks, axis=0)
        y5 = y + h * (K.T @ _DP_B5)
        y4 = y + h * (K.T @ _DP_B4)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
        err = math.sqrt(float(np.mean(((y5 - y4) / scale) ** 2)))
        if not math.isfinite(err):
            h *= 0.5
            continue
        if err <= 1.0:
            accept = True
            if invariant is not None:
                inv_new = invariant(t + h, y5)
                drift = max(abs(a - b) for a, b in zip(inv_new, inv_prev))
                if drift > inv_tol:
                    accept = False
            if accept:
                t = t + h
                y = y5
                k1 = ks[6]  # FSAL
                if invariant is not None:
                    inv_prev = invariant(t, y)
                h *= min(5.0, max(0.2, 0.9 * err ** -0.2 if err > 0 else 5.0))
                continue
        h *= 0.5 if err <= 1.0 else min(1.0, max(0.2, 0.9 * err ** -0.2))
        if h < hmin_scale:
            return ys, False
    return ys, True


def grid_points(lo: float, hi: float, n: int, spacing: str = "linear",
                log_endpoint: float | None = None) -> np.ndarray:
    """Output grid on [lo, hi]; 'log' spacing is uniform in log-distance
    to `log_endpoint` (defaults: right endpoint 1 for finite domain runs,
    plain log spacing when log_endpoint is None on positive grids)."""
    if n < 1 or not lo < hi:
        raise DomainError("grid requires n >= 1 and lo < hi")
    if spacing == "linear":
        return np.linspace(lo, hi, n)
    if spacing == "log":
        if log_endpoint is None:
            return np.geomspace(lo, hi, n)
        d = np.geomspace(log_endpoint - hi, log_endpoint - lo, n)
        return np.sort(log_endpoint - d)
    raise DomainError(f"unknown spacing {spacing!r}")


def integrate_tau_pvi(params: KernelParams, t0: float = 1e-3, t1: float = 1.0 - 1e-3,
                      tol: float = 1e-9, grid: np.ndarray | None = None,
                      n_grid: int = 200, spacing: str = "log",
                      init_quad: int = 48) -> TauCurve:
    """Determinant and sigma along (t0, t1) via the Tracy-Widom system."""
    if not 0.0 < t0 < t1 < 1.0:
        raise DomainError("need 0 < t0 < t1 < 1")
    sys_ = TracyWidomSystem(params)
    state0 = sys_.initial_state(t0, n_quad=init_quad)
    y0 = state0.as_array()
    if grid is None:
        grid = grid_points(t0, t1, n_grid, spacing, log_endpoint=1.0)
    grid = np.asarray(grid, float)
    if grid[0] < t0 - 1e-15 or grid[-1] > t1 + 1e-15:
        raise DomainError("output grid must lie within [t0, t1]")

    i10, i20 = sys_.first_integrals(t0, y0)
    ys, complete = _integrate_dp54(
        sys_.rhs, t0, y0, grid, rtol=tol, atol=tol * 1e-2,
        invariant=lambda t, y: sys_.first_integrals(t, y),
        inv_tol=10.0 * tol * (1.0 + abs(i20)))

    ok = ~np.isnan(ys[:, 0])
    lnd = ys[:, 5]
    sig = np.array([sys_.sigma(t, y) if o else np.nan for t, y, o in zip(grid, ys, ok)])
    sigp = np.array([sys_.sigma_prime(t, y) if o else np.nan for t, y, o in zip(grid, ys, ok)])
    sig2 = np.array([sys_.zeta_second(t, y) if o else np.nan for t, y, o in zip(grid, ys, ok)])
    i1 = np.array([sys_.first_integrals(t, y)[0] if o else np.nan for t, y, o in zip(grid, ys, ok)])
    i2 = np.array([sys_.first_integrals(t, y)[1] if o else np.nan for t, y, o in zip(grid, ys, ok)])
    return TauCurve(t=grid, ln_d=lnd, sigma=sig, sigma_prime=sigp, sigma_second=sig2,
                    i1_drift=np.abs(i1 - i10), i2_drift=np.abs(i2 - i20),
                    complete=bool(complete))


# ---------------------------------------------------------------------------
# PVI transcendent route
# ---------------------------------------------------------------------------

def pvi_rhs(t: float, q: float, qp: float, theta: tuple) -> float:
    """Second-order PVI right-hand side for q''."""
    th0, th1, tht, thinf = theta
    guard = 1e-12 * max(1.0, abs(t))
    if min(abs(q), abs(q - 1.0), abs(q - t)) < guard:
        raise PoleEncountered(f"q(t) too close to a PVI pole at t = {t}: q = {q}")
    first = 0.5 * (1.0 / q + 1.0 / (q - 1.0) + 1.0 / (q - t)) * qp * qp
    second = (1.0 / t + 1.0 / (t - 1.0) + 1.0 / (q - t)) * qp
    bracket = (thinf - 1.0) ** 2 - th0 ** 2 * t / q ** 2 \
        + th1 ** 2 * (t - 1.0) / (q - 1.0) ** 2 \
        + (1.0 - tht ** 2) * t * (t - 1.0) / (q - t) ** 2
    third = q * (q - 1.0) * (q - t) / (2.0 * t ** 2 * (t - 1.0) ** 2) * bracket
    return first - second + third


def sigma_from_q(t: float, q: float, qp: float, theta: tuple) -> float:
    """sigma(t) from the transcendent via the logarithmic-derivative identity."""
    th0, th1, tht, thinf = theta
    lead = t ** 2 * (t - 1.0) ** 2 / (4.0 * q * (q - 1.0) * (q - t)) \
        * (qp - q * (q - 1.0) / (t * (t - 1.0))) ** 2
    return lead - th0 ** 2 * t / (4.0 * q) + th1 ** 2 * (t - 1.0) / (4.0 * (q - 1.0)) \
        - tht ** 2 * t * (t - 1.0) / (4.0 * (q - t)) - thinf ** 2 * (q - 1.0) / 4.0 \
        - tht ** 2 * t / 4.0 + (tht ** 2 + th0 ** 2 - th1 ** 2 - thinf ** 2) / 8.0


def q_route_initial(params: KernelParams, t0: float):
    """(q, q', lnD) at t0 from the refined small-t expansion of q."""
    z, zp, w, wp = params.astuple()
    c = params.c
    from .asymptotics import kappa as _kappa
    kap = _kappa(params)
    lam0 = (1.0 + c) ** 2 / ((z + w) * (zp + w)) * kap
    a1, b1, c1 = z + w, 1.0 + z + wp, 1.0 + c
    F = specfun.hyp2f1(a1, b1, c1, t0)
    Fp = specfun.hyp2f1_prime(a1, b1, c1, t0)
    g = (1.0 - t0) ** (1.0 + z - zp) * F * F
    gp = -(1.0 + z - zp) * (1.0 - t0) ** (z - zp) * F * F \
        + (1.0 - t0) ** (1.0 + z - zp) * 2.0 * F * Fp
    q0 = t0 - lam0 * t0 ** (1.0 + c) * g
    qp0 = 1.0 - lam0 * ((1.0 + c) * t0 ** c * g + t0 ** (1.0 + c) * gp)
    lnd0 = math.log1p(-kap * t0 ** (1.0 + c))
    return q0, qp0, lnd0


def q_route_check(params: KernelParams, t0: float = 2e-3, t1: float = 1.0 - 1e-3,
                  tol: float = 1e-11, grid: np.ndarray | None = None,
                  n_grid: int = 200, spacing: str = "log") -> TauCurve:
    """Independent sigma / lnD curve from integrating the PVI transcendent."""
    if not 0.0 < t0 < t1 < 1.0:
        raise DomainError("need 0 < t0 < t1 < 1")
    theta = params.theta
    q0, qp0, lnd0 = q_route_initial(params, t0)
    th0, th1, tht, thinf = theta
    const = (th0 ** 2 - th1 ** 2 - thinf ** 2) / 8.0

    def rhs(t, y):
        q, qp, _ = y
        sig = sigma_from_q(t, q, qp, theta)
        dlnd = (sig + t * thinf ** 2 / 4.0 + const) / (t * (t - 1.0))
        return np.array([qp, pvi_rhs(t, q, qp, theta), dlnd])

    if grid is None:
        grid = grid_points(t0, t1, n_grid, spacing, log_endpoint=1.0)
    grid = np.asarray(grid, float)
    ys, complete = _integrate_dp54(rhs, t0, np.array([q0, qp0, lnd0]), grid,
                                   rtol=tol, atol=tol * 1e-2)
    ok = ~np.isnan(ys[:, 0])
    sig = np.array([sigma_from_q(t, y[0], y[1], theta) if o else np.nan
                    for t, y, o in zip(grid, ys, ok)])
    return TauCurve(t=grid, ln_d=ys[:, 2], sigma=sig, sigma_prime=None,
                    sigma_second=None, i1_drift=None, i2_drift=None,
                    complete=bool(complete))


# ---------------------------------------------------------------------------
# Finite differences and sigma-form residuals
# ---------------------------------------------------------------------------

def fd_weights(offsets: np.ndarray, deriv: int) -> np.ndarray:
    """Weights for sum w_j f(x0 + o_j h) ~ h^deriv f^(deriv)(x0)."""
    offsets = np.asarray(offsets, float)
    k = len(offsets)
    if deriv >= k:
        raise InsufficientGrid("derivative order exceeds stencil size")
    A = np.vander(offsets, k, increasing=True).T
    b = np.zeros(k)
    b[deriv] = factorial(deriv)
    return np.linalg.solve(A, b)


_STENCIL_HALF = 4   # 9-point interior stencils (6th-order accurate)


def _uniform_derivatives(F: np.ndarray, h: float, orders=(1, 2, 3)):
    """Interior derivatives of uniformly sampled F via 9-point stencils.

    Returns arrays aligned with F[_STENCIL_HALF:-_STENCIL_HALF].
    """
    k = 2 * _STENCIL_HALF + 1
    offs = np.arange(-_STENCIL_HALF, _STENCIL_HALF + 1)
    n = len(F) - k + 1
    if n <= 0:
        raise InsufficientGrid(f"need at least {k} samples for the FD stencil")
    out = []
    for m in orders:
        w = fd_weights(offs, m)
        acc = np.zeros(n)
        for j in range(k):
            acc += w[j] * F[j:j + n]
        out.append(acc / h ** m)
    return out


def _uniform_coordinate(grid: np.ndarray):
    """Detect a coordinate u in {x, ln x, ln(1-x)} where grid is uniform.

    Returns (u, x_u, x_uu_over_x_u) with the chain-rule factors evaluated
    on the grid.
    """
    grid = np.asarray(grid, float)
    if len(grid) < 3:
        raise InsufficientGrid("need at least 3 grid points")
    d = np.diff(grid)
    if np.max(np.abs(d - d[0])) <= 1e-8 * abs(d[0]):
        return grid, np.ones_like(grid), np.zeros_like(grid)
    if np.all(grid > 0):
        u = np.log(grid)
        du = np.diff(u)
        if np.max(np.abs(du - du[0])) <= 1e-8 * abs(du[0]):
            return u, grid.copy(), np.ones_like(grid)
    if np.all(grid < 1):
        u = np.log(1.0 - grid)
        du = np.diff(u)
        if np.max(np.abs(du - du[0])) <= 1e-8 * abs(du[0]):
            return u, -(1.0 - grid), np.ones_like(grid)
    raise InsufficientGrid("grid must be uniform in x, log x, or log(1-x)")


def curve_derivatives(curve: SigmaCurve):
    """(grid, sigma, sigma', sigma'') on the interior of the curve.

    Uses stored derivatives when available, otherwise 9-point stencils in
    the uniform coordinate of the grid.
    """
    g = np.asarray(curve.grid, float)
    s = np.asarray(curve.sigma, float)
    if curve.sigma_prime is not None and curve.sigma_second is not None:
        return g, s, np.asarray(curve.sigma_prime, float), np.asarray(curve.sigma_second, float)
    u, x_u, x_uu_ratio = _uniform_coordinate(g)
    h = u[1] - u[0]
    if curve.sigma_prime is not None:
        sp_full = np.asarray(curve.sigma_prime, float)
        (dsp,) = _uniform_derivatives(sp_full, h, orders=(1,))
        core = slice(_STENCIL_HALF, -_STENCIL_HALF)
        s2 = dsp / x_u[core]
        return g[core], s[core], sp_full[core], s2
    d1, d2 = _uniform_derivatives(s, h, orders=(1, 2))
    core = slice(_STENCIL_HALF, -_STENCIL_HALF)
    xu = x_u[core]
    ratio = x_uu_ratio[core]
    sp = d1 / xu
    s2 = (d2 - d1 * ratio) / xu ** 2
    return g[core], s[core], sp, s2


def sigma_form_residual(curve: SigmaCurve, family: str, params) -> ResidualStats:
    """Scaled residual of a sigma-form ODE along a curve.

    family 'pvi' takes the theta 4-vector, 'pv' takes (z, z', w), 'piii'
    takes (z, z').  Residuals are |LHS - RHS| / (1 + |LHS| + |RHS|).
    """
    x, s, sp, s2 = curve_derivatives(curve)
    if family == "pvi":
        th0, th1, tht, thinf = params
        lhs = sp * (x * (x - 1.0) * s2) ** 2 \
            + (2.0 * sp * (x * sp - s) - sp ** 2
               - (tht ** 2 - thinf ** 2) * (th0 ** 2 - th1 ** 2) / 16.0) ** 2
        rhs = (sp + (tht + thinf) ** 2 / 4.0) * (sp + (tht - thinf) ** 2 / 4.0) \
            * (sp + (th0 + th1) ** 2 / 4.0) * (sp + (th0 - th1) ** 2 / 4.0)
    elif family == "pv":
        z, zp, w = params
        lhs = (x * s2) ** 2
        rhs = (2.0 * sp ** 2 - (z + zp + 2.0 * w + x) * sp + s) ** 2 \
            - 4.0 * sp ** 2 * (sp - z - w) * (sp - zp - w)
    elif family == "piii":
        z, zp = params
        lhs = (x * s2) ** 2
        rhs = 4.0 * sp * (sp - 1.0) * (s - x * sp) + (z - zp) ** 2 * sp ** 2
    else:
        raise DomainError(f"unknown sigma-form family {family!r}")
    res = np.abs(lhs - rhs) / (1.0 + np.abs(lhs) + np.abs(rhs))
    res = res[np.isfinite(res)]
    if len(res) == 0:
        raise InsufficientGrid("no finite residual points")
    return ResidualStats(max_scaled=float(np.max(res)),
                         rms_scaled=float(np.sqrt(np.mean(res ** 2))),
                         n_points=len(res))


# ---------------------------------------------------------------------------
# sigma curves of the limiting kernels from log-determinants
# ---------------------------------------------------------------------------

def _log_det_curve(kernel: IntegrableKernel, lo: float, hi: float, n_points: int,
                   order: int, tol: float):
    """ln D on a log-uniform grid padded for the FD stencils."""
    h = (math.log(hi) - math.log(lo)) / (n_points - 1)
    u = math.log(lo) + h * np.arange(-_STENCIL_HALF, n_points + _STENCIL_HALF)
    grid = np.exp(u)
    lnd = np.empty_like(grid)
    for i, s in enumerate(grid):
        res = fredholm.fredholm_det_semiinfinite(kernel, float(s), n=order, tol=tol)
        lnd[i] = math.log1p(-res.one_minus_value)
    return grid, u, h, lnd


def _sigma_curve_semiinfinite(kernel: IntegrableKernel, lo: float, hi: float,
                              n_points: int, order: int, tol: float) -> SigmaCurve:
    grid, u, h, L = _log_det_curve(kernel, lo, hi, n_points, order, tol)
    d1, d2, d3 = _uniform_derivatives(L, h, orders=(1, 2, 3))
    core = slice(_STENCIL_HALF, -_STENCIL_HALF)
    s = grid[core]
    # sigma = s dlnD/ds = L'(u); sigma' = L''/s; sigma'' = (L''' - L'')/s^2
    return SigmaCurve(grid=s, sigma=d1, sigma_prime=d2 / s,
                      sigma_second=(d3 - d2) / s ** 2, lnd=L[core])


def whittaker_sigma_curve(z: float, z_prime: float, w: float,
                          s_lo: float = 0.5, s_hi: float = 20.0,
                          n_points: int = 240, order: int = 96,
                          tol: float = 1e-10) -> SigmaCurve:
    """sigma_L(s) = s d/ds ln D_L(s) from Nystrom determinants."""
    from .kernels import build_whittaker_kernel
    kernel = build_whittaker_kernel(z, z_prime, w)
    return _sigma_curve_semiinfinite(kernel, s_lo, s_hi, n_points, order, tol)


def macdonald_sigma_curve(z: float, z_prime: float,
                          xi_lo: float = 0.2, xi_hi: float = 10.0,
                          n_points: int = 240, order: int = 96,
                          tol: float = 1e-10) -> SigmaCurve:
    """sigma_M(xi) = xi d/dxi ln D_M(xi) from Nystrom determinants."""
    from .kernels import build_macdonald_kernel
    kernel = build_macdonald_kernel(z, z_prime)
    return _sigma_curve_semiinfinite(kernel, xi_lo, xi_hi, n_points, order, tol)
