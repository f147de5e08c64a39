"""Endpoint expansions, conjectured Barnes constants, and extraction.

Carries every closed-form expansion coefficient: the small-t coefficient
kappa, the t -> 1 bracket (power and logarithmic cases), the analogous
s -> 0 / xi -> 0 brackets of the Whittaker and Macdonald determinants,
and the conjectured connection constants C, C_L, C_M as Barnes-function
ratios.  `extract_constant` confronts computed determinant samples with
a model bracket by linear least squares.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import specfun
from .errors import DomainError, IllConditionedFit
from .kernels import KernelParams

_LOG_CASE_TOL = 1e-8
_SLOW_CONVERGENCE = 1e-3


@dataclass(frozen=True)
class AsymptoticModel:
    """Exponent and coefficients of an endpoint expansion of a determinant.

    endpoint is one of 't0', 't1', 's0', 'xi0'; the expansion variable tau
    is t, 1-t, s, xi respectively.  Power case bracket:
        1 + linear tau - a_plus tau^(1+Z) - a_minus tau^(1-Z),  Z = z+z'.
    Logarithmic case (z+z' = 0) bracket:
        1 + omega_sq tau (W^2+2W+3) + omega_lin tau (W+1),
        W = 1 - a_prime - ln tau.
    """

    endpoint: str
    leading_exponent: float
    coefficients: dict = field(default_factory=dict)
    is_log_case: bool = False

    def bracket(self, tau: np.ndarray) -> np.ndarray:
        tau = np.asarray(tau, float)
        co = self.coefficients
        if self.is_log_case:
            W = 1.0 - co["a_prime"] - np.log(tau)
            return 1.0 + co["omega_sq"] * tau * (W * W + 2.0 * W + 3.0) \
                + co.get("omega_lin", 0.0) * tau * (W + 1.0)
        Z = co["z_sum"]
        return 1.0 + co["linear"] * tau - co["a_plus"] * tau ** (1.0 + Z) \
            - co["a_minus"] * tau ** (1.0 - Z)

    def model_values(self, tau: np.ndarray) -> np.ndarray:
        """tau^exponent * bracket, the full model shape up to the constant."""
        tau = np.asarray(tau, float)
        return tau ** self.leading_exponent * self.bracket(tau)

    @property
    def default_fit_exponent(self) -> float:
        if self.is_log_case:
            return 2.0
        return 2.0 - 2.0 * self.coefficients["z_sum"]


@dataclass(frozen=True)
class ExtractionReport:
    """Result of confronting determinant samples with a conjectured constant."""

    extracted_C: float
    conjectured_C: float
    abs_error: float
    fit_window: tuple
    diagnostics: dict = field(default_factory=dict)


def kappa(p: KernelParams) -> float:
    """Small-t coefficient: D(t) = 1 - kappa t^(1+c) + O(t^(2+c))."""
    z, zp, w, wp = p.astuple()
    c = p.c
    if specfun.is_integer(z) or specfun.is_integer(zp):
        return 0.0
    bracket = specfun.gamma_bracket(
        [1 + z + w, 1 + z + wp, 1 + zp + w, 1 + zp + wp], [2 + c, 2 + c])
    return math.sin(math.pi * z) * math.sin(math.pi * zp) / math.pi ** 2 * bracket


def _check_t1_preconditions(z, zp, w, wp):
    Z = z + zp
    if not 0.0 <= Z < 1.0 - 1e-14:
        raise DomainError(f"t->1 expansion requires 0 <= z+z' < 1, got {Z}")
    for name, val in (("z", z), ("z'", zp), ("w", w), ("w'", wp),
                      ("z+z'+w", Z + w), ("z+z'+w'", Z + wp)):
        if specfun.is_integer(val):
            raise DomainError(f"t->1 expansion requires {name} not an integer, got {val}")


def _a_plus_minus(z, zp, w, wp):
    Z = z + zp
    ap = specfun.gamma_bracket(
        [-Z, -Z, 1 + z, 1 + zp, 1 + w + Z, 1 + wp + Z],
        [2 + Z, 2 + Z, -z, -zp, w, wp])
    am = specfun.gamma_bracket(
        [Z, Z, 1 - z, 1 - zp, 1 + w, 1 + wp],
        [2 - Z, 2 - Z, z, zp, w + Z, wp + Z])
    return ap, am


def t1_expansion(p: KernelParams) -> AsymptoticModel:
    """t -> 1 expansion model of D(t) (power case, or log case at z+z' = 0)."""
    z, zp, w, wp = p.astuple()
    Z = z + zp
    if abs(Z) < _LOG_CASE_TOL:
        for name, val in (("z", z), ("w", w), ("w'", wp)):
            if specfun.is_integer(val):
                raise DomainError(f"log-case expansion requires {name} not an integer")
        a_prime = specfun.digamma(1 + z) + specfun.digamma(1 - z) \
            + specfun.digamma(1 + w) + specfun.digamma(1 + wp) - 4.0 * specfun.digamma(1.0)
        return AsymptoticModel(
            endpoint="t1", leading_exponent=-z * z, is_log_case=True,
            coefficients={"a_prime": a_prime, "omega_sq": z * z * w * wp,
                          "omega_lin": z * z * (w + wp)})
    if abs(Z) < _SLOW_CONVERGENCE:
        warnings.warn(f"z+z' = {Z}: power-case expansion converges slowly near the log case")
    _check_t1_preconditions(z, zp, w, wp)
    ap, am = _a_plus_minus(z, zp, w, wp)
    linear = z * zp * ((Z + w) * (Z + wp) + w * wp) / Z ** 2
    return AsymptoticModel(
        endpoint="t1", leading_exponent=z * zp,
        coefficients={"z_sum": Z, "linear": linear, "a_plus": ap, "a_minus": am})


def conjectured_C(p: KernelParams) -> float:
    """Conjectured connection constant C as an 8-over-6 Barnes bracket."""
    z, zp, w, wp = p.astuple()
    Z = z + zp
    num = [1 - z, 1 + z, 1 - zp, 1 + zp, 1 + w, 1 + wp, 1 + Z + w, 1 + Z + wp]
    den = [1 - Z, 1 + Z, 1 + z + w, 1 + z + wp, 1 + zp + w, 1 + zp + wp]
    return specfun.barnes_bracket(num, den)


def limit_constants_pv(z: float, z_prime: float, w: float):
    """(AsymptoticModel, C_L) for the Whittaker determinant at s -> 0."""
    z, zp, w = float(z), float(z_prime), float(w)
    Z = z + zp
    for name, val in (("z", z), ("z'", zp), ("w", w), ("z+z'+w", Z + w)):
        if specfun.is_integer(val):
            raise DomainError(f"PV limit requires {name} not an integer, got {val}")
    cl = specfun.barnes_bracket(
        [1 - z, 1 + z, 1 - zp, 1 + zp, 1 + w, 1 + Z + w],
        [1 - Z, 1 + Z, 1 + z + w, 1 + zp + w])
    if abs(Z) < _LOG_CASE_TOL:
        a_prime = specfun.digamma(1 + z) + specfun.digamma(1 - z) \
            + specfun.digamma(1 + w) - 4.0 * specfun.digamma(1.0)
        model = AsymptoticModel(
            endpoint="s0", leading_exponent=-z * z, is_log_case=True,
            coefficients={"a_prime": a_prime, "omega_sq": z * z * w,
                          "omega_lin": z * z})
        return model, cl
    if not 0.0 <= Z < 1.0:
        raise DomainError(f"PV limit requires 0 <= z+z' < 1, got {Z}")
    ap = specfun.gamma_bracket(
        [-Z, -Z, 1 + z, 1 + zp, 1 + w + Z], [2 + Z, 2 + Z, -z, -zp, w])
    am = specfun.gamma_bracket(
        [Z, Z, 1 - z, 1 - zp, 1 + w], [2 - Z, 2 - Z, z, zp, w + Z])
    model = AsymptoticModel(
        endpoint="s0", leading_exponent=z * zp,
        coefficients={"z_sum": Z, "linear": z * zp * (Z + 2.0 * w) / Z ** 2,
                      "a_plus": ap, "a_minus": am})
    return model, cl


def limit_constants_piii(z: float, z_prime: float):
    """(AsymptoticModel, C_M) for the Macdonald determinant at xi -> 0."""
    z, zp = float(z), float(z_prime)
    Z = z + zp
    if specfun.is_integer(z) or specfun.is_integer(zp):
        raise DomainError("PIII limit requires z, z' not integers")
    cm = specfun.barnes_bracket([1 - z, 1 + z, 1 - zp, 1 + zp], [1 - Z, 1 + Z])
    if abs(Z) < _LOG_CASE_TOL:
        a_prime = specfun.digamma(1 + z) + specfun.digamma(1 - z) - 4.0 * specfun.digamma(1.0)
        model = AsymptoticModel(
            endpoint="xi0", leading_exponent=-z * z, is_log_case=True,
            coefficients={"a_prime": a_prime, "omega_sq": z * z, "omega_lin": 0.0})
        return model, cm
    if not 0.0 <= Z < 1.0:
        raise DomainError(f"PIII limit requires 0 <= z+z' < 1, got {Z}")
    ap = specfun.gamma_bracket([-Z, -Z, 1 + z, 1 + zp], [2 + Z, 2 + Z, -z, -zp])
    am = specfun.gamma_bracket([Z, Z, 1 - z, 1 - zp], [2 - Z, 2 - Z, z, zp])
    model = AsymptoticModel(
        endpoint="xi0", leading_exponent=z * zp,
        coefficients={"z_sum": Z, "linear": 2.0 * z * zp / Z ** 2,
                      "a_plus": ap, "a_minus": am})
    return model, cm


def tracy_beta(nu: float) -> tuple:
    """Exponent alpha(nu) and constant beta(nu) of the sinh-Gordon tau function.

    sigma(nu) = (2/pi) arcsin(pi nu); alpha = sigma^2/2; beta carries the
    G[1/2,1/2 / (1+sigma)/2, (1-sigma)/2] bracket.  Valid for 0 <= nu < 1/pi.
    """
    nu = float(nu)
    if not 0.0 <= nu < 1.0 / math.pi:
        raise DomainError(f"tracy_beta requires 0 <= nu < 1/pi, got {nu}")
    sig = 2.0 / math.pi * math.asin(math.pi * nu)
    alpha = sig * sig / 2.0
    log_gbr = 2.0 * specfun.log_barnes_g(0.5) \
        - specfun.log_barnes_g((1.0 + sig) / 2.0) - specfun.log_barnes_g((1.0 - sig) / 2.0)
    beta = 3.0 * alpha * math.log(2.0) + 0.5 * math.log(1.0 - (math.pi * nu) ** 2) \
        - 2.0 * math.log(math.cos(math.pi * sig / 2.0)) - 2.0 * log_gbr
    return alpha, beta


def extract_constant(samples, model: AsymptoticModel, conjectured: float = float("nan"),
                     fit_exponent: float | None = None,
                     window: tuple = (1e-3, 5e-2)) -> ExtractionReport:
    """Extract the constant prefactor from determinant samples.

    samples: array-like of (x, D) rows, x being t for endpoint 't1' and
    the expansion variable itself otherwise.  The model bracket is divided
    out and E(tau) = C (1 + e1 tau^beta) is fitted by least squares with
    exactly one correction exponent beta (default 2 - 2(z+z'), 2 in the
    log case).
    """
    arr = np.asarray(samples, float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DomainError("samples must be an (N, 2) array of (x, D)")
    x, d = arr[:, 0], arr[:, 1]
    tau = 1.0 - x if model.endpoint == "t1" else x
    lo, hi = window
    keep = (tau >= lo) & (tau <= hi)
    tau, d = tau[keep], d[keep]
    if len(tau) < 4:
        raise DomainError(f"need at least 4 samples inside the window {window}")
    order = np.argsort(tau)
    tau, d = tau[order], d[order]

    E = d / model.model_values(tau)
    beta = model.default_fit_exponent if fit_exponent is None else float(fit_exponent)
    X = np.column_stack([np.ones_like(tau), tau ** beta])
    sv = np.linalg.svd(X, compute_uv=False)
    cond = sv[0] / sv[-1]
    if cond > 1e8:
        raise IllConditionedFit(f"fit condition number {cond:.2e} > 1e8 for window {window}")
    coef, _, _, _ = np.linalg.lstsq(X, E, rcond=None)
    c_fit = float(coef[0])
    resid = E - X @ coef
    dof = max(len(tau) - 2, 1)
    s2 = float(resid @ resid) / dof
    cov00 = s2 * float(np.linalg.inv(X.T @ X)[0, 0])

    # residual decay rate: slope of ln|resid| against ln tau
    mask = np.abs(resid) > 0
    if np.count_nonzero(mask) >= 3:
        slope = np.polyfit(np.log(tau[mask]), np.log(np.abs(resid[mask])), 1)[0]
    else:
        slope = float("nan")

    return ExtractionReport(
        extracted_C=c_fit,
        conjectured_C=float(conjectured),
        abs_error=abs(c_fit - conjectured) if math.isfinite(conjectured) else float("nan"),
        fit_window=(float(lo), float(hi)),
        diagnostics={
            "fit_exponent": beta,
            "correction_coeff": float(coef[1] / c_fit) if c_fit != 0 else float("nan"),
            "fit_stderr": math.sqrt(cov00),
            "residual_decay_rate": float(slope),
            "condition_number": float(cond),
            "n_samples": int(len(tau)),
        })
