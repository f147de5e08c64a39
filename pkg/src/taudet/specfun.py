"""Real-argument special functions at double precision.

Log-gamma machinery (ratios with sign tracking), digamma/trigamma,
Barnes G, Gauss 2F1, Whittaker W and Macdonald K.  Everything here is a
pure function; precomputed constants are module-level literals.

The gamma-family and hypergeometric evaluators are thin validated
wrappers over scipy.special (mature, vectorized); the Barnes G function
has no scipy counterpart and is computed from its recursion plus an
asymptotic series with Bernoulli corrections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import special as sp

from .errors import DomainError, NonConvergence, SingularGamma

# 20-digit constant literals.
EULER_GAMMA = 0.57721566490153286061
CATALAN = 0.91596559417721901505
GLAISHER_A = 1.2824271291006226369
LN_GLAISHER = 0.24875447703378426255
LN_2PI = 1.8378770664093454836

# Barnes G: arguments are shifted above this threshold before the
# asymptotic series (Bernoulli terms through B10) is applied; at this
# threshold the first omitted term is ~1e-13 absolute.
_BARNES_SHIFT = 12.0
# B_{2k+2} / (4 k (k+1)) for k = 1..4, i.e. B4, B6, B8, B10 corrections.
_BARNES_SERIES = (
    (-1.0 / 30.0) / 8.0,
    (1.0 / 42.0) / 24.0,
    (-1.0 / 30.0) / 48.0,
    (5.0 / 66.0) / 80.0,
)

_INT_TOL = 1e-12


def is_nonpositive_integer(x: float, tol: float = _INT_TOL) -> bool:
    """True when x sits on a gamma pole {0, -1, -2, ...} within tol."""
    return x <= tol and abs(x - round(x)) <= tol


def is_integer(x: float, tol: float = _INT_TOL) -> bool:
    return abs(x - round(x)) <= tol


def log_gamma(x: float) -> float:
    """ln|Gamma(x)| for real non-pole x."""
    if is_nonpositive_integer(x):
        raise SingularGamma(f"Gamma pole at x = {x}")
    return float(sp.gammaln(x))


def gamma_sign(x: float) -> float:
    """Sign of Gamma(x) (+1 for x > 0, alternating between poles)."""
    if is_nonpositive_integer(x):
        raise SingularGamma(f"Gamma pole at x = {x}")
    return float(sp.gammasgn(x))


@dataclass(frozen=True)
class GammaRatioSpec:
    """Product of gammas over product of gammas, Gamma[a1,... / b1,...]."""

    numerator_args: tuple = field(default_factory=tuple)
    denominator_args: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "numerator_args", tuple(float(a) for a in self.numerator_args))
        object.__setattr__(self, "denominator_args", tuple(float(a) for a in self.denominator_args))


def log_gamma_ratio(spec: GammaRatioSpec) -> float:
    """Sum ln|Gamma| over numerators minus denominators.

    Raises SingularGamma when any argument is a non-positive integer;
    a denominator pole makes the ratio an explicit zero, which the
    signed companion `gamma_ratio` reports as 0.0 instead.
    """
    tot = 0.0
    for a in spec.numerator_args:
        tot += log_gamma(a)
    for b in spec.denominator_args:
        tot -= log_gamma(b)
    return tot


def gamma_ratio(spec: GammaRatioSpec) -> float:
    """Signed value of the gamma bracket; 0.0 on a denominator pole."""
    for b in spec.denominator_args:
        if is_nonpositive_integer(b):
            for a in spec.numerator_args:
                if is_nonpositive_integer(a):
                    raise SingularGamma("pole over pole in gamma bracket")
            return 0.0
    sign = 1.0
    for a in spec.numerator_args:
        sign *= gamma_sign(a)
    for b in spec.denominator_args:
        sign *= gamma_sign(b)
    return sign * math.exp(log_gamma_ratio(spec))


def digamma(x: float) -> float:
    """psi(x) for real non-pole x."""
    if is_nonpositive_integer(x):
        raise SingularGamma(f"digamma pole at x = {x}")
    return float(sp.psi(x))


def trigamma(x: float) -> float:
    """psi'(x) for real non-pole x."""
    if is_nonpositive_integer(x):
        raise SingularGamma(f"trigamma pole at x = {x}")
    return float(sp.polygamma(1, x))


def _log_barnes_asymptotic(x: float) -> float:
    # ln G(1+Z) with Z = x-1 >= _BARNES_SHIFT - 1; series through B10.
    Z = x - 1.0
    s = (Z * Z / 2.0 - 1.0 / 12.0) * math.log(Z) - 0.75 * Z * Z + 0.5 * Z * LN_2PI \
        + 1.0 / 12.0 - LN_GLAISHER
    z2 = Z * Z
    pw = z2
    for coeff in _BARNES_SERIES:
        s += coeff / pw
        pw *= z2
    return s


def log_barnes_g(x: float) -> float:
    """ln G(x) for x > 0, via G(x+1) = Gamma(x) G(x) and the large-x series."""
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"Barnes G requires x > 0, got {x}")
    shift = 0.0
    while x < _BARNES_SHIFT:
        shift += float(sp.gammaln(x))
        x += 1.0
    return _log_barnes_asymptotic(x) - shift


@dataclass(frozen=True)
class BarnesRatioSpec:
    """Product of Barnes G's over product of Barnes G's, G[a1,... / b1,...]."""

    numerator_args: tuple = field(default_factory=tuple)
    denominator_args: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "numerator_args", tuple(float(a) for a in self.numerator_args))
        object.__setattr__(self, "denominator_args", tuple(float(a) for a in self.denominator_args))


def log_barnes_ratio(spec: BarnesRatioSpec) -> float:
    """Sum ln G over numerators minus denominators (all arguments > 0)."""
    tot = 0.0
    for a in spec.numerator_args:
        tot += log_barnes_g(a)
    for b in spec.denominator_args:
        tot -= log_barnes_g(b)
    return tot


def hyp2f1(a: float, b: float, c: float, x) -> float | np.ndarray:
    """Gauss 2F1(a, b; c; x) for real parameters and x < 1.

    The kernels only evaluate on x <= 0 (mapped argument x/(x-1)); small
    positive x is additionally allowed for the q-route initial data.
    Delegates to scipy's C implementation, which applies the standard
    argument transformations and handles a - b in Z by its dedicated
    degenerate-case series.
    """
    if is_nonpositive_integer(c):
        raise SingularGamma(f"2F1 parameter c on a pole: c = {c}")
    xa = np.asarray(x, dtype=float)
    if np.any(xa >= 1.0):
        raise DomainError("2F1 supported for x < 1 only")
    out = sp.hyp2f1(a, b, c, xa)
    if not np.all(np.isfinite(out)):
        raise NonConvergence(f"2F1({a}, {b}; {c}; ...) did not converge")
    return float(out) if np.isscalar(x) else out


def hyp2f1_prime(a: float, b: float, c: float, x) -> float | np.ndarray:
    """d/dx 2F1(a, b; c; x) = (a b / c) 2F1(a+1, b+1; c+1; x)."""
    return a * b / c * hyp2f1(a + 1.0, b + 1.0, c + 1.0, x)


def confluent_u(a: float, b: float, x) -> float | np.ndarray:
    """Tricomi confluent U(a, b, x) for x > 0 (scipy backend, validated)."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0.0):
        raise DomainError("confluent U supported for x > 0 only")
    out = sp.hyperu(a, b, xa)
    if not np.all(np.isfinite(out)):
        raise NonConvergence(f"U({a}, {b}, ...) evaluation failed")
    return float(out) if np.isscalar(x) else out


def whittaker_w(kappa_idx: float, mu_idx: float, x) -> float | np.ndarray:
    """Whittaker W_{kappa,mu}(x) for x > 0.

    Computed on the confluent-U route
    W = exp(-x/2) x^(mu+1/2) U(mu - kappa + 1/2, 1 + 2 mu, x),
    using |mu| (W is even in mu).
    """
    mu = abs(float(mu_idx))
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0.0):
        raise DomainError("Whittaker W supported for x > 0 only")
    a = mu - float(kappa_idx) + 0.5
    b = 1.0 + 2.0 * mu
    out = np.exp(-xa / 2.0) * xa ** (mu + 0.5) * sp.hyperu(a, b, xa)
    if not np.all(np.isfinite(out)):
        raise NonConvergence(f"W_({kappa_idx},{mu_idx}) evaluation failed")
    return float(out) if np.isscalar(x) else out


def bessel_k(nu: float, x) -> float | np.ndarray:
    """Macdonald function K_nu(x) for x > 0 (symmetric in nu)."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0.0):
        raise DomainError("K_nu supported for x > 0 only")
    out = sp.kv(nu, xa)
    if not np.all(np.isfinite(out)):
        raise NonConvergence(f"K_{nu} evaluation failed")
    return float(out) if np.isscalar(x) else out


def gamma_bracket(num: Sequence[float], den: Sequence[float]) -> float:
    """Shorthand for gamma_ratio(GammaRatioSpec(num, den))."""
    return gamma_ratio(GammaRatioSpec(tuple(num), tuple(den)))


def barnes_bracket(num: Sequence[float], den: Sequence[float]) -> float:
    """Shorthand for exp(log_barnes_ratio(BarnesRatioSpec(num, den)))."""
    return math.exp(log_barnes_ratio(BarnesRatioSpec(tuple(num), tuple(den))))
