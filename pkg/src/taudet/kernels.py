"""Integrable kernels: hypergeometric, Whittaker and Macdonald.

Each kernel is K(x, y) = lam * (A(x) B(y) - B(x) A(y)) / (den_sign * (x - y))
with smooth A, B on the domain; den_sign = -1 for the hypergeometric
kernel (paper convention (y - x)) and +1 for the two limiting kernels.
Diagonal values come from exact derivative relations, never finite
differences.

Parameter quadruples carry the admissibility condition (C4); symmetries
S1/S2/S3 and the Palmer-Beatty-Tracy parameter identification live here
as pure parameter maps.  Kernels are immutable after construction and
evaluation is pure, so concurrent sampling is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import specfun
from .errors import DegenerateParams, DomainError, NoAdmissibleBranch, NonConvergence

# Parameters beyond this magnitude switch pointwise kernel evaluation to
# the arbitrary-precision backend (scaling-limit regimes, w' ~ 1e3).
_EXTREME_PARAM = 50.0

_DEGENERACY_TOL = 1e-6


def _is_negative_integer(x: float, tol: float = 1e-9) -> bool:
    return x < -0.5 and abs(x - round(x)) <= tol


@dataclass(frozen=True)
class KernelParams:
    """Quadruple (z, z', w, w') subject to the invariant condition (C4)."""

    z: float
    z_prime: float
    w: float
    w_prime: float

    def __post_init__(self):
        for name, val in (("z+w", self.z + self.w), ("z+w'", self.z + self.w_prime),
                          ("z'+w", self.z_prime + self.w), ("z'+w'", self.z_prime + self.w_prime)):
            if _is_negative_integer(val):
                raise DomainError(f"(C4) violated: {name} = {val} is a negative integer")
        if not self.c > 0.0:
            raise DomainError(f"(C4) violated: z+z'+w+w' = {self.c} must be positive")

    @property
    def c(self) -> float:
        return self.z + self.z_prime + self.w + self.w_prime

    @property
    def theta(self) -> tuple:
        """PVI parameter vector (theta_0, theta_1, theta_t, theta_inf)."""
        return (self.c, self.z - self.z_prime, 0.0, self.w - self.w_prime)

    def satisfies_c123(self) -> bool:
        """Real-branch sufficient conditions (C1)-(C3) of the trace-class regime."""
        z, zp, w, wp = self.z, self.z_prime, self.w, self.w_prime
        c1 = math.floor(z) == math.floor(zp) and not specfun.is_integer(z) and not specfun.is_integer(zp)
        c2 = math.floor(w) == math.floor(wp) and not specfun.is_integer(w) and not specfun.is_integer(wp)
        c3 = self.c > 0 and abs(z + zp) < 1 and abs(w + wp) < 1
        return c1 and c2 and c3

    def astuple(self) -> tuple:
        return (self.z, self.z_prime, self.w, self.w_prime)


_SYMMETRIES = ("S1a", "S1b", "S2", "S3plus", "S3minus")


def apply_symmetry(p: KernelParams, which: str) -> KernelParams:
    """Apply one of the kernel parameter symmetries S1a/S1b/S2/S3+-."""
    z, zp, w, wp = p.astuple()
    if which == "S1a":
        out = (zp, z, w, wp)
    elif which == "S1b":
        out = (z, zp, wp, w)
    elif which == "S2":
        out = (-z, -zp, wp + z + zp, w + z + zp)
    elif which == "S3plus":
        out = (z + 1, zp + 1, w - 1, wp - 1)
    elif which == "S3minus":
        out = (z - 1, zp - 1, w + 1, wp + 1)
    else:
        raise DomainError(f"unknown symmetry {which!r}; expected one of {_SYMMETRIES}")
    return KernelParams(*out)


@dataclass(frozen=True)
class PBTParams:
    """Dirac-operator tau-function parameters (mu, nu1, nu2, b)."""

    mu: float
    nu1: float
    nu2: float
    b: float

    def __post_init__(self):
        if not (-1.0 < self.nu1 < 0.0 and -1.0 < self.nu2 < 0.0):
            raise DomainError("PBT fluxes must satisfy -1 < nu1, nu2 < 0")
        if not self.mu > 0.0:
            raise DomainError("PBT mass parameter mu must be positive")


def pbt_branch_candidates(p: PBTParams) -> list:
    """Admissible values of z+z' mod the cosine identification, sorted.

    cos(pi (z+z')) = cos(pi (nu1+nu2)) fixes z+z' up to sign and 2Z;
    representatives are taken in [0, 2) and ordered with the ones inside
    [0, 1) first.
    """
    s = p.nu1 + p.nu2
    cands = sorted({round((s % 2.0), 15), round(((-s) % 2.0), 15)})
    inside = [v for v in cands if v < 1.0]
    outside = [v for v in cands if v >= 1.0]
    return inside + outside


def map_pbt_params(p: PBTParams, branch: int = 0) -> KernelParams:
    """Kernel parameters equivalent to PBT parameters.

    Solves z+z'+w+w' = 2 mu, z-z' = nu1-nu2, w-w' = 2+nu1+nu2-2b with
    z+z' on the branch selected from `pbt_branch_candidates` (branch 0
    prefers Re(z+z') in [0, 1) when possible).
    """
    cands = pbt_branch_candidates(p)
    if not cands:
        raise NoAdmissibleBranch("no candidate value for z+z'")
    zsum = cands[branch % len(cands)]
    zdiff = p.nu1 - p.nu2
    wsum = 2.0 * p.mu - zsum
    wdiff = 2.0 + p.nu1 + p.nu2 - 2.0 * p.b
    try:
        return KernelParams(0.5 * (zsum + zdiff), 0.5 * (zsum - zdiff),
                            0.5 * (wsum + wdiff), 0.5 * (wsum - wdiff))
    except DomainError as exc:
        raise NoAdmissibleBranch(f"branch {branch} violates (C4): {exc}") from exc


def kappa_pbt(p: PBTParams) -> float:
    """Leading small-(1-s) coefficient of the PBT tau function."""
    mu, n1, n2, b = p.mu, p.nu1, p.nu2, p.b
    bracket = specfun.gamma_bracket(
        [2 + mu + n1 - b, mu - n1 + b, 2 + mu + n2 - b, mu - n2 + b],
        [2 + 2 * mu, 2 + 2 * mu])
    return math.sin(math.pi * n1) * math.sin(math.pi * n2) / math.pi ** 2 * bracket


@dataclass(frozen=True)
class TWNormalization:
    """Tracy-Widom (phi, psi) normalization data in the diagonal gauge.

    phi = chat (A + rho B), psi = -chat (A + eta B) up to the imaginary
    unit: quad_sign = sign(const^2) with const^2 = -lam (1+c)/(w-w'), and
    chat = sqrt(|const^2|).  Quadratic monomials in the true (phi, psi)
    equal quad_sign times the same monomials in the stored real pair.
    """

    alpha0: float
    beta0: float
    gamma0: float
    alpha1: float
    rho: float
    eta: float
    chat: float
    quad_sign: float
    const_sq: float


class IntegrableKernel:
    """Evaluable kernel K(x,y) = lam (A(x)B(y) - B(x)A(y)) / (den_sign (x-y)).

    `ab` and `ab_prime` are vectorized over x; `k_point` uses a signed
    log-space path that stays finite in extreme-parameter regimes where
    A, B themselves overflow.
    """

    def __init__(self, name: str, domain: str, lam_sign: float, lam_log: float,
                 den_sign: float, ab: Callable, ab_prime: Callable,
                 ab_log: Callable, vanish_exponent: float,
                 decay: Optional[str] = None, tail_power: float = 0.0,
                 params: object = None, tw: Optional[TWNormalization] = None):
        self.name = name
        self.domain = domain  # 'finite' on (0,1) or 'semi_infinite' on (0,inf)
        self.lam_sign = lam_sign
        self.lam_log = lam_log
        self.den_sign = den_sign
        self.ab = ab
        self.ab_prime = ab_prime
        self.ab_log = ab_log
        self.vanish_exponent = vanish_exponent
        self.decay = decay
        self.tail_power = tail_power
        self.params = params
        self._tw = tw

    @property
    def lam(self) -> float:
        val = self.lam_sign * math.exp(self.lam_log)
        if not math.isfinite(val):
            raise NonConvergence("lam overflows in float; use k_point (log path)")
        return val

    @property
    def tw_normalization(self) -> TWNormalization:
        if self._tw is None:
            raise DegenerateParams(
                f"{self.name}: Tracy-Widom route unavailable (w = w' degeneracy or limiting kernel)")
        return self._tw

    # -- Tracy-Widom pair (phi, psi) with K = (phi psi - psi phi)/(x-y) --

    @property
    def _tw_sign(self) -> float:
        return -self.den_sign * self.lam_sign

    def phi(self, x):
        A, B = self.ab(np.asarray(x, float))
        return math.exp(0.5 * self.lam_log) * B

    def psi(self, x):
        A, B = self.ab(np.asarray(x, float))
        return self._tw_sign * math.exp(0.5 * self.lam_log) * A

    def phi_psi_prime(self, x):
        Ap, Bp = self.ab_prime(np.asarray(x, float))
        r = math.exp(0.5 * self.lam_log)
        return r * Bp, self._tw_sign * r * Ap

    # -- kernel values --

    def k_point(self, x: float, y: float) -> float:
        """Robust scalar evaluation (handles extreme parameter regimes)."""
        if abs(x - y) < 1e-13 * max(1.0, abs(x)):
            return float(self.diag(np.asarray([x]))[0])
        la_x, sa_x, lb_x, sb_x = self.ab_log(np.asarray([x]))
        la_y, sa_y, lb_y, sb_y = self.ab_log(np.asarray([y]))
        P = float(la_x[0] + lb_y[0])
        Q = float(lb_x[0] + la_y[0])
        m = max(P, Q)
        num = sa_x[0] * sb_y[0] * math.exp(P - m) - sb_x[0] * sa_y[0] * math.exp(Q - m)
        return self.lam_sign * math.exp(self.lam_log + m) * num / (self.den_sign * (x - y))

    def diag(self, x: np.ndarray) -> np.ndarray:
        """K(x, x) = lam (A'B - AB') / den_sign from the derivative oracle."""
        x = np.asarray(x, float)
        A, B = self.ab(x)
        Ap, Bp = self.ab_prime(x)
        return self.lam / self.den_sign * (Ap * B - A * Bp)

    def k_matrix(self, x: np.ndarray) -> np.ndarray:
        """Full kernel matrix on a node set (moderate parameters)."""
        x = np.asarray(x, float)
        A, B = self.ab(x)
        num = A[:, None] * B[None, :] - B[:, None] * A[None, :]
        dd = self.den_sign * (x[:, None] - x[None, :])
        n = len(x)
        out = np.empty((n, n))
        off = ~np.eye(n, dtype=bool)
        out[off] = self.lam * num[off] / dd[off]
        out[np.diag_indices(n)] = self.diag(x)
        if not np.all(np.isfinite(out)):
            raise NonConvergence(f"{self.name}: kernel matrix has non-finite entries")
        return out


def _log_abs_sign(values: np.ndarray):
    sign = np.sign(values)
    with np.errstate(divide="ignore"):
        return np.log(np.abs(values)), sign


def build_f21_kernel(p: KernelParams) -> IntegrableKernel:
    """Hypergeometric kernel on (0, 1) with Tracy-Widom normalization.

    The (phi, psi) normalization requires |w - w'| > 1e-6; at the
    degeneracy the kernel itself remains evaluable but the TW route is
    disabled (`tw_normalization` raises DegenerateParams).
    """
    z, zp, w, wp = p.astuple()
    a, b, c = z + wp, zp + wp, p.c

    sin_fac = math.sin(math.pi * z) * math.sin(math.pi * zp)
    lam_log = (math.log(abs(sin_fac) / math.pi ** 2) if sin_fac != 0.0 else -math.inf)
    lam_log += specfun.log_gamma_ratio(specfun.GammaRatioSpec(
        (1 + z + w, 1 + z + wp, 1 + zp + w, 1 + zp + wp), (1 + c, 2 + c)))
    lam_sign = math.copysign(1.0, sin_fac) * _gamma_ratio_sign(
        (1 + z + w, 1 + z + wp, 1 + zp + w, 1 + zp + wp), (1 + c, 2 + c))

    extreme = max(abs(a), abs(b), abs(c)) > _EXTREME_PARAM

    if extreme:
        ab_fn, ab_prime_fn, ab_log_fn = _f21_ab_mpmath(z, zp, w, wp)
    else:
        ab_fn, ab_prime_fn, ab_log_fn = _f21_ab_scipy(z, zp, w, wp)

    tw = None
    if abs(w - wp) > _DEGENERACY_TOL and not extreme:
        lam = lam_sign * math.exp(lam_log)
        const_sq = -lam * (1.0 + c) / (w - wp)
        den = c - a - b  # = w - w'
        tw = TWNormalization(
            alpha0=-c / 2.0 - a * b / den,
            beta0=-(c - a) * (c - b) / den,
            gamma0=-a * b / den,
            alpha1=den / 2.0,
            rho=(c - a) * (c - b) / (c * (1.0 + c)),
            eta=a * b / (c * (1.0 + c)),
            chat=math.sqrt(abs(const_sq)),
            quad_sign=math.copysign(1.0, const_sq),
            const_sq=const_sq,
        )

    return IntegrableKernel(
        name="hypergeometric", domain="finite",
        lam_sign=lam_sign, lam_log=lam_log, den_sign=-1.0,
        ab=ab_fn, ab_prime=ab_prime_fn, ab_log=ab_log_fn,
        vanish_exponent=c, params=p, tw=tw)


def _gamma_ratio_sign(num, den) -> float:
    s = 1.0
    for v in num:
        s *= specfun.gamma_sign(v)
    for v in den:
        s *= specfun.gamma_sign(v)
    return s


def _f21_ab_scipy(z, zp, w, wp):
    a, b = z + wp, zp + wp
    c = z + zp + w + wp
    half_pow = (z + zp + 2.0 * wp) / 2.0

    def ab(x):
        x = np.asarray(x, float)
        u = x / (x - 1.0)
        f1 = specfun.hyp2f1(a, b, c, u)
        f2 = specfun.hyp2f1(1 + a, 1 + b, 2 + c, u)
        A = x ** (c / 2.0) * (1.0 - x) ** (-half_pow) * f1
        B = x ** (1 + c / 2.0) * (1.0 - x) ** (-1.0 - half_pow) * f2
        return A, B

    den = c - a - b  # = w - w'
    if abs(den) > _DEGENERACY_TOL:
        # (A, B)' = M^{-1} (A0 + x A1) M (A, B) / (x (1 - x))  [diagonal gauge]
        A0 = np.array([[-c / 2.0 - a * b / den, -(c - a) * (c - b) / den],
                       [a * b / den, c / 2.0 + a * b / den]])
        A1 = np.array([[den / 2.0, 0.0], [0.0, -den / 2.0]])
        M = np.array([[1.0, (c - a) * (c - b) / (c * (1.0 + c))],
                      [-1.0, -a * b / (c * (1.0 + c))]])
        Minv = np.linalg.inv(M)
        N0 = Minv @ A0 @ M
        N1 = Minv @ A1 @ M

        def ab_prime(x):
            x = np.asarray(x, float)
            A, B = ab(x)
            d = x * (1.0 - x)
            Ap = ((N0[0, 0] + x * N1[0, 0]) * A + (N0[0, 1] + x * N1[0, 1]) * B) / d
            Bp = ((N0[1, 0] + x * N1[1, 0]) * A + (N0[1, 1] + x * N1[1, 1]) * B) / d
            return Ap, Bp
    else:
        # non-diagonalizable case: differentiate the closed forms directly
        def ab_prime(x):
            x = np.asarray(x, float)
            A, B = ab(x)
            u = x / (x - 1.0)
            dudx = -1.0 / (1.0 - x) ** 2
            f1p = specfun.hyp2f1_prime(a, b, c, u)
            f2p = specfun.hyp2f1_prime(1 + a, 1 + b, 2 + c, u)
            pre1 = x ** (c / 2.0) * (1.0 - x) ** (-half_pow)
            pre2 = x ** (1 + c / 2.0) * (1.0 - x) ** (-1.0 - half_pow)
            Ap = A * (c / (2.0 * x) + half_pow / (1.0 - x)) + pre1 * f1p * dudx
            Bp = B * ((1 + c / 2.0) / x + (1.0 + half_pow) / (1.0 - x)) + pre2 * f2p * dudx
            return Ap, Bp

    def ab_log(x):
        x = np.asarray(x, float)
        u = x / (x - 1.0)
        f1 = specfun.hyp2f1(a, b, c, u)
        f2 = specfun.hyp2f1(1 + a, 1 + b, 2 + c, u)
        lf1, s1 = _log_abs_sign(f1)
        lf2, s2 = _log_abs_sign(f2)
        base = (c / 2.0) * np.log(x) - half_pow * np.log1p(-x)
        la = base + lf1
        lb = base + np.log(x) - np.log1p(-x) + lf2
        return la, s1, lb, s2

    return ab, ab_prime, ab_log


def _f21_ab_mpmath(z, zp, w, wp):
    """Pointwise arbitrary-precision path for extreme parameters."""
    import mpmath as mp

    a, b = mp.mpf(z) + mp.mpf(wp), mp.mpf(zp) + mp.mpf(wp)
    c = mp.mpf(z) + mp.mpf(zp) + mp.mpf(w) + mp.mpf(wp)
    half_pow = (mp.mpf(z) + mp.mpf(zp) + 2 * mp.mpf(wp)) / 2

    def _AB(xv):
        with mp.workdps(30):
            x = mp.mpf(float(xv))
            u = x / (x - 1)
            A = x ** (c / 2) * (1 - x) ** (-half_pow) * mp.hyp2f1(a, b, c, u)
            B = x ** (1 + c / 2) * (1 - x) ** (-1 - half_pow) * mp.hyp2f1(1 + a, 1 + b, 2 + c, u)
            return A, B

    def ab(x):
        x = np.atleast_1d(np.asarray(x, float))
        A = np.empty_like(x)
        B = np.empty_like(x)
        for i, xv in enumerate(x):
            Av, Bv = _AB(xv)
            A[i], B[i] = float(Av), float(Bv)
        return A, B

    def ab_prime(x):
        import mpmath as mp
        x = np.atleast_1d(np.asarray(x, float))
        Ap = np.empty_like(x)
        Bp = np.empty_like(x)
        with mp.workdps(30):
            for i, xv in enumerate(x):
                h = mp.mpf(xv) * mp.mpf("1e-12")
                A1v, B1v = _AB(mp.mpf(xv) + h)
                A2v, B2v = _AB(mp.mpf(xv) - h)
                Ap[i] = float((A1v - A2v) / (2 * h))
                Bp[i] = float((B1v - B2v) / (2 * h))
        return Ap, Bp

    def ab_log(x):
        import mpmath as mp
        x = np.atleast_1d(np.asarray(x, float))
        la = np.empty_like(x)
        sa = np.empty_like(x)
        lb = np.empty_like(x)
        sb = np.empty_like(x)
        for i, xv in enumerate(x):
            Av, Bv = _AB(xv)
            sa[i] = float(mp.sign(Av)) or 1.0
            sb[i] = float(mp.sign(Bv)) or 1.0
            la[i] = float(mp.log(abs(Av))) if Av != 0 else -np.inf
            lb[i] = float(mp.log(abs(Bv))) if Bv != 0 else -np.inf
        return la, sa, lb, sb

    return ab, ab_prime, ab_log


def build_whittaker_kernel(z: float, z_prime: float, w: float) -> IntegrableKernel:
    """Whittaker kernel on (0, inf): flat-space limit of the f21 kernel."""
    z, zp, w = float(z), float(z_prime), float(w)
    # integer z or z' kills the sine prefactor; integer w is harmless for
    # kernel evaluation (the s->0 expansion enforces its own genericity)
    for name, val in (("z", z), ("z'", zp)):
        if specfun.is_integer(val):
            raise DomainError(f"Whittaker kernel requires {name} not an integer, got {val}")
    tail_power = z + zp + 2.0 * w + 2.0
    if not tail_power > 0.0:
        raise DomainError("Whittaker kernel requires z+z'+2w+2 > 0 (integrable tail)")

    sin_fac = math.sin(math.pi * z) * math.sin(math.pi * zp)
    lam_sign = math.copysign(1.0, sin_fac) * specfun.gamma_sign(1 + z + w) * specfun.gamma_sign(1 + zp + w)
    lam_log = math.log(abs(sin_fac) / math.pi ** 2) + specfun.log_gamma(1 + z + w) + specfun.log_gamma(1 + zp + w)

    kap1 = 0.5 - (z + zp + 2.0 * w) / 2.0
    mu = abs(z - zp) / 2.0
    aU1 = mu - kap1 + 0.5          # = z + w  up to the |mu| reflection
    aU2 = aU1 + 1.0
    bU = 1.0 + 2.0 * mu

    extreme = max(abs(aU1), abs(aU2)) > _EXTREME_PARAM
    if extreme:
        ab_fn, ab_prime_fn, ab_log_fn = _whittaker_ab_mpmath(kap1, mu)
    else:
        ab_fn, ab_prime_fn, ab_log_fn = _whittaker_ab_scipy(aU1, aU2, bU, mu)

    return IntegrableKernel(
        name="whittaker", domain="semi_infinite",
        lam_sign=lam_sign, lam_log=lam_log, den_sign=1.0,
        ab=ab_fn, ab_prime=ab_prime_fn, ab_log=ab_log_fn,
        vanish_exponent=0.0, decay="exp", tail_power=tail_power,
        params=(z, zp, w))


def _whittaker_ab_scipy(aU1, aU2, bU, mu):
    from scipy import special as sp

    def _core(x):
        pre = np.exp(-x / 2.0) * x ** (mu + 0.5)
        U1 = sp.hyperu(aU1, bU, x)
        U2 = sp.hyperu(aU2, bU, x)
        return pre, U1, U2

    def ab(x):
        x = np.asarray(x, float)
        pre, U1, U2 = _core(x)
        r = x ** -0.5 * pre
        return r * U1, r * U2

    def ab_prime(x):
        # W' = W (-1/2 + (mu+1/2)/x) - e^{-x/2} x^{mu+1/2} a U(a+1, b+1, x)
        x = np.asarray(x, float)
        pre, U1, U2 = _core(x)
        fac = -0.5 + (mu + 0.5) / x
        W1p = pre * U1 * fac - pre * aU1 * sp.hyperu(aU1 + 1.0, bU + 1.0, x)
        W2p = pre * U2 * fac - pre * aU2 * sp.hyperu(aU2 + 1.0, bU + 1.0, x)
        Ap = -0.5 * x ** -1.5 * pre * U1 + x ** -0.5 * W1p
        Bp = -0.5 * x ** -1.5 * pre * U2 + x ** -0.5 * W2p
        return Ap, Bp

    def ab_log(x):
        x = np.asarray(x, float)
        U1 = sp.hyperu(aU1, bU, x)
        U2 = sp.hyperu(aU2, bU, x)
        l1, s1 = _log_abs_sign(U1)
        l2, s2 = _log_abs_sign(U2)
        base = -x / 2.0 + mu * np.log(x)
        return base + l1, s1, base + l2, s2

    return ab, ab_prime, ab_log


def _whittaker_ab_mpmath(kap1, mu):
    import mpmath as mp

    def _AB(xv):
        with mp.workdps(30):
            x = mp.mpf(float(xv))
            A = mp.whitw(kap1, mu, x) / mp.sqrt(x)
            B = mp.whitw(kap1 - 1, mu, x) / mp.sqrt(x)
            return A, B

    def ab(x):
        x = np.atleast_1d(np.asarray(x, float))
        A = np.empty_like(x)
        B = np.empty_like(x)
        for i, xv in enumerate(x):
            Av, Bv = _AB(xv)
            A[i], B[i] = float(Av), float(Bv)
        return A, B

    def ab_prime(x):
        import mpmath as mp
        x = np.atleast_1d(np.asarray(x, float))
        Ap = np.empty_like(x)
        Bp = np.empty_like(x)
        with mp.workdps(30):
            for i, xv in enumerate(x):
                h = mp.mpf(xv) * mp.mpf("1e-12")
                A1v, B1v = _AB(mp.mpf(xv) + h)
                A2v, B2v = _AB(mp.mpf(xv) - h)
                Ap[i] = float((A1v - A2v) / (2 * h))
                Bp[i] = float((B1v - B2v) / (2 * h))
        return Ap, Bp

    def ab_log(x):
        import mpmath as mp
        x = np.atleast_1d(np.asarray(x, float))
        la = np.empty_like(x)
        sa = np.empty_like(x)
        lb = np.empty_like(x)
        sb = np.empty_like(x)
        for i, xv in enumerate(x):
            Av, Bv = _AB(xv)
            sa[i] = float(mp.sign(Av)) or 1.0
            sb[i] = float(mp.sign(Bv)) or 1.0
            la[i] = float(mp.log(abs(Av))) if Av != 0 else -np.inf
            lb[i] = float(mp.log(abs(Bv))) if Bv != 0 else -np.inf
        return la, sa, lb, sb

    return ab, ab_prime, ab_log


def build_macdonald_kernel(z: float, z_prime: float) -> IntegrableKernel:
    """Macdonald kernel on (0, inf): zero-field limit of the Whittaker kernel."""
    z, zp = float(z), float(z_prime)
    if specfun.is_integer(z) or specfun.is_integer(zp):
        raise DomainError("Macdonald kernel requires z, z' not integers")
    from scipy import special as sp

    nu = zp - z
    sin_fac = math.sin(math.pi * z) * math.sin(math.pi * zp)
    lam_sign = math.copysign(1.0, sin_fac)
    lam_log = math.log(abs(sin_fac) / math.pi ** 2)

    def ab(x):
        x = np.asarray(x, float)
        y = 2.0 * np.sqrt(x)
        return y * sp.kv(nu + 1.0, y), 2.0 * sp.kv(nu, y)

    def ab_prime(x):
        x = np.asarray(x, float)
        y = 2.0 * np.sqrt(x)
        K0 = sp.kv(nu, y)
        K1 = sp.kv(nu + 1.0, y)
        # K_{nu+2} = K_nu + 2(nu+1)/y K_{nu+1};  K_{nu-1} = K_{nu+1} - 2 nu / y K_nu
        K2 = K0 + 2.0 * (nu + 1.0) / y * K1
        Km1 = K1 - 2.0 * nu / y * K0
        rx = np.sqrt(x)
        Ap = (K1 - y * (K0 + K2) / 2.0) / rx
        Bp = -(Km1 + K1) / rx
        return Ap, Bp

    def ab_log(x):
        x = np.asarray(x, float)
        y = 2.0 * np.sqrt(x)
        A = y * sp.kve(nu + 1.0, y)
        B = 2.0 * sp.kve(nu, y)
        la, sa = _log_abs_sign(A)
        lb, sb = _log_abs_sign(B)
        return la - y, sa, lb - y, sb

    return IntegrableKernel(
        name="macdonald", domain="semi_infinite",
        lam_sign=lam_sign, lam_log=lam_log, den_sign=1.0,
        ab=ab, ab_prime=ab_prime, ab_log=ab_log,
        vanish_exponent=0.0, decay="exp_sqrt", tail_power=0.5,
        params=(z, zp))
