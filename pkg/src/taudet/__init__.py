"""Fredholm determinants of integrable kernels and Painleve tau functions.

Computes determinants of the hypergeometric, Whittaker and Macdonald
kernels by Nystrom quadrature, reproduces them through the Tracy-Widom
ODE system (PVI) and sigma-form validators (PV/PIII), and confronts the
numerically extracted endpoint constants with their conjectured closed
forms in terms of Barnes functions.
"""

from . import asymptotics, errors, fredholm, kernels, painleve, reference, specfun
from .asymptotics import (AsymptoticModel, ExtractionReport, conjectured_C,
                          extract_constant, kappa, limit_constants_piii,
                          limit_constants_pv, t1_expansion, tracy_beta)
from .fredholm import (DetResult, QuadratureRule, fredholm_det_finite,
                       fredholm_det_semiinfinite, gauss_legendre)
from .kernels import (IntegrableKernel, KernelParams, PBTParams, apply_symmetry,
                      build_f21_kernel, build_macdonald_kernel,
                      build_whittaker_kernel, kappa_pbt, map_pbt_params)
from .painleve import (SigmaCurve, TauCurve, TWState, integrate_tau_pvi,
                       macdonald_sigma_curve, q_route_check,
                       sigma_form_residual, tw_initial_state, tw_vector_field,
                       whittaker_sigma_curve)
from .reference import AlgebraicSolution, example1, example2, example3, get_solution

__version__ = "0.1.0"
