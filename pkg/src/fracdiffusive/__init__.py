"""Numerics for the time-fractional diffusion-wave equation ``D_t^(1+alpha) u = Laplacian u``.

Mittag-Leffler evaluation, fractional integrals and derivatives on uniform
grids, spectral kernels on periodic boxes, linear and semilinear Cauchy
solvers, and an analysis harness for critical exponents and decay rates.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (CancellationLoss, DegenerateFit, FracDiffusiveError, GridTooCoarse,
                     InadmissibleScenario, InvalidExponent, InvalidOrder, QuadratureFailure)
from .special_functions import (MLDecomposition, MLQuery, eval_ml, eval_ml_asymptotic,
                                eval_ml_series, gamma_reciprocal)
from .fractional_calculus import (FractionalOrder, TimeGrid, TimeSeries, caputo_derivative,
                                  rl_derivative, rl_integral)
from .spectral_kernels import Field, KernelSpec, SpatialGrid, build_kernel, kernel_lq_norm, profile_field
from .cauchy_solver import CauchyProblem, FixedForcing, Trajectory, solve_linear, solve_semilinear
from .analysis import (DecayScenario, ScenarioRun, critical_exponents, run_scenario,
                       theoretical_decay)

__all__ = [
    "__version__",
    "FracDiffusiveError", "CancellationLoss", "QuadratureFailure", "InvalidOrder", "GridTooCoarse",
    "InvalidExponent", "InadmissibleScenario", "DegenerateFit",
    "MLQuery", "MLDecomposition", "eval_ml", "eval_ml_series", "eval_ml_asymptotic", "gamma_reciprocal",
    "FractionalOrder", "TimeGrid", "TimeSeries", "rl_integral", "caputo_derivative", "rl_derivative",
    "SpatialGrid", "Field", "KernelSpec", "build_kernel", "kernel_lq_norm", "profile_field",
    "CauchyProblem", "FixedForcing", "Trajectory", "solve_linear", "solve_semilinear",
    "DecayScenario", "ScenarioRun", "critical_exponents", "theoretical_decay", "run_scenario",
]
