"""Linear and semilinear Cauchy problems for ``D_t^(1+alpha) u + (-Laplacian)^(m_L) u = f``.

Every Fourier mode obeys a scalar fractional ODE with eigenvalue
``lam = -|xi|^(2 m_L)``, whose solution is explicit in Mittag-Leffler
functions. Homogeneous parts are therefore evaluated exactly at any instant.
Memory integrals against the forcing use product weights built from the
exact antiderivatives of the per-mode kernel, so stiff modes need no small
time step. The semilinear solver marches the fixed-point equation
``u = u_lin + N(u)`` with the nonlinearity taken at the grid nodes.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import QuadratureFailure
from .fractional_calculus import FractionalOrder, TimeGrid, product_weights
from .spectral_kernels import Field, SpatialGrid, kernel_lq_norm
from .special_functions import eval_ml

__all__ = [
    "FixedForcing",
    "CauchyProblem",
    "Trajectory",
    "solve_linear",
    "solve_semilinear",
    "reconstruct_ut",
    "solve_rl_problem",
    "mode_eigenvalues",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FixedForcing:
    """Prescribed forcing ``f(t, x)``.

    ``sampler(t)`` returns the values on the spatial grid. ``K`` and ``eta``
    record a decay bound ``||f(t)|| <= K (1+t)^(-eta)``. Separable forcings
    keep their profile so the solver can skip per-node transforms.
    """

    sampler: Callable[[float], np.ndarray]
    K: float = 0.0
    eta: float = 0.0
    profile: Field | None = None
    time_factor: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        if self.K < 0:
            raise ValueError("K must be nonnegative")

    @classmethod
    def separable(cls, profile: Field, K: float = 1.0, eta: float = 0.0) -> "FixedForcing":
        """``f(t, x) = K (1+t)^(-eta) profile(x)``."""
        def factor(t):
            return K * (1.0 + np.asarray(t, dtype=float)) ** (-eta)
        return cls(lambda t: factor(t) * profile.values, K, eta, profile, factor)


@dataclass(frozen=True)
class CauchyProblem:
    alpha: FractionalOrder
    u0: Field
    u1: Field | None = None
    forcing: FixedForcing | None = None
    power: float | None = None
    laplacian_power: float = 1.0

    def __post_init__(self):
        if not isinstance(self.alpha, FractionalOrder):
            object.__setattr__(self, "alpha", FractionalOrder(float(self.alpha)))
        if self.u1 is not None and self.u1.grid != self.u0.grid:
            raise ValueError("u0 and u1 must share a grid")
        if self.power is not None:
            if not self.power > 1:
                raise ValueError("semilinear power must exceed 1")
            if self.forcing is not None:
                raise ValueError("a problem is either forced or semilinear, not both")
        if self.laplacian_power < 1:
            raise ValueError("laplacian_power must be >= 1")

    @property
    def grid(self) -> SpatialGrid:
        return self.u0.grid

    @property
    def u1_values(self) -> np.ndarray:
        return np.zeros(self.grid.shape) if self.u1 is None else self.u1.values


@dataclass
class Trajectory:
    problem: CauchyProblem
    times: np.ndarray
    snapshots: list[Field]
    status: str = "completed"
    blowup_time: float | None = None
    nonlinear_part: list[Field] | None = field(default=None, repr=False)

    @property
    def completed(self) -> bool:
        return self.status == "completed"

    def norms(self, q: float) -> np.ndarray:
        return np.array([kernel_lq_norm(s, q) for s in self.snapshots])


# ------------------------------------------------------------ mode table


class _Modes:
    """Real-FFT modes grouped by eigenvalue."""

    def __init__(self, grid: SpatialGrid, laplacian_power: float):
        self.grid = grid
        axes = [grid.wavenumbers] * (grid.dim - 1)
        axes.append(2.0 * np.pi * np.fft.rfftfreq(grid.points_per_axis, d=grid.spacing))
        comps = np.meshgrid(*axes, indexing="ij")
        xi_sq = sum(k * k for k in comps)
        self.shape = xi_sq.shape
        uniq, inverse = np.unique(xi_sq.ravel(), return_inverse=True)
        self.lam = uniq ** laplacian_power          # -eigenvalue, >= 0
        self.inverse = inverse.ravel()

    def forward(self, values: np.ndarray) -> np.ndarray:
        return np.fft.rfftn(values).ravel()

    def backward(self, coeffs: np.ndarray) -> np.ndarray:
        return np.fft.irfftn(coeffs.reshape(self.shape), s=self.grid.shape, axes=tuple(range(self.grid.dim)))

    def ml(self, a: float, beta: float, times) -> np.ndarray:
        """``E_{a,beta}(-lam t^a)`` on (unique eigenvalue, time)."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        return eval_ml(a, beta, np.outer(self.lam, times ** a))


def mode_eigenvalues(grid: SpatialGrid, laplacian_power: float = 1.0) -> np.ndarray:
    """Distinct values of ``|xi|^(2 m_L)`` on the grid."""
    return _Modes(grid, laplacian_power).lam


def _kernel_weights(modes: _Modes, a: float, beta: float, n_lags: int, h: float):
    """Product weights for ``tau^(beta-1) E_{a,beta}(-lam tau^a)``, gathered per mode.

    Uses the antiderivatives ``tau^beta E_{a,beta+1}`` and ``tau^(beta+1) E_{a,beta+2}``.
    """
    tau = h * np.arange(n_lags + 1)
    k1 = tau ** beta * modes.ml(a, beta + 1.0, tau)
    k2 = tau ** (beta + 1.0) * modes.ml(a, beta + 2.0, tau)
    w, b = product_weights(k1, k2, h)
    if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
        raise QuadratureFailure("non-finite memory weights")
    return w, b


def _normalize_times(out_times) -> np.ndarray:
    if isinstance(out_times, TimeGrid):
        return out_times.times
    t = np.atleast_1d(np.asarray(out_times, dtype=float))
    if np.any(t < 0):
        raise ValueError("output times must be nonnegative")
    return t


def _snap(times: np.ndarray, h: float) -> np.ndarray:
    return np.rint(times / h).astype(int)


def _homogeneous(modes: _Modes, a: float, terms, times: np.ndarray) -> np.ndarray:
    """``sum coeff * t^shift * E_{a,beta}(-lam t^a)`` per mode; shape (times, modes)."""
    out = np.zeros((times.size, modes.inverse.size), dtype=complex)
    for coeff, beta, shift in terms:
        if not np.any(coeff):
            continue
        ml = modes.ml(a, beta, times)[modes.inverse].T
        with np.errstate(divide="ignore", invalid="ignore"):
            scale = np.where(times > 0, times ** shift, 0.0 if shift > 0 else (1.0 if shift == 0 else np.nan))
        out += scale[:, None] * ml * coeff[None, :]
    return out


def _forcing_history(modes: _Modes, forcing: FixedForcing, nodes: np.ndarray):
    if forcing.profile is not None and forcing.time_factor is not None:
        return forcing.time_factor(nodes)[:, None] * modes.forward(forcing.profile.values)[None, :]
    return np.stack([modes.forward(forcing.sampler(float(t))) for t in nodes])


def _duhamel_at(w_modes, b_modes, history, n: int) -> np.ndarray:
    """``sum_{r<=n} w_r F_{n-r} - b_{n+1} F_0`` for every mode."""
    s = np.einsum("mr,rm->m", w_modes[:, :n + 1], history[n::-1])
    return s - b_modes[:, n + 1] * history[0]


def _memory_term(modes, a, beta_kernel, forcing, times, quad_step):
    """Memory integral with kernel ``tau^(beta-1) E_{a,beta}`` at node-snapped ``times``."""
    t_max = float(times.max())
    n_nodes = max(1, int(math.ceil(t_max / quad_step - 1e-9)))
    h = t_max / n_nodes if t_max > 0 else quad_step
    idx = _snap(times, h)
    nodes = h * np.arange(n_nodes + 1)
    w, b = _kernel_weights(modes, a, beta_kernel, n_nodes + 1, h)
    w_m, b_m = w[modes.inverse], b[modes.inverse]
    hist = _forcing_history(modes, forcing, nodes)
    vals = np.stack([_duhamel_at(w_m, b_m, hist, n) if n > 0 else np.zeros(hist.shape[1], complex)
                     for n in idx])
    return vals, idx * h


def _assemble(problem, modes, coeffs, times, status="completed") -> Trajectory:
    snaps = [Field(problem.grid, modes.backward(c)) for c in coeffs]
    return Trajectory(problem, times, snaps, status)


def solve_linear(problem: CauchyProblem, out_times, quad_step: float = 0.05) -> Trajectory:
    """Mode-exact solution of the linear problem at ``out_times``.

    Homogeneous part: ``E_{a,1}(-lam t^a) u0^ + t E_{a,2}(-lam t^a) u1^`` with
    ``a = 1 + alpha``. When a forcing is present the memory integral
    ``int_0^t (t-s)^alpha E_{a,a}(-lam (t-s)^a) f^(s) ds`` is evaluated with
    product weights on nodes of spacing about ``quad_step``, and the output
    instants are snapped to those nodes (the returned ``times`` are the
    snapped values).
    """
    if problem.power is not None:
        raise ValueError("solve_linear handles forced or free problems only")
    alpha = problem.alpha.alpha
    a = 1.0 + alpha
    modes = _Modes(problem.grid, problem.laplacian_power)
    times = _normalize_times(out_times)
    duhamel = None
    if problem.forcing is not None and times.max() > 0:
        duhamel, times = _memory_term(modes, a, a, problem.forcing, times, quad_step)
    u0_hat = modes.forward(problem.u0.values)
    u1_hat = modes.forward(problem.u1_values)
    coeffs = _homogeneous(modes, a, [(u0_hat, 1.0, 0.0), (u1_hat, 2.0, 1.0)], times)
    if duhamel is not None:
        coeffs = coeffs + duhamel
    return _assemble(problem, modes, coeffs, times)


def solve_semilinear(problem: CauchyProblem, step: TimeGrid, blowup_threshold: float | None = None,
                     out_times: Sequence[float] | None = None, picard_sweeps: int = 3,
                     picard_tol: float = 1e-12, keep_nonlinear: bool = False) -> Trajectory:
    """March ``u = u_lin + int_0^t (t-s)^alpha G_{a,a}(t-s) * |u(s)|^p ds`` on ``step``.

    The memory sum uses ``|u|^p`` at already computed nodes; the weight of the
    current node is handled by at most ``picard_sweeps`` fixed-point sweeps
    started from a linear extrapolation. The run stops with status
    ``"blowup"`` when ``||u||_inf`` exceeds ``blowup_threshold`` (default
    ``1e6 ||u0||_inf``) or stops being finite.

    ``out_times`` (default: every node) are snapped to the nodes.
    """
    p = problem.power
    if p is None:
        raise ValueError("solve_semilinear needs a semilinear power")
    alpha = problem.alpha.alpha
    a = 1.0 + alpha
    h, n_steps = step.h, step.n_steps
    modes = _Modes(problem.grid, problem.laplacian_power)
    u0_max = float(np.max(np.abs(problem.u0.values)))
    if blowup_threshold is None:
        blowup_threshold = 1e6 * (u0_max if u0_max > 0 else 1.0)
    nodes = step.times
    store = np.arange(n_steps + 1) if out_times is None else np.unique(_snap(np.asarray(out_times, float), h))
    if store.max() > n_steps:
        raise ValueError("output time beyond the marching horizon")
    store_set = set(store.tolist())

    u0_hat = modes.forward(problem.u0.values)
    u1_hat = modes.forward(problem.u1_values)
    lin = _homogeneous(modes, a, [(u0_hat, 1.0, 0.0), (u1_hat, 2.0, 1.0)], nodes)
    w, b = _kernel_weights(modes, a, a, n_steps + 1, h)
    w_m, b_m = w[modes.inverse], b[modes.inverse]
    w0 = w_m[:, 0]

    hist = np.zeros((n_steps + 1, modes.inverse.size), dtype=complex)
    u_prev = problem.u0.values
    u_prev2 = None
    hist[0] = modes.forward(np.abs(u_prev) ** p)
    times, snaps, nonlin = [], [], []
    if 0 in store_set:
        times.append(0.0)
        snaps.append(problem.u0)
        nonlin.append(Field(problem.grid, np.zeros(problem.grid.shape)))
    status, t_star = "completed", None

    for n in range(1, n_steps + 1):
        past = np.einsum("mr,rm->m", w_m[:, 1:n + 1], hist[n - 1::-1]) - b_m[:, n + 1] * hist[0]
        guess = u_prev if u_prev2 is None else 2.0 * u_prev - u_prev2
        f_n = modes.forward(np.abs(guess) ** p)
        for _ in range(picard_sweeps + 1):
            n_hat = past + w0 * f_n
            u_n = modes.backward(lin[n] + n_hat)
            f_new = modes.forward(np.abs(u_n) ** p)
            change = np.max(np.abs(f_new - f_n))
            f_n = f_new
            if change <= picard_tol * max(np.max(np.abs(f_n)), 1e-300):
                break
        hist[n] = f_n
        u_max = float(np.max(np.abs(u_n))) if np.all(np.isfinite(u_n)) else math.inf
        if u_max > blowup_threshold:
            status, t_star = "blowup", float(nodes[n])
            log.info("threshold %.3g crossed at t=%.6g", blowup_threshold, t_star)
            break
        if n in store_set:
            times.append(float(nodes[n]))
            snaps.append(Field(problem.grid, u_n))
            if keep_nonlinear:
                nonlin.append(Field(problem.grid, modes.backward(n_hat)))
        u_prev2, u_prev = u_prev, u_n

    return Trajectory(problem, np.array(times), snaps, status, t_star,
                      nonlin if keep_nonlinear else None)


def reconstruct_ut(trajectory: Trajectory, out_times=None, quad_step: float = 0.05) -> Trajectory:
    """Time derivative of a linear solution, evaluated per mode.

    ``u_t^ = t^(-1) E_{a,0}(-lam t^a) u0^ + E_{a,1}(-lam t^a) u1^ + int_0^t (t-s)^(alpha-1) E_{a,alpha}(...) f^(s) ds``.
    The weakly singular memory weight is integrated exactly against the
    piecewise-linear forcing. Output times must be positive.
    """
    problem = trajectory.problem
    if problem.power is not None:
        raise ValueError("reconstruct_ut applies to linear problems only")
    times = trajectory.times if out_times is None else _normalize_times(out_times)
    if np.any(times <= 0):
        raise ValueError("u_t is reconstructed at positive times only")
    alpha = problem.alpha.alpha
    a = 1.0 + alpha
    modes = _Modes(problem.grid, problem.laplacian_power)
    duhamel = None
    if problem.forcing is not None:
        duhamel, times = _memory_term(modes, a, alpha, problem.forcing, times, quad_step)
    u0_hat = modes.forward(problem.u0.values)
    u1_hat = modes.forward(problem.u1_values)
    coeffs = _homogeneous(modes, a, [(u0_hat, 0.0, -1.0), (u1_hat, 1.0, 0.0)], times)
    if duhamel is not None:
        coeffs = coeffs + duhamel
    return _assemble(problem, modes, coeffs, times)


def solve_rl_problem(alpha, v: Field, u_alpha: Field, forcing: FixedForcing | None, out_times,
                     quad_step: float = 0.05, laplacian_power: float = 1.0) -> Trajectory:
    """Linear problem with Riemann-Liouville time derivative.

    ``u^ = t^(alpha-1) E_{a,alpha}(-lam t^a) v^ + t^alpha E_{a,a}(-lam t^a) u_alpha^ + memory term``
    where ``v`` is the initial value of ``J^(1-alpha) u`` and ``u_alpha`` that
    of its time derivative.
    """
    order = alpha if isinstance(alpha, FractionalOrder) else FractionalOrder(float(alpha))
    al = order.alpha
    a = 1.0 + al
    problem = CauchyProblem(order, v, u_alpha, forcing, None, laplacian_power)
    modes = _Modes(v.grid, laplacian_power)
    times = _normalize_times(out_times)
    v_hat = modes.forward(v.values)
    if np.any(times <= 0) and np.any(v_hat):
        raise ValueError("the J^(1-alpha) datum makes u singular at t=0")
    duhamel = None
    if forcing is not None and times.max() > 0:
        duhamel, times = _memory_term(modes, a, a, forcing, times, quad_step)
    ua_hat = modes.forward(u_alpha.values)
    coeffs = _homogeneous(modes, a, [(v_hat, al, al - 1.0), (ua_hat, a, al)], times)
    if duhamel is not None:
        coeffs = coeffs + duhamel
    return _assemble(problem, modes, coeffs, times)
