"""Riemann-Liouville integrals and Caputo / Riemann-Liouville derivatives on uniform grids.

Every memory integral ``int_0^t k(t-s) f(s) ds`` is discretized by product
integration: ``f`` is replaced by its piecewise-linear interpolant and the
kernel is integrated exactly against each hat function. Only the first two
antiderivatives of the kernel, sampled at the lags ``l*h``, are needed, so the
same routine serves the power kernels of ``J^beta`` and the Mittag-Leffler
kernels of the Duhamel formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GridTooCoarse, InvalidOrder
from .special_functions import eval_ml, gamma_reciprocal

__all__ = [
    "TimeGrid",
    "TimeSeries",
    "FractionalOrder",
    "product_weights",
    "memory_convolution",
    "rl_integral",
    "caputo_derivative",
    "rl_derivative",
    "verify_caputo_rl_relation",
    "verify_ode_solution",
    "duhamel_antiderivatives",
]


@dataclass(frozen=True)
class TimeGrid:
    h: float
    n_steps: int

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("time step must be positive")
        if self.n_steps < 1:
            raise ValueError("need at least one step")

    @property
    def times(self) -> np.ndarray:
        return self.h * np.arange(self.n_steps + 1)

    @property
    def t_final(self) -> float:
        return self.h * self.n_steps

    @classmethod
    def covering(cls, t_final: float, h: float) -> "TimeGrid":
        """Grid with step close to ``h`` landing exactly on ``t_final``."""
        n = max(1, int(math.ceil(t_final / h - 1e-9)))
        return cls(t_final / n, n)


@dataclass(frozen=True)
class TimeSeries:
    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n_steps + 1,):
            raise ValueError(f"expected {self.grid.n_steps + 1} samples, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("time series contains non-finite values")
        object.__setattr__(self, "values", v)

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    @classmethod
    def sample(cls, func, grid: TimeGrid) -> "TimeSeries":
        return cls(grid, func(grid.times))


@dataclass(frozen=True)
class FractionalOrder:
    alpha: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise InvalidOrder(f"alpha={self.alpha} outside (0, 1)")

    @property
    def rho(self) -> float:
        return 1.0 / (1.0 + self.alpha)

    @property
    def order(self) -> float:
        return 1.0 + self.alpha


def _as_alpha(alpha) -> float:
    return alpha.alpha if isinstance(alpha, FractionalOrder) else FractionalOrder(float(alpha)).alpha


# ------------------------------------------------------- product weights


def product_weights(k1, k2, h: float):
    """Hat-function weights from kernel antiderivatives.

    Parameters
    ----------
    k1, k2
        First and second antiderivatives of the kernel (both vanishing at 0)
        sampled at lags ``0, h, ..., M h``; the last axis is the lag axis.

    Returns
    -------
    w, b
        ``w[r]`` multiplies ``f_{n-r}`` in the approximation of the memory
        integral at ``t_n``; the ``f_0`` weight must be corrected by
        ``-b[n+1]`` (see :func:`memory_convolution`). Both have the lag axis
        of length ``M``.
    """
    k1 = np.asarray(k1, dtype=float)
    k2 = np.asarray(k2, dtype=float)
    d = np.diff(k2, axis=-1) / h                # d[m-1] = D_m, m = 1..M
    a = k1[..., 1:] - d                          # A_m
    b = d - k1[..., :-1]                         # B_m
    zeros = np.zeros(a.shape[:-1] + (1,))
    a_full = np.concatenate([zeros, a], axis=-1)     # A_0 .. A_M
    b_full = np.concatenate([zeros, b], axis=-1)     # B_0(unused) .. B_M
    w = a_full[..., :-1] + b_full[..., 1:]           # w_r = A_r + B_{r+1}, r = 0..M-1
    return w, b_full


def memory_convolution(w, b, f):
    """All node values ``I_n = sum_{r<=n} w_r f_{n-r} - b_{n+1} f_0``, n = 0..len(f)-1.

    Requires ``len(w) >= len(f)`` and ``len(b) >= len(f) + 1``.
    """
    f = np.asarray(f, dtype=float)
    n = f.size
    out = np.convolve(w[:n], f)[:n]
    # the oldest node carries A_n alone, not A_n + B_{n+1}
    out -= b[1:n + 1] * f[0]
    return out


def _power_antiderivatives(beta: float, n_lags: int, h: float):
    tau = h * np.arange(n_lags + 1)
    k1 = tau ** beta * gamma_reciprocal(beta + 1.0)
    k2 = tau ** (beta + 1.0) * gamma_reciprocal(beta + 2.0)
    return k1, k2


def _rl_integral_values(values: np.ndarray, beta: float, h: float) -> np.ndarray:
    n = values.size
    k1, k2 = _power_antiderivatives(beta, n, h)
    w, b = product_weights(k1, k2, h)
    return memory_convolution(w, b, values)


def rl_integral(f: TimeSeries, beta: float) -> TimeSeries:
    """Riemann-Liouville integral ``J^beta f`` by product-trapezoidal quadrature.

    The weights integrate ``(t-s)^(beta-1)/Gamma(beta)`` exactly against the
    piecewise-linear interpolant of ``f``; the value at ``t=0`` is 0.
    """
    if not beta > 0:
        raise InvalidOrder("beta must be positive")
    return TimeSeries(f.grid, _rl_integral_values(f.values, beta, f.grid.h))


# ----------------------------------------------------------- derivatives


def _split_order(order: float) -> tuple[int, float]:
    j = int(math.floor(order))
    alpha = order - j
    if j not in (0, 1) or not 0.0 < alpha < 1.0:
        raise InvalidOrder(f"order {order} must lie in (0,1) or (1,2)")
    return j, alpha


def _first_difference(u: np.ndarray, h: float) -> np.ndarray:
    return np.gradient(u, h, edge_order=2)


def _second_difference(u: np.ndarray, h: float) -> np.ndarray:
    d2 = np.empty_like(u)
    d2[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / h**2
    d2[0] = (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) / h**2
    d2[-1] = (2.0 * u[-1] - 5.0 * u[-2] + 4.0 * u[-3] - u[-4]) / h**2
    return d2


def caputo_derivative(u: TimeSeries, order: float) -> TimeSeries:
    """Caputo derivative ``J^(1-alpha)(d^(j+1) u)`` of order ``j + alpha``.

    The classical derivative is taken by central differences (second-order
    one-sided stencils at both ends) and then integrated fractionally.
    """
    if u.grid.n_steps < 4:
        raise GridTooCoarse("Caputo derivative needs at least 4 steps")
    j, alpha = _split_order(order)
    h = u.grid.h
    deriv = _second_difference(u.values, h) if j == 1 else _first_difference(u.values, h)
    return TimeSeries(u.grid, _rl_integral_values(deriv, 1.0 - alpha, h))


def _backward_derivative(w: np.ndarray, h: float, k: int) -> np.ndarray:
    out = np.empty_like(w)
    if k == 1:
        out[1:] = (w[1:] - w[:-1]) / h
        out[0] = out[1]
    else:
        out[2:] = (w[2:] - 2.0 * w[1:-1] + w[:-2]) / h**2
        out[:2] = out[2]
    return out


def rl_derivative(h_series: TimeSeries, order: float) -> TimeSeries:
    """Riemann-Liouville derivative ``d^(j+1)/dt^(j+1) J^(1-alpha) h`` of order ``j + alpha``.

    The outer derivative is a backward difference, so the scheme is first
    order in the step.
    """
    if h_series.grid.n_steps < 4:
        raise GridTooCoarse("Riemann-Liouville derivative needs at least 4 steps")
    j, alpha = _split_order(order)
    step = h_series.grid.h
    w = _rl_integral_values(h_series.values, 1.0 - alpha, step)
    return TimeSeries(h_series.grid, _backward_derivative(w, step, j + 1))


def _window(grid: TimeGrid, t_min: float) -> np.ndarray:
    return grid.times >= t_min - 1e-12


def verify_caputo_rl_relation(g: TimeSeries, alpha, j: int, t_min: float = 0.1) -> float:
    """Max residual between the Caputo derivative of ``g`` and the RL derivative of ``g_j``.

    ``g_j`` removes the Taylor jet ``sum_{k<=j} g^(k)(0) t^k / k!``; the
    derivative at 0 is taken with a second-order one-sided stencil.
    """
    if j not in (0, 1):
        raise ValueError("j must be 0 or 1")
    a = _as_alpha(alpha)
    if g.grid.n_steps < 4:
        raise GridTooCoarse("need at least 4 steps")
    v = g.values
    h = g.grid.h
    jet = np.full_like(v, v[0])
    if j == 1:
        slope0 = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
        jet = jet + slope0 * g.times
    lhs = caputo_derivative(g, j + a).values
    rhs = rl_derivative(TimeSeries(g.grid, v - jet), j + a).values
    mask = _window(g.grid, t_min)
    return float(np.max(np.abs(lhs - rhs)[mask]))


def duhamel_antiderivatives(alpha: float, lam, tau, rel_tol: float = 1e-10):
    """First and second antiderivatives of ``tau^alpha E_{1+alpha,1+alpha}(lam tau^(1+alpha))``.

    They are ``tau^(1+alpha) E_{1+alpha,2+alpha}`` and
    ``tau^(2+alpha) E_{1+alpha,3+alpha}`` at the same argument. ``lam`` may be
    an array of nonpositive eigenvalues; the result then has shape
    ``lam.shape + tau.shape``.
    """
    a = 1.0 + alpha
    lam = np.asarray(lam, dtype=float)
    tau = np.asarray(tau, dtype=float)
    x = -np.multiply.outer(lam, tau ** a)
    k1 = tau ** (1.0 + alpha) * eval_ml(a, 2.0 + alpha, x, rel_tol)
    k2 = tau ** (2.0 + alpha) * eval_ml(a, 3.0 + alpha, x, rel_tol)
    return k1, k2


def verify_ode_solution(alpha, lam: float, b0: float, b1: float, f: TimeSeries,
                        t_min: float = 0.1) -> float:
    """Residual of the Mittag-Leffler solution formula of ``D^(1+alpha) g = lam g + f``.

    ``g = b0 E_{a,1}(lam t^a) + b1 t E_{a,2}(lam t^a) + int_0^t (t-s)^alpha E_{a,a}(lam (t-s)^a) f(s) ds``
    with ``a = 1 + alpha``; the memory integral uses product weights built
    from the exact antiderivatives of its kernel. Returns
    ``max |caputo(g) - lam g - f|`` over ``t >= t_min``.
    """
    a_ = _as_alpha(alpha)
    if lam > 0:
        raise ValueError("lam must be nonpositive")
    grid = f.grid
    t = grid.times
    a = 1.0 + a_
    x = -lam * t ** a
    g = b0 * eval_ml(a, 1.0, x) + b1 * t * eval_ml(a, 2.0, x)
    k1, k2 = duhamel_antiderivatives(a_, lam, grid.h * np.arange(t.size + 1))
    w, b = product_weights(k1, k2, grid.h)
    g = g + memory_convolution(w, b, f.values)
    resid = caputo_derivative(TimeSeries(grid, g), a).values - lam * g - f.values
    return float(np.max(np.abs(resid)[_window(grid, t_min)]))
