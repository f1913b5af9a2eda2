"""Fourier-multiplier kernels on a periodic box standing in for R^n.

Kernels are obtained by sampling a radial multiplier ``m(|xi|)`` on the DFT
wavenumbers and inverting. With the normalization used here a discrete
convolution ``sum_j K_j u_{i-j} dV`` equals ``ifft(m * fft(u))``, so the
kernel mass equals ``m(0)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidExponent, QuadratureFailure
from .fractional_calculus import FractionalOrder
from .quadrature import bisect, panel_nodes
from .special_functions import eval_ml, gamma_reciprocal

__all__ = [
    "SpatialGrid",
    "Field",
    "KernelSpec",
    "AuxKernelSpec",
    "KERNEL_BETAS",
    "ml_multiplier",
    "build_kernel",
    "build_aux_kernel",
    "assemble_kernel_decomposition",
    "kernel_lq_norm",
    "gradient_magnitude",
    "scaling_check",
    "lp_admissible_range",
    "kernel_resolved",
    "profile_field",
]

KERNEL_BETAS = ("0", "alpha", "1", "1+alpha", "2")


@dataclass(frozen=True)
class SpatialGrid:
    """Periodic box ``[-L, L)^n`` with ``N`` points per axis."""

    dim: int
    points_per_axis: int
    half_width: float

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError("dim must be 1, 2 or 3")
        n = self.points_per_axis
        if n < 16 or n & (n - 1):
            raise ValueError("points_per_axis must be a power of two >= 16")
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.points_per_axis

    @property
    def cell_volume(self) -> float:
        return self.spacing ** self.dim

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.dim

    @property
    def axis(self) -> np.ndarray:
        return -self.half_width + self.spacing * np.arange(self.points_per_axis)

    def coords(self) -> list[np.ndarray]:
        return np.meshgrid(*([self.axis] * self.dim), indexing="ij")

    def radius(self) -> np.ndarray:
        return np.sqrt(sum(c * c for c in self.coords()))

    @property
    def wavenumbers(self) -> np.ndarray:
        """``pi k / L`` in FFT ordering."""
        return 2.0 * np.pi * np.fft.fftfreq(self.points_per_axis, d=self.spacing)

    def xi_components(self) -> list[np.ndarray]:
        return np.meshgrid(*([self.wavenumbers] * self.dim), indexing="ij")

    def xi_squared(self) -> np.ndarray:
        return sum(k * k for k in self.xi_components())


@dataclass(frozen=True)
class Field:
    grid: SpatialGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.shape:
            raise ValueError(f"field shape {v.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field contains non-finite values")
        object.__setattr__(self, "values", v)

    def spectrum(self) -> np.ndarray:
        return np.fft.fftn(self.values)

    @classmethod
    def from_spectrum(cls, grid: SpatialGrid, coeffs: np.ndarray) -> "Field":
        return cls(grid, np.fft.ifftn(coeffs).real)

    def integral(self) -> float:
        return float(self.values.sum() * self.grid.cell_volume)


def _resolve_beta(alpha: float, beta) -> float:
    if isinstance(beta, str):
        table = {"0": 0.0, "alpha": alpha, "1": 1.0, "1+alpha": 1.0 + alpha, "2": 2.0}
        if beta not in table:
            raise ValueError(f"unknown kernel index {beta!r}; expected one of {KERNEL_BETAS}")
        return table[beta]
    beta = float(beta)
    for cand in (0.0, alpha, 1.0, 1.0 + alpha, 2.0):
        if abs(beta - cand) < 1e-12:
            return cand
    raise ValueError(f"beta={beta} is not one of 0, alpha, 1, 1+alpha, 2")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel ``G_{1+alpha,beta}(t, .)`` with multiplier ``E_{1+alpha,beta}(-t^(1+alpha) |xi|^(2 m_L))``."""

    alpha: FractionalOrder
    beta_index: float | str
    t: float
    laplacian_power: float = 1.0
    gradient: bool = False

    def __post_init__(self):
        if not isinstance(self.alpha, FractionalOrder):
            object.__setattr__(self, "alpha", FractionalOrder(float(self.alpha)))
        object.__setattr__(self, "beta_index", _resolve_beta(self.alpha.alpha, self.beta_index))
        if not self.t > 0:
            raise ValueError("t must be positive")
        if self.laplacian_power < 1:
            raise ValueError("laplacian_power must be >= 1")

    @property
    def beta(self) -> float:
        return float(self.beta_index)


@dataclass(frozen=True)
class AuxKernelSpec:
    """Auxiliary kernels.

    ``K``: multiplier ``|xi|^d exp(|xi|^(2 rho) cos(pi rho)) cos(|xi|^(2 rho) sin(pi rho))``.
    ``H``: multiplier ``|xi|^d exp(-s |xi|^(2 rho))``.
    """

    alpha: FractionalOrder
    d: float
    family: str
    s: float | None = None

    def __post_init__(self):
        if not isinstance(self.alpha, FractionalOrder):
            object.__setattr__(self, "alpha", FractionalOrder(float(self.alpha)))
        if self.family not in ("K", "H"):
            raise ValueError("family must be 'K' or 'H'")
        if self.family == "H" and not (self.s is not None and self.s > 0):
            raise ValueError("H kernels need s > 0")


# ------------------------------------------------------------ multipliers


def ml_multiplier(alpha: float, beta: float, t: float, xi_sq: np.ndarray,
                  laplacian_power: float = 1.0) -> np.ndarray:
    """``E_{1+alpha,beta}(-t^(1+alpha) |xi|^(2 m_L))`` evaluated once per distinct ``|xi|^2``."""
    uniq, inverse = np.unique(xi_sq, return_inverse=True)
    x = t ** (1.0 + alpha) * uniq ** laplacian_power
    return eval_ml(1.0 + alpha, beta, x)[inverse].reshape(xi_sq.shape)


def _to_space(grid: SpatialGrid, coeffs: np.ndarray) -> np.ndarray:
    vals = np.fft.ifftn(coeffs).real / grid.cell_volume
    return np.fft.fftshift(vals)


def _gradient_factors(grid: SpatialGrid) -> list[np.ndarray]:
    out = []
    nyq = grid.points_per_axis // 2
    for j, k in enumerate(grid.xi_components()):
        factor = 1j * k
        idx = [slice(None)] * grid.dim
        idx[j] = nyq
        factor[tuple(idx)] = 0.0
        out.append(factor)
    return out


def build_kernel(spec: KernelSpec, grid: SpatialGrid):
    """Sample ``G_{1+alpha,beta}(t, .)`` on the grid (centred at index ``N/2``).

    Returns a :class:`Field`, or a tuple of fields (one per component) when
    ``spec.gradient`` is set.
    """
    mult = ml_multiplier(spec.alpha.alpha, spec.beta, spec.t, grid.xi_squared(), spec.laplacian_power)
    if not spec.gradient:
        return Field(grid, _to_space(grid, mult))
    return tuple(Field(grid, _to_space(grid, g * mult)) for g in _gradient_factors(grid))


def kernel_resolved(spec: KernelSpec, grid: SpatialGrid, tol: float = 1e-8) -> bool:
    """Whether the multiplier at the largest wavenumber is below ``tol`` times the zero mode."""
    a = 1.0 + spec.alpha.alpha
    xi_max_sq = grid.dim * (np.pi * grid.points_per_axis / (2.0 * grid.half_width)) ** 2
    top = abs(eval_ml(a, spec.beta, spec.t ** a * xi_max_sq ** spec.laplacian_power))
    zero = abs(gamma_reciprocal(spec.beta))
    ref = zero if zero > 0 else abs(eval_ml(a, spec.beta, spec.t ** a * (np.pi / grid.half_width) ** 2))
    return bool(top < tol * ref)


def _aux_multiplier(spec: AuxKernelSpec, xi_sq: np.ndarray) -> np.ndarray:
    rho = spec.alpha.rho
    mag = np.sqrt(xi_sq)
    w = mag ** (2.0 * rho)
    if spec.d < 0:
        safe = np.where(mag > 0, mag, 1.0)
        power = np.where(mag > 0, safe ** spec.d, 0.0)
    else:
        power = mag ** spec.d
    if spec.family == "K":
        body = np.exp(w * math.cos(math.pi * rho)) * np.cos(w * math.sin(math.pi * rho))
    else:
        body = np.exp(-spec.s * w)
    return power * body


def build_aux_kernel(spec: AuxKernelSpec, grid: SpatialGrid) -> Field:
    """Sample the K or H auxiliary kernel; the zero mode is dropped when ``d < 0``."""
    if spec.d <= -grid.dim:
        raise InvalidExponent(f"d={spec.d} must exceed -n={-grid.dim}")
    return Field(grid, _to_space(grid, _aux_multiplier(spec, grid.xi_squared())))


def assemble_kernel_decomposition(alpha, grid: SpatialGrid, rel_tol: float = 1e-9,
                                  max_doublings: int = 6):
    """Rebuild ``G_{1+alpha,1}(1, .)`` from the K and H kernels.

    ``G = 2 rho K_0 + sin(pi (1 - 1/rho))/pi * int_0^inf s^(1/rho-1)/(s^(2/rho) + 2 cos(pi/rho) s^(1/rho) + 1) H_0(s, .) ds``

    The s-integral is a Gauss-Kronrod sum over ``u = log s`` on [-45, 45]
    whose panels are refined until the quadrature of the multiplier is
    converged at every wavenumber; the H fields are then summed node by node.

    Returns
    -------
    assembled, direct : Field
    max_rel_err : float
        ``max |assembled - direct| / max |direct|`` over ``|x| <= L/2``.
    """
    order = alpha if isinstance(alpha, FractionalOrder) else FractionalOrder(float(alpha))
    rho = order.rho
    two_cos = 2.0 * math.cos(math.pi / rho)
    xi_sq = grid.xi_squared()
    uniq = np.unique(xi_sq)
    w_uniq = uniq ** rho

    def weight(u):
        s = np.exp(u)
        r = s ** (1.0 / rho)
        return r / (r * (r + two_cos) + 1.0)   # includes the ds = s du Jacobian

    edges = np.linspace(-45.0, 45.0, 91)
    for _ in range(max_doublings + 1):
        nodes, wk, wg = panel_nodes(edges)
        u = nodes.ravel()
        vals = weight(u)[None, :] * np.exp(-np.outer(w_uniq, np.exp(u)))
        k_sum = vals @ wk.ravel()
        g_sum = vals @ wg.ravel()
        if np.max(np.abs(k_sum - g_sum)) <= rel_tol * np.max(np.abs(k_sum)):
            break
        edges = bisect(edges)
    else:
        raise QuadratureFailure("kernel decomposition s-integral did not converge")

    coeff = math.sin(math.pi * (1.0 - 1.0 / rho)) / math.pi
    node_weights = coeff * weight(u) * wk.ravel()
    assembled = 2.0 * rho * build_aux_kernel(AuxKernelSpec(order, 0.0, "K"), grid).values
    for s_node, wt in zip(np.exp(u), node_weights):
        if wt == 0.0:
            continue
        assembled = assembled + wt * build_aux_kernel(AuxKernelSpec(order, 0.0, "H", s_node), grid).values
    direct = build_kernel(KernelSpec(order, 1.0, 1.0), grid)
    bulk = grid.radius() <= 0.5 * grid.half_width
    diff = np.abs(assembled - direct.values)[bulk]
    err = float(diff.max() / np.abs(direct.values[bulk]).max())
    return Field(grid, assembled), direct, err


# ------------------------------------------------------------------ norms


def kernel_lq_norm(f: Field, q: float) -> float:
    """Cell-sum ``L^q`` norm; ``q = inf`` is the maximum modulus."""
    if q < 1:
        raise InvalidExponent(f"q={q} < 1")
    v = np.abs(f.values)
    if math.isinf(q):
        return float(v.max())
    if q == 1:
        return float(v.sum() * f.grid.cell_volume)
    vmax = v.max()
    if vmax == 0:
        return 0.0
    return float(vmax * (np.sum((v / vmax) ** q) * f.grid.cell_volume) ** (1.0 / q))


def gradient_magnitude(components) -> Field:
    grid = components[0].grid
    return Field(grid, np.sqrt(sum(c.values ** 2 for c in components)))


def scaling_check(alpha, beta_index, p: float, t_pair: tuple[float, float], grid: SpatialGrid) -> float:
    """Relative gap between measured and predicted ``||G(t1)||_p / ||G(t2)||_p``.

    The prediction is ``(t1/t2)^(-(n/2)(1+alpha)(1-1/p))``.
    """
    t1, t2 = t_pair
    order = alpha if isinstance(alpha, FractionalOrder) else FractionalOrder(float(alpha))
    n1 = kernel_lq_norm(build_kernel(KernelSpec(order, beta_index, t1), grid), p)
    n2 = kernel_lq_norm(build_kernel(KernelSpec(order, beta_index, t2), grid), p)
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    predicted = (t1 / t2) ** (-(grid.dim / 2.0) * (1.0 + order.alpha) * (1.0 - inv_p))
    return abs(n1 / n2 - predicted) / predicted


def lp_admissible_range(n: int, beta_index, alpha: float | None = None) -> tuple[float, float]:
    """Bound ``c`` in ``(n/2)(1/r - 1/q) < c`` and the largest ``p`` with ``(n/2)(1 - 1/p) < c``.

    ``c = 1`` for ``beta`` in {1, 2} and ``c = 2`` for ``beta = 1 + alpha``.
    ``beta_index`` may be the label ``"1+alpha"``, in which case ``alpha`` is
    not needed.
    """
    if beta_index in ("1", "2") or (not isinstance(beta_index, str) and float(beta_index) in (1.0, 2.0)):
        c = 1.0
    elif beta_index == "1+alpha" or (alpha is not None and abs(float(beta_index) - 1.0 - alpha) < 1e-12):
        c = 2.0
    else:
        raise ValueError(f"no L^p range recorded for beta={beta_index!r}")
    ratio = 2.0 * c / n
    p_max = math.inf if ratio >= 1.0 else 1.0 / (1.0 - ratio)
    return c, p_max


# --------------------------------------------------------------- profiles


def profile_field(grid: SpatialGrid, kind: str, amplitude: float = 1.0, width: float = 1.0,
                  wavenumber: int = 1, center: float = 0.0) -> Field:
    """Analytic initial data.

    ``gaussian``: ``A exp(-|x-c|^2 / w^2)``; ``bump``: ``A exp(1 - 1/(1-|x-c|^2/w^2))``
    inside ``|x-c| < w``; ``mode``: ``A cos(pi k x_1 / L)``.
    """
    if kind == "mode":
        x1 = grid.coords()[0]
        vals = amplitude * np.cos(np.pi * wavenumber * x1 / grid.half_width)
        return Field(grid, vals)
    r2 = sum((c - center) ** 2 for c in grid.coords()) / width ** 2
    if kind == "gaussian":
        vals = amplitude * np.exp(-r2)
    elif kind == "bump":
        inside = r2 < 1.0
        vals = np.zeros_like(r2)
        vals[inside] = amplitude * np.exp(1.0 - 1.0 / (1.0 - r2[inside]))
    else:
        raise ValueError(f"unknown profile {kind!r}; expected gaussian, bump or mode")
    return Field(grid, vals)
