"""Mittag-Leffler functions on the negative real axis and the reciprocal Gamma.

Two representations of ``E_{a,beta}(-x)`` for ``a`` in (1, 2] are provided:

* the defining power series, summed with Neumaier compensation, accurate
  while the alternating terms stay moderate;
* the large-argument decomposition into an exponentially damped oscillation,
  finitely many algebraic terms and a remainder written as two Laplace-type
  integrals, which is exact for every positive argument.

:func:`eval_ml` dispatches between them at a per-``(a, beta)`` crossover.
All functions accept scalars or numpy arrays for the argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CancellationLoss, InvalidOrder
from .quadrature import integrate_batched

__all__ = [
    "MLQuery",
    "MLDecomposition",
    "gamma_reciprocal",
    "sinpi",
    "eval_ml_series",
    "eval_ml_asymptotic",
    "eval_ml",
    "ml_remainder_integrals",
    "ml_weighted_derivative",
    "minimal_order",
    "crossover_z",
]

# Lanczos approximation, g = 7, nine coefficients.
_LANCZOS_G = 7.0
_LANCZOS = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])
_SQRT_2PI = math.sqrt(2.0 * math.pi)

# Default crossover of the dispatcher, in the variable z = x**(1/a).
Z_CROSSOVER = 8.0
_CANCELLATION_RATIO = 1e8
# 1/(k-1)! correctly rounded, k = 1..171
_RGAMMA_INT = np.array([1.0 / math.factorial(k - 1) for k in range(1, 172)])


def sinpi(x):
    """``sin(pi*x)`` with exact zeros at the integers."""
    x = np.asarray(x, dtype=float)
    n = np.rint(2.0 * x)
    r = x - 0.5 * n
    q = np.mod(n, 4.0)
    s = np.sin(np.pi * r)
    c = np.cos(np.pi * r)
    out = np.where(q == 0, s, np.where(q == 1, c, np.where(q == 2, -s, -c)))
    return out if out.ndim else float(out)


def _lanczos_series(z):
    acc = np.full_like(z, _LANCZOS[0])
    for i in range(1, _LANCZOS.size):
        acc = acc + _LANCZOS[i] / (z + i)
    return acc


def _rgamma_right(x):
    # 1/Gamma(x) for 0.5 <= x <= 171
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    h = t ** (0.5 * (z + 0.5))
    return (np.exp(t) / h) / h / (_SQRT_2PI * _lanczos_series(z))


def _gamma_right(y):
    # Gamma(y) for 0.5 <= y <= 171
    z = y - 1.0
    t = z + _LANCZOS_G + 0.5
    h = t ** (0.5 * (z + 0.5))
    return _SQRT_2PI * _lanczos_series(z) * (h * np.exp(-t)) * h


def gamma_reciprocal(x):
    """Reciprocal Gamma function ``1/Gamma(x)``, an entire function.

    Exact zeros are returned at the non-positive integers. Reflection is used
    below 1/2.
    """
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.zeros_like(x)

    right = (x >= 0.5) & (x <= 171.0)
    out[right] = _rgamma_right(x[right])
    ints = right & (x == np.floor(x))
    out[ints] = _RGAMMA_INT[x[ints].astype(int) - 1]

    huge = x > 171.0
    if np.any(huge):
        out[huge] = [math.exp(-math.lgamma(v)) for v in x[huge]]

    left = (x < 0.5) & (x >= -170.0)
    if np.any(left):
        xl = x[left]
        out[left] = sinpi(xl) * _gamma_right(1.0 - xl) / np.pi

    far = x < -170.0
    if np.any(far):
        xf = x[far]
        s = np.asarray(sinpi(xf))
        mag = np.array([math.lgamma(1.0 - v) for v in xf])
        with np.errstate(divide="ignore"):
            out[far] = np.where(s == 0, 0.0, np.sign(s) * np.exp(mag + np.log(np.abs(s) / np.pi)))

    nan = np.isnan(x)
    out[nan] = np.nan
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class MLQuery:
    """Request to evaluate ``E_{a,beta}(-x)`` through the asymptotic decomposition."""

    a: float
    beta: float
    x: float
    m: int | None = None
    rel_tol: float = 1e-10

    def __post_init__(self):
        if not 1.0 < self.a <= 2.0:
            raise ValueError(f"order a={self.a} outside (1, 2]")
        if self.x < 0:
            raise ValueError("argument x must be nonnegative")
        if self.rel_tol <= 0:
            raise ValueError("rel_tol must be positive")

    @property
    def rho(self) -> float:
        return 1.0 / self.a

    @property
    def order(self) -> int:
        return minimal_order(self.a, self.beta) if self.m is None else self.m


@dataclass(frozen=True)
class MLDecomposition:
    oscillatory: float
    algebraic: float
    remainder: float
    i1: float
    i2: float
    total: float


def minimal_order(a: float, beta: float) -> int:
    """Smallest admissible asymptotic order ``m >= beta/a - 1``."""
    return max(0, math.ceil(beta / a - 1.0 - 1e-12))


# ---------------------------------------------------------------- series


def _series_core(a, beta, z, trunc_tol, max_terms=None):
    """Sum ``sum_k z^k / Gamma(a k + beta)``; returns (sum, max |term|, converged)."""
    kmax = int(max(3, math.floor((171.0 - beta) / a))) if max_terms is None else max_terms
    coef = gamma_reciprocal(np.arange(kmax + 1) * a + beta)
    # counting only starts past the leading poles of 1/Gamma
    k_start = max(0, math.ceil(-beta / a) + 1) if beta <= 0 else 0

    s = np.zeros_like(z)
    comp = np.zeros_like(z)
    power = np.ones_like(z)
    biggest = np.zeros_like(z)
    small_run = np.zeros(z.shape, dtype=int)
    active = np.ones(z.shape, dtype=bool)
    for k in range(kmax + 1):
        if k:
            power = power * z
        term = np.where(active, power * coef[k], 0.0)
        t = s + term
        comp += np.where(np.abs(s) >= np.abs(term), (s - t) + term, (term - t) + s)
        s = t
        biggest = np.maximum(biggest, np.abs(term))
        if k >= k_start:
            small = np.abs(term) <= trunc_tol * np.abs(s + comp)
            small_run = np.where(small, small_run + 1, 0)
            active &= small_run < 3
        if not active.any():
            break
    return s + comp, biggest, ~active


def eval_ml_series(a: float, beta: float, z, rel_tol: float = 1e-15, *, guard: bool = True):
    """Power series of ``E_{a,beta}(z)`` for real ``z`` and ``a`` in (0, 2].

    Terms are accumulated with Neumaier compensation and truncated after three
    consecutive terms below ``rel_tol`` times the partial sum.

    Raises
    ------
    CancellationLoss
        If the largest term exceeds ``|result| / rel_tol`` (only when ``guard``),
        or the series has not settled before ``1/Gamma`` underflows.
    """
    if not 0.0 < a <= 2.0:
        raise ValueError(f"order a={a} outside (0, 2]")
    z_arr = np.atleast_1d(np.asarray(z, dtype=float))
    total, biggest, converged = _series_core(a, beta, z_arr, rel_tol)
    if not converged.all():
        raise CancellationLoss(f"series for E_{{{a},{beta}}} did not settle at z={z_arr[~converged][0]:g}")
    if guard and np.any(biggest * rel_tol > np.abs(total)):
        bad = z_arr[biggest * rel_tol > np.abs(total)][0]
        raise CancellationLoss(
            f"alternating series for E_{{{a},{beta}}}({bad:g}) loses more than "
            f"{-math.log10(rel_tol):.0f} digits; use the asymptotic representation"
        )
    return float(total[0]) if np.ndim(z) == 0 else total.reshape(np.shape(z))


# ------------------------------------------------------------ asymptotic

_GEOMETRIC_EDGES = 2.0 * 4.0 ** -np.arange(20.0)[::-1]


def _sigma_edges(gamma_max: float) -> np.ndarray:
    sigma_max = 50.0 + 2.0 * gamma_max
    linear = np.arange(4.0, sigma_max + 2.0, 2.0)
    return np.concatenate([[0.0], _GEOMETRIC_EDGES, linear])


def ml_remainder_integrals(rho: float, beta: float, m: int, z, rel_tol: float = 1e-10,
                           which: tuple[int, ...] = (1, 2)):
    """The remainder integrals ``I_{j,m}(z)``, j in ``which``.

    ``I_{j,m}(z) = int_0^inf s^((m+j)/rho - beta) e^(-z s) / (s^(2/rho) + 2 cos(pi/rho) s^(1/rho) + 1) ds``

    evaluated after the change of variable ``sigma = z s`` with geometrically
    graded panels towards ``sigma = 0``. Returns an array of shape
    ``(len(which),) + shape(z)``.
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    flat = z.ravel()
    gammas = np.array([(m + j) / rho - beta for j in which])
    if np.any(gammas <= -1.0):
        raise InvalidOrder(f"I_{{j,{m}}} diverges at s=0 for rho={rho}, beta={beta}")
    edges = _sigma_edges(float(gammas.max()))
    two_cos = 2.0 * math.cos(math.pi / rho)
    zinv = flat ** (-1.0 / rho)
    out = np.empty((len(which), flat.size))

    def integrand(sigma, idx):
        w = sigma ** (1.0 / rho) * zinv_chunk[idx, None]
        inv_d = 1.0 / (w * (w + two_cos) + 1.0)
        profile = sigma ** gammas[:, None] * np.exp(-sigma)
        return inv_d[None, :, :] * profile[:, None, :]

    chunk = 4096
    for start in range(0, flat.size, chunk):
        zinv_chunk = zinv[start:start + chunk]
        out[:, start:start + chunk] = integrate_batched(
            integrand, edges, zinv_chunk.size, rel_tol
        )
    out *= flat[None, :] ** (-gammas[:, None] - 1.0)
    return out.reshape((len(which),) + z.shape)


def _asymptotic_parts(a, beta, x, m, rel_tol, need_all=True):
    rho = 1.0 / a
    z = x ** rho
    osc = (2.0 * rho * z ** (1.0 - beta) * np.exp(z * math.cos(math.pi * rho))
           * np.cos(z * math.sin(math.pi * rho) - math.pi * rho * (beta - 1.0)))
    alg = np.zeros_like(z)
    for k in range(1, m + 1):
        alg = alg + (-1.0) ** (k - 1) * gamma_reciprocal(beta - k / rho) * z ** (-k / rho)
    c1 = sinpi(beta - (m + 1) / rho)
    c2 = sinpi(beta - m / rho)
    which = tuple(j for j, c in ((1, c1), (2, c2)) if need_all or c != 0.0)
    i1 = np.zeros_like(z)
    i2 = np.zeros_like(z)
    if which:
        vals = ml_remainder_integrals(rho, beta, m, z, rel_tol, which)
        for row, j in zip(vals, which):
            if j == 1:
                i1 = row
            else:
                i2 = row
    rem = (-1.0) ** m * z ** (1.0 - beta) / math.pi * (i1 * c1 + i2 * c2)
    return osc, alg, rem, i1, i2


def eval_ml_asymptotic(q: MLQuery) -> MLDecomposition:
    """Three-term decomposition of ``E_{a,beta}(-x)`` with ``z = x**(1/a)``.

    oscillatory: ``2 rho z^(1-beta) exp(z cos(pi rho)) cos(z sin(pi rho) - pi rho (beta-1))``
    algebraic:   ``sum_{k=1}^m (-1)^(k-1) z^(-k/rho) / Gamma(beta - k/rho)``
    remainder:   ``(-1)^m z^(1-beta)/pi (I_1 sin(pi(beta-(m+1)/rho)) + I_2 sin(pi(beta-m/rho)))``
    """
    if q.x <= 0:
        raise ValueError("the asymptotic representation needs x > 0")
    m = q.order
    if m < q.beta * q.rho - 1.0 - 1e-12:
        raise InvalidOrder(f"m={m} below beta*rho - 1 = {q.beta * q.rho - 1.0:g}")
    osc, alg, rem, i1, i2 = _asymptotic_parts(q.a, q.beta, np.array([q.x]), m, q.rel_tol)
    osc, alg, rem = float(osc[0]), float(alg[0]), float(rem[0])
    return MLDecomposition(osc, alg, rem, float(i1[0]), float(i2[0]), osc + alg + rem)


def _certified_expansion(a, beta, x, rel_tol, m_cap=40):
    """Asymptotic values whose remainder is provably negligible, without quadrature.

    The denominator of the remainder integrand is bounded below by
    ``d_min = sin^2(pi/rho)`` (or 1), so ``|I_j| <= Gamma(g_j+1) z^(-g_j-1) / d_min``
    with ``g_j = (m+j)/rho - beta``. The order ``m`` is raised until this bound
    is below ``rel_tol/10`` of the partial sum. Returns (values, certified mask).
    """
    rho = 1.0 / a
    z = x ** rho
    logz = np.log(z)
    osc = (2.0 * rho * z ** (1.0 - beta) * np.exp(z * math.cos(math.pi * rho))
           * np.cos(z * math.sin(math.pi * rho) - math.pi * rho * (beta - 1.0)))
    c = math.cos(math.pi / rho)
    d_min = 1.0 if c >= 0 else math.sin(math.pi / rho) ** 2
    m0 = minimal_order(a, beta)
    alg = np.zeros_like(z)
    out = np.full_like(z, np.nan)
    done = np.zeros(z.shape, dtype=bool)
    for m in range(m_cap + 1):
        if m:
            alg = alg + (-1.0) ** (m - 1) * gamma_reciprocal(beta - m / rho) * z ** (-m / rho)
        if m < m0:
            continue
        bound = np.zeros_like(z)
        for j, coef in ((1, sinpi(beta - (m + 1) / rho)), (2, sinpi(beta - m / rho))):
            if coef != 0.0:
                g = (m + j) / rho - beta
                bound += abs(coef) * np.exp(math.lgamma(g + 1.0) - (m + j) / rho * logz)
        bound /= math.pi * d_min
        est = osc + alg
        ok = ~done & (bound <= 0.1 * rel_tol * np.abs(est))
        out[ok] = est[ok]
        done |= ok
        if done.all():
            break
    return out, done


# -------------------------------------------------------------- dispatch


@lru_cache(maxsize=256)
def crossover_z(a: float, beta: float) -> float:
    """Largest ``z = x**(1/a)`` (capped at 8) where the series is still trusted.

    The series is abandoned at the first ``z`` of a scan where its largest
    term exceeds 1e8 times the result.
    """
    grid = np.arange(0.5, Z_CROSSOVER + 1e-9, 0.25)
    total, biggest, _ = _series_core(a, beta, -(grid ** a), 1e-16)
    bad = biggest > _CANCELLATION_RATIO * np.abs(total)
    if not bad.any():
        return Z_CROSSOVER
    first = int(np.argmax(bad))
    return float(grid[max(first - 1, 0)]) if first else 0.0


def eval_ml(a: float, beta: float, x, rel_tol: float = 1e-10):
    """``E_{a,beta}(-x)`` for ``a`` in (1, 2] and ``x >= 0``.

    Uses the power series below the crossover and the asymptotic decomposition
    above it; points where the series trips the cancellation guard are
    re-evaluated with the decomposition. Where an a-priori bound shows the
    remainder integral to be negligible, the algebraic sum is extended
    instead of evaluating the integral.
    """
    if not 1.0 < a <= 2.0:
        raise ValueError(f"order a={a} outside (1, 2]")
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x_arr < 0):
        raise ValueError("eval_ml needs x >= 0")
    flat = x_arr.ravel()
    out = np.empty_like(flat)

    zero = flat == 0.0
    out[zero] = gamma_reciprocal(beta)

    z_star = crossover_z(a, beta)
    z = flat ** (1.0 / a)
    use_series = ~zero & (z <= z_star)
    if use_series.any():
        xs = flat[use_series]
        total, biggest, converged = _series_core(a, beta, -xs, 1e-16)
        trusted = converged & (biggest * rel_tol <= np.abs(total))
        idx = np.flatnonzero(use_series)
        out[idx[trusted]] = total[trusted]
        use_series[idx[~trusted]] = False

    use_asym = ~zero & ~use_series
    if use_asym.any():
        idx = np.flatnonzero(use_asym)
        vals, certified = _certified_expansion(a, beta, flat[idx], rel_tol)
        out[idx[certified]] = vals[certified]
        rest = idx[~certified]
        if rest.size:
            m = minimal_order(a, beta)
            osc, alg, rem, _, _ = _asymptotic_parts(a, beta, flat[rest], m, rel_tol, need_all=False)
            out[rest] = osc + alg + rem
    if np.ndim(x) == 0:
        return float(out[0])
    return out.reshape(x_arr.shape)


def ml_weighted_derivative(alpha: float, beta: float, lam: float, t, n_der: int,
                           rel_tol: float = 1e-10):
    """``d^n/dt^n [t^(beta-1) E_{1+alpha,beta}(lam t^(1+alpha))]`` for ``lam <= 0``.

    Equals ``t^(beta-n-1) E_{1+alpha,beta-n}(lam t^(1+alpha))``.
    """
    if lam > 0:
        raise ValueError("only dissipative modes (lam <= 0) are supported")
    if n_der < 0:
        raise ValueError("n_der must be nonnegative")
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0):
        raise ValueError("t must be positive")
    a = 1.0 + alpha
    return t_arr ** (beta - n_der - 1.0) * eval_ml(a, beta - n_der, -lam * t_arr ** a, rel_tol)
