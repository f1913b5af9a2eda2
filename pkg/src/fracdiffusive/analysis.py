"""Critical exponents, predicted decay rates, empirical decay fits and integral majorants.

The decay predictions are signed powers of ``(1+t)``. Measured norms are
fitted on log-spaced instants with a least-squares slope of
``log(norm)`` against ``log(1+t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from typing import NamedTuple

import numpy as np
from scipy import integrate, optimize

from .cauchy_solver import CauchyProblem, FixedForcing, Trajectory, solve_linear, solve_semilinear
from .errors import DegenerateFit, InadmissibleScenario, InvalidExponent
from .fractional_calculus import FractionalOrder, TimeGrid
from .spectral_kernels import Field, SpatialGrid, kernel_lq_norm, profile_field

__all__ = [
    "CriticalExponents",
    "critical_exponents",
    "q_scaling",
    "q_scaling_inverse",
    "BetaQ",
    "beta_q",
    "CASES",
    "DecayScenario",
    "ScenarioRun",
    "DecayReport",
    "FitResult",
    "theoretical_decay",
    "decay_fit",
    "fit_instants",
    "run_scenario",
    "spectral_gradient_norm",
    "BOUND_CONSTANTS",
    "integral_bound",
    "integral_bound_extended",
    "integral_bound_branch",
    "extended_bound_branch",
    "singular_integral",
    "singular_integral_extended",
    "bound_corpus",
    "x_norm",
]


def _inv(q: float) -> float:
    return 0.0 if math.isinf(q) else 1.0 / q


# ------------------------------------------------------------ exponents


@dataclass(frozen=True)
class CriticalExponents:
    n: int
    alpha: float
    p_bar: float
    p_tilde: float
    p_hat: float
    p_memory_crit: float

    def ordering_violations(self) -> list[str]:
        """Inequalities of ``1+2/n < p_tilde < 1+2/(n-1) < p_bar < 1+2/(n-2)`` that fail.

        Entries that are infinite are skipped.
        """
        n = self.n
        chain = [
            ("1+2/n", 1.0 + 2.0 / n),
            ("p_tilde", self.p_tilde),
            ("1+2/(n-1)", 1.0 + 2.0 / (n - 1) if n > 1 else math.inf),
            ("p_bar", self.p_bar),
            ("1+2/(n-2)", 1.0 + 2.0 / (n - 2) if n > 2 else math.inf),
        ]
        bad = []
        for (na, va), (nb, vb) in zip(chain, chain[1:]):
            if math.isfinite(va) and math.isfinite(vb) and not va < vb:
                bad.append(f"{na}={va:g} !< {nb}={vb:g}")
        return bad


def _one_plus(num: float, den: float) -> float:
    return 1.0 + num / den if den > 0 else math.inf


def critical_exponents(n: int, alpha: float) -> CriticalExponents:
    """``p_bar = 1 + 2/(n - 2/(1+alpha))``, ``p_tilde = 1 + 2/(n - 2 + 2/(1+alpha))``,
    ``p_hat = 1 + 2(1+alpha)/(n - 2 alpha)`` and ``max(p_hat, 1/(1-alpha))``.

    An entry is ``inf`` when its denominator is not positive.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    p_bar = _one_plus(2.0, n - 2.0 / (1.0 + alpha))
    p_tilde = _one_plus(2.0, n - 2.0 + 2.0 / (1.0 + alpha))
    p_hat = _one_plus(2.0 * (1.0 + alpha), n - 2.0 * alpha)
    memory = max(p_hat, 1.0 / (1.0 - alpha)) if alpha < 1 else math.inf
    return CriticalExponents(n, alpha, p_bar, p_tilde, p_hat, memory)


def q_scaling(n: float, alpha: float, p: float) -> float:
    """Scaling-invariant Lebesgue exponent ``n (p-1)(1+alpha) / (2 (p+alpha))``."""
    if not p > 1:
        raise InvalidExponent("p must exceed 1")
    return n * (p - 1.0) * (1.0 + alpha) / (2.0 * (p + alpha))


def q_scaling_inverse(n: float, alpha: float, q: float = 1.0) -> float:
    """The power ``p`` with ``q_scaling(n, alpha, p) = q`` (``inf`` if none)."""
    sup = n * (1.0 + alpha) / 2.0       # limit of q_scaling as p -> inf
    if q <= 0 or q >= sup:
        return math.inf
    hi = 2.0
    while q_scaling(n, alpha, hi) < q:
        hi *= 2.0
    return optimize.brentq(lambda p: q_scaling(n, alpha, p) - q, 1.0 + 1e-15, hi, xtol=1e-15, rtol=1e-15)


class BetaQ(NamedTuple):
    value: float
    untruncated: bool


def beta_q(n: int, alpha: float, q: float, delta: float) -> BetaQ:
    """``min{(n/2)(1+alpha)(1-1/q), 1+alpha-delta}`` and whether the first entry may be used outright."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    full = 0.5 * n * (1.0 + alpha) * (1.0 - _inv(q))
    if n == 1:
        flag = True
    elif n == 2:
        flag = not math.isinf(q)
    else:
        flag = q < 1.0 + 2.0 / (n - 2)
    return BetaQ(min(full, 1.0 + alpha - delta), flag)


# ------------------------------------------------------- decay scenarios

CASES = ("hom_u0", "hom_u1", "forced", "semilinear_thm10", "semilinear_thm00", "gradient")


@dataclass(frozen=True)
class DecayScenario:
    n: int
    alpha: float
    q: float
    case: str
    delta: float = 0.01
    r: float = 1.0          # Lebesgue exponent of the datum (r_0, r_1 or r_2)
    eta: float = 2.0        # forcing decay exponent

    def __post_init__(self):
        if self.case not in CASES:
            raise ValueError(f"unknown case {self.case!r}; expected one of {CASES}")
        FractionalOrder(self.alpha)
        if not 1 <= self.r <= self.q:
            raise InadmissibleScenario(f"need 1 <= r <= q, got r={self.r}, q={self.q}")


def _check_admissible(sc: DecayScenario) -> None:
    gap = _inv(sc.r) - _inv(sc.q)
    if sc.case in ("hom_u0", "hom_u1"):
        ok = 0.5 * sc.n * gap < 1.0
    elif sc.case == "forced":
        ok = 0.5 * sc.n * gap < 2.0
    elif sc.case == "gradient":
        ok = sc.n * gap <= 1.0
    else:
        ok = True
    if not ok:
        raise InadmissibleScenario(f"q={sc.q} outside the kernel range for case {sc.case}")


def theoretical_decay(sc: DecayScenario) -> float:
    """Predicted power of ``(1+t)`` for the scenario (positive means growth).

    For ``eta = 1`` the forced rate carries an extra ``log(1+t)`` factor that
    is not part of the returned exponent.
    """
    _check_admissible(sc)
    n, al = sc.n, sc.alpha
    smoothing = 0.5 * n * (1.0 + al) * (_inv(sc.r) - _inv(sc.q))
    if sc.case == "hom_u0":
        return -smoothing
    if sc.case == "hom_u1":
        return 1.0 - smoothing
    if sc.case == "forced":
        return al - smoothing + (0.0 if sc.eta >= 1 else 1.0 - sc.eta)
    if sc.case == "gradient":
        return -smoothing - 0.5 * (1.0 + al)
    bq = beta_q(n, al, sc.q, sc.delta).value
    return (1.0 if sc.case == "semilinear_thm10" else al) - bq


class FitResult(NamedTuple):
    exponent: float
    residual: float
    n_points: int


def fit_instants(t_min: float = 10.0, t_max: float = 100.0, count: int = 20) -> np.ndarray:
    return np.geomspace(t_min, t_max, count)


def decay_fit(times, norms, window: float = 0.6) -> FitResult:
    """Least-squares slope of ``log(norm)`` against ``log(1+t)`` over the trailing ``window`` of instants."""
    times = np.asarray(times, dtype=float)
    norms = np.asarray(norms, dtype=float)
    if times.shape != norms.shape:
        raise ValueError("times and norms differ in length")
    if not 0 < window <= 1:
        raise ValueError("window must lie in (0, 1]")
    k = int(math.ceil(window * times.size - 1e-9))
    t, v = times[-k:], norms[-k:]
    if t.size < 8:
        raise DegenerateFit(f"only {t.size} instants in the fit window (need 8)")
    if np.any(v <= 0) or not np.all(np.isfinite(v)):
        raise DegenerateFit("norms must be positive and finite")
    x = np.log1p(t)
    if np.ptp(x) == 0:
        raise DegenerateFit("all fit instants coincide")
    y = np.log(v)
    slope, icpt = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + icpt)) ** 2)))
    return FitResult(float(slope), resid, int(t.size))


@dataclass(frozen=True)
class ScenarioRun:
    """Discretization and data for running a :class:`DecayScenario`."""

    points: int = 1024
    half_width: float = 200.0
    profile: str = "gaussian"
    width: float = 1.0
    amplitude: float = 1.0
    power: float | None = None
    time_step: float = 0.1
    t_min: float = 10.0
    t_max: float = 100.0
    n_instants: int = 20
    window: float = 0.6
    tolerance: float = 0.05


@dataclass
class DecayReport:
    scenario: DecayScenario
    times: np.ndarray
    norms: np.ndarray
    fitted_exponent: float
    theoretical_exponent: float
    tolerance: float
    passed: bool
    fit_residual: float = 0.0
    status: str = "completed"
    extra: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            **asdict(self.scenario),
            "fitted_exponent": self.fitted_exponent,
            "theoretical_exponent": self.theoretical_exponent,
            "tolerance": self.tolerance,
            "fit_residual": self.fit_residual,
            "status": self.status,
            "pass": self.passed,
            **self.extra,
        }


def spectral_gradient_norm(f: Field, q: float) -> float:
    """``|| |grad f| ||_q`` with the derivative taken in Fourier space (Nyquist mode dropped)."""
    grid = f.grid
    spec = f.spectrum()
    nyq = grid.points_per_axis // 2
    sq = np.zeros(grid.shape)
    for j, k in enumerate(grid.xi_components()):
        fac = 1j * k
        idx = [slice(None)] * grid.dim
        idx[j] = nyq
        fac[tuple(idx)] = 0.0
        sq += np.fft.ifftn(fac * spec).real ** 2
    return kernel_lq_norm(Field(grid, np.sqrt(sq)), q)


def _solve_scenario(sc: DecayScenario, run: ScenarioRun, times: np.ndarray) -> Trajectory:
    grid = SpatialGrid(sc.n, run.points, run.half_width)
    bump = profile_field(grid, run.profile, amplitude=run.amplitude, width=run.width)
    zero = Field(grid, np.zeros(grid.shape))
    order = FractionalOrder(sc.alpha)
    if sc.case in ("hom_u0", "gradient"):
        return solve_linear(CauchyProblem(order, bump), times)
    if sc.case == "hom_u1":
        return solve_linear(CauchyProblem(order, zero, bump), times)
    if sc.case == "forced":
        forcing = FixedForcing.separable(bump, 1.0, sc.eta)
        return solve_linear(CauchyProblem(order, zero, None, forcing), times, quad_step=run.time_step)
    if run.power is None:
        raise ValueError("semilinear scenarios need a power")
    u1 = bump if sc.case == "semilinear_thm10" else None
    step = TimeGrid.covering(float(times.max()), run.time_step)
    return solve_semilinear(CauchyProblem(order, bump, u1, power=run.power), step, out_times=times)


def run_scenario(sc: DecayScenario, run: ScenarioRun = ScenarioRun()) -> DecayReport:
    """Solve the scenario, measure the ``L^q`` norm at log-spaced instants and fit its decay."""
    theory = theoretical_decay(sc)
    times = fit_instants(run.t_min, run.t_max, run.n_instants)
    traj = _solve_scenario(sc, run, times)
    if not traj.completed:
        return DecayReport(sc, traj.times, np.array([]), math.nan, theory, run.tolerance, False,
                           status=traj.status, extra={"blowup_time": traj.blowup_time})
    if sc.case == "gradient":
        norms = np.array([spectral_gradient_norm(s, sc.q) for s in traj.snapshots])
    else:
        norms = traj.norms(sc.q)
    fit = decay_fit(traj.times, norms, run.window)
    passed = abs(fit.exponent - theory) <= run.tolerance
    return DecayReport(sc, traj.times, norms, fit.exponent, theory, run.tolerance, passed, fit.residual)


# ------------------------------------------------------- integral bounds

# One constant per branch, 1.2 x the largest quadrature/shape ratio over
# bound_corpus(seed=BOUND_SEED); regenerate with scripts/calibrate_bounds.py.
BOUND_SEED = 20240611
BOUND_CONSTANTS = {
    "b>1": 10.4465,
    "b=1": 164305.0,
    "b=1,corrected": 7.72778,
    "b<1": 11.6844,
    "ext,b0>1": 4.03711,
    "ext,b0=1": 5.12472,
    "ext,b0<1": 2.14411,
}


def integral_bound_branch(a: float, b: float) -> str:
    if a >= 1:
        raise InvalidExponent(f"a={a} must be < 1")
    return "b>1" if b > 1 else ("b=1" if b == 1 else "b<1")


def extended_bound_branch(b0: float) -> str:
    return "ext,b0>1" if b0 > 1 else ("ext,b0=1" if b0 == 1 else "ext,b0<1")


def _shape(a: float, b: float, t: float, corrected: bool = False) -> float:
    branch = integral_bound_branch(a, b)
    if branch == "b>1":
        return (1.0 + t) ** (-a)
    if branch == "b=1":
        if corrected:
            return (1.0 + t) ** (-a) * math.log(math.e + t)
        return (1.0 + t) ** (-1.0) * math.log1p(t)
    return (1.0 + t) ** (1.0 - a - b)


def integral_bound(a: float, b: float, t: float, corrected: bool = False) -> float:
    """Calibrated majorant of ``int_0^t (t-s)^(-a) (1+s)^(-b) ds`` for ``a < 1``.

    Branches: ``(1+t)^(-a)`` if ``b > 1``; ``(1+t)^(-1) log(1+t)`` if
    ``b = 1``; ``(1+t)^(1-a-b)`` if ``b < 1``. The ``b = 1`` shape does not
    dominate the integral, which behaves like ``t^(-a) log t`` for large
    ``t``; ``corrected=True`` selects ``(1+t)^(-a) log(e+t)`` instead.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    key = integral_bound_branch(a, b)
    if key == "b=1" and corrected:
        key = "b=1,corrected"
    return BOUND_CONSTANTS[key] * _shape(a, b, t, corrected)


def _extended_shape(a0, b0, a1, b1, t):
    if a1 >= 1:
        raise InvalidExponent(f"a1={a1} must be < 1")
    first = (1.0 + t) ** (1.0 - a1 - b1)
    if b0 > 1:
        second = (1.0 + t) ** (-a0)
    elif b0 == 1:
        second = (1.0 + t) ** (-a0) * math.log1p(t)
    else:
        second = (1.0 + t) ** (1.0 - a0 - b0)
    return first + second


def integral_bound_extended(a0: float, b0: float, a1: float, b1: float, t: float) -> float:
    """Calibrated majorant of ``int_0^t k(t,s) ds`` for ``k <= min{(t-s)^(-a0)(1+s)^(-b0), (t-s)^(-a1)(1+s)^(-b1)}``.

    Shape: ``(1+t)^(1-a1-b1)`` plus ``(1+t)^(-a0)``, ``(1+t)^(-a0) log(1+t)`` or
    ``(1+t)^(1-a0-b0)`` for ``b0`` above, at or below 1.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    return BOUND_CONSTANTS[extended_bound_branch(b0)] * _extended_shape(a0, b0, a1, b1, t)


def singular_integral(a: float, b: float, t: float) -> float:
    """``int_0^t (t-s)^(-a) (1+s)^(-b) ds`` by QUADPACK with the algebraic endpoint weight."""
    if t == 0:
        return 0.0
    val, _ = integrate.quad(lambda s: (1.0 + s) ** (-b), 0.0, t, weight="alg", wvar=(0.0, -a),
                            epsabs=0.0, epsrel=1e-10, limit=200)
    return val


def singular_integral_extended(a0, b0, a1, b1, t) -> float:
    """``int_0^t min{(t-s)^(-a0)(1+s)^(-b0), (t-s)^(-a1)(1+s)^(-b1)} ds``.

    The interval is split where the two envelopes cross; on each piece the
    smaller envelope is integrated, with the algebraic weight on the piece
    ending at ``s = t``.
    """
    if t == 0:
        return 0.0
    if a1 >= 1:
        raise InvalidExponent(f"a1={a1} must be < 1")

    def gap(s):
        return (a1 - a0) * math.log(t - s) - (b0 - b1) * math.log1p(s)

    probe = np.unique(np.concatenate([t * np.linspace(0.0, 1.0, 401)[:-1],
                                      t - t * np.geomspace(1e-12, 0.5, 200)]))
    g = np.array([gap(x) for x in probe])
    cuts = [0.0]
    for i in np.flatnonzero(np.sign(g[:-1]) * np.sign(g[1:]) < 0):
        cuts.append(optimize.brentq(gap, probe[i], probe[i + 1], xtol=1e-14 * max(t, 1.0)))
    cuts.append(t)
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        mid = 0.5 * (lo + hi)
        a, b = (a1, b1) if gap(mid) > 0 else (a0, b0)   # gap = log(envelope 0 / envelope 1)
        if hi == t:
            val, _ = integrate.quad(lambda s: (1.0 + s) ** (-b), lo, hi, weight="alg", wvar=(0.0, -a),
                                    epsabs=0.0, epsrel=1e-10, limit=200)
        else:
            # u = t - s = e^v keeps pieces that end just short of s = t smooth
            val, _ = integrate.quad(lambda v: math.exp((1.0 - a) * v) * (1.0 + t - math.exp(v)) ** (-b),
                                    math.log(t - hi), math.log(t - lo), epsabs=0.0, epsrel=1e-10, limit=200)
        total += val
    return total


def bound_corpus(seed: int = BOUND_SEED, size: int = 50) -> dict[str, list[tuple]]:
    """Fixed random parameter sets per branch: ``(a, b, t)`` or ``(a0, b0, a1, b1, t)``."""
    rng = np.random.default_rng(seed)

    def times():
        return float(10.0 ** rng.uniform(-2.0, 3.0))

    out: dict[str, list[tuple]] = {k: [] for k in BOUND_CONSTANTS}
    for _ in range(size):
        a = float(rng.uniform(-1.0, 0.95))
        out["b>1"].append((a, float(rng.uniform(1.05, 4.0)), times()))
        a = float(rng.uniform(-1.0, 0.95))
        tt = times()
        out["b=1"].append((a, 1.0, tt))
        out["b=1,corrected"].append((a, 1.0, tt))
        out["b<1"].append((float(rng.uniform(-1.0, 0.95)), float(rng.uniform(-1.0, 0.95)), times()))
        for key, b0 in (("ext,b0>1", rng.uniform(1.05, 4.0)), ("ext,b0=1", 1.0),
                        ("ext,b0<1", rng.uniform(-1.0, 0.95))):
            out[key].append((float(rng.uniform(-0.5, 1.5)), float(b0), float(rng.uniform(-0.5, 0.95)),
                             float(rng.uniform(-0.5, 3.0)), times()))
    return out


def bound_ratios(corpus: dict[str, list[tuple]] | None = None) -> dict[str, np.ndarray]:
    """Quadrature value divided by the unscaled branch shape, per corpus entry."""
    corpus = bound_corpus() if corpus is None else corpus
    out = {}
    for key, rows in corpus.items():
        vals = []
        for row in rows:
            if key.startswith("ext"):
                vals.append(singular_integral_extended(*row) / _extended_shape(*row))
            else:
                a, b, t = row
                vals.append(singular_integral(a, b, t) / _shape(a, b, t, corrected=key.endswith("corrected")))
        out[key] = np.array(vals)
    return out


# ---------------------------------------------------------------- X norm


def x_norm(trajectory: Trajectory, variant: str, p: float) -> float:
    """``sup_t (1+t)^(-w) (||u||_1 + (1+t)^((n/2)(1+alpha)(1-1/p)) ||u||_p)``.

    ``w = alpha`` for ``variant="thm00"`` and ``w = 1`` for ``"thm10"``; the
    supremum runs over the stored instants.
    """
    if variant not in ("thm00", "thm10"):
        raise ValueError("variant must be 'thm00' or 'thm10'")
    alpha = trajectory.problem.alpha.alpha
    n = trajectory.problem.grid.dim
    w = alpha if variant == "thm00" else 1.0
    gain = 0.5 * n * (1.0 + alpha) * (1.0 - _inv(p))
    best = 0.0
    for t, snap in zip(trajectory.times, trajectory.snapshots):
        val = (1.0 + t) ** (-w) * (kernel_lq_norm(snap, 1.0) + (1.0 + t) ** gain * kernel_lq_norm(snap, p))
        best = max(best, val)
    return best
