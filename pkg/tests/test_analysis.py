from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from fracdiffusive.analysis import (BOUND_CONSTANTS, BOUND_SEED, DecayScenario, ScenarioRun, beta_q,
                                    bound_corpus, critical_exponents, decay_fit, extended_bound_branch,
                                    fit_instants, integral_bound, integral_bound_branch,
                                    integral_bound_extended, singular_integral, singular_integral_extended,
                                    q_scaling, q_scaling_inverse, run_scenario, theoretical_decay, x_norm)
from fracdiffusive.cauchy_solver import CauchyProblem, Trajectory
from fracdiffusive.errors import DegenerateFit, InadmissibleScenario, InvalidExponent
from fracdiffusive.spectral_kernels import Field, SpatialGrid, kernel_lq_norm, profile_field

ALPHAS = (0.1, 0.3, 0.5, 0.7, 0.9)


# ------------------------------------------------------------ exponents


def test_exponent_examples():
    ce = critical_exponents(2, 1.0 - 1e-12)
    assert ce.p_bar == pytest.approx(3.0) and ce.p_tilde == pytest.approx(3.0)
    assert critical_exponents(1, 0.5).p_tilde == pytest.approx(7.0)
    assert math.isinf(critical_exponents(1, 0.5).p_bar)
    assert critical_exponents(2, 0.5).p_bar == pytest.approx(4.0)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("alpha", ALPHAS)
def test_ordering_chain(n, alpha):
    assert critical_exponents(n, alpha).ordering_violations() == []


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_monotonicity_in_alpha(n):
    grid = np.linspace(0.05, 0.95, 19)
    tilde = [critical_exponents(n, a).p_tilde for a in grid]
    bar = [critical_exponents(n, a).p_bar for a in grid]
    assert np.all(np.diff(tilde) > 0)
    finite = [b for b in bar if math.isfinite(b)]
    assert np.all(np.diff(finite) < 0)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_limits(n):
    lo, hi = critical_exponents(n, 1e-9), critical_exponents(n, 1.0 - 1e-9)
    assert lo.p_tilde == pytest.approx(1 + 2 / n, rel=1e-7)
    if n >= 3:
        assert lo.p_bar == pytest.approx(1 + 2 / (n - 2), rel=1e-7)
    if n >= 2:
        assert hi.p_tilde == pytest.approx(1 + 2 / (n - 1), rel=1e-7)
        assert hi.p_bar == pytest.approx(1 + 2 / (n - 1), rel=1e-7)


@given(st.integers(1, 6), st.floats(0.01, 0.99))
def test_tilde_equals_hat_at_scaled_dimension(n, alpha):
    ce = critical_exponents(n, alpha)
    scaled = critical_exponents(1, alpha)
    p_hat = 1.0 + 2.0 * (1 + alpha) / (n * (1 + alpha) - 2 * alpha)
    assert ce.p_tilde == pytest.approx(p_hat, rel=1e-12)
    assert ce.p_memory_crit >= ce.p_hat
    assert scaled.p_memory_crit == max(scaled.p_hat, 1 / (1 - alpha))


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("alpha", ALPHAS)
def test_q_scaling_at_p_bar(n, alpha):
    p_bar = critical_exponents(n, alpha).p_bar
    if math.isfinite(p_bar):
        assert abs(q_scaling(n, alpha, p_bar) - 1.0) <= 1e-12
        assert q_scaling_inverse(n, alpha) == pytest.approx(p_bar, rel=1e-12)
    else:
        assert math.isinf(q_scaling_inverse(n, alpha))


def test_q_scaling_edges():
    assert q_scaling(2, 1.0, 3.0) == pytest.approx(1.0)
    assert q_scaling(3, 0.5, 1.0 + 1e-12) < 1e-11
    with pytest.raises(InvalidExponent):
        q_scaling(1, 0.5, 1.0)


def test_beta_q_examples():
    assert beta_q(1, 0.5, math.inf, 0.01) == (0.75, True)
    assert beta_q(2, 0.5, 1.0, 0.01).value == 0.0
    bq = beta_q(3, 0.5, math.inf, 0.1)
    assert bq.value == pytest.approx(1.4) and not bq.untruncated
    assert not beta_q(2, 0.5, math.inf, 0.1).untruncated
    assert beta_q(3, 0.5, 2.5, 0.1).untruncated
    with pytest.raises(ValueError):
        beta_q(1, 0.5, 2.0, 0.0)


# ----------------------------------------------------------- scenarios


def test_theoretical_decay_examples():
    assert theoretical_decay(DecayScenario(1, 0.5, math.inf, "hom_u0")) == pytest.approx(-0.75)
    assert theoretical_decay(DecayScenario(1, 0.5, math.inf, "hom_u1")) == pytest.approx(0.25)
    assert theoretical_decay(DecayScenario(1, 0.5, math.inf, "semilinear_thm00")) == pytest.approx(-0.25)
    assert theoretical_decay(DecayScenario(1, 0.5, math.inf, "forced")) == pytest.approx(-0.25)
    assert theoretical_decay(DecayScenario(1, 0.5, math.inf, "gradient")) == pytest.approx(-1.5)
    assert theoretical_decay(DecayScenario(2, 0.5, math.inf, "semilinear_thm10")) == pytest.approx(-0.49)
    assert theoretical_decay(DecayScenario(1, 0.5, math.inf, "forced", eta=0.5)) == pytest.approx(0.25)


def test_scenario_validation():
    with pytest.raises(ValueError):
        DecayScenario(1, 0.5, 2.0, "mystery")
    with pytest.raises(InadmissibleScenario):
        DecayScenario(1, 0.5, 2.0, "hom_u0", r=3.0)
    with pytest.raises(InadmissibleScenario):
        theoretical_decay(DecayScenario(3, 0.5, math.inf, "hom_u0"))
    with pytest.raises(InadmissibleScenario):
        theoretical_decay(DecayScenario(3, 0.5, math.inf, "gradient"))


def test_fit_synthetic():
    t = fit_instants()
    assert fit_instants(10, 100, 20)[0] == 10.0 and t.size == 20
    assert decay_fit(t, (1 + t) ** -0.75).exponent == pytest.approx(-0.75, abs=1e-12)
    assert decay_fit(t, np.full(t.size, 3.0)).exponent == pytest.approx(0.0, abs=1e-12)
    res = decay_fit(t, (1 + t) ** 0.3 * 2.0)
    assert res.residual < 1e-12 and res.n_points == 12


def test_fit_degenerate():
    t = fit_instants()
    with pytest.raises(DegenerateFit):
        decay_fit(t[:10], np.ones(10))
    with pytest.raises(DegenerateFit):
        decay_fit(np.full(20, 5.0), np.ones(20))
    with pytest.raises(DegenerateFit):
        decay_fit(t, np.zeros(20))
    with pytest.raises(ValueError):
        decay_fit(t, np.ones(19))


def test_hom_u0_pipeline():
    rep = run_scenario(DecayScenario(1, 0.5, math.inf, "hom_u0"))
    assert rep.passed and abs(rep.fitted_exponent + 0.75) <= 0.05
    summary = rep.summary()
    assert summary["pass"] and summary["case"] == "hom_u0"


def test_semilinear_scenario_needs_power():
    with pytest.raises(ValueError):
        run_scenario(DecayScenario(1, 0.5, math.inf, "semilinear_thm00"), ScenarioRun(points=64, half_width=20))


def test_blowup_reported_as_failure():
    rep = run_scenario(DecayScenario(1, 0.5, math.inf, "semilinear_thm00"),
                       ScenarioRun(points=128, half_width=40, profile="bump", width=2.0, amplitude=5.0,
                                   power=2.0, time_step=0.05))
    assert not rep.passed and rep.status == "blowup" and rep.extra["blowup_time"] < 10


# -------------------------------------------------------------- bounds


def test_bound_branches():
    assert integral_bound_branch(0.5, 2) == "b>1"
    assert integral_bound_branch(0.5, 1) == "b=1"
    assert integral_bound_branch(0.5, 0.2) == "b<1"
    assert extended_bound_branch(1.0) == "ext,b0=1"
    with pytest.raises(InvalidExponent):
        integral_bound(1.0, 0.5, 1.0)
    with pytest.raises(InvalidExponent):
        integral_bound_extended(0.2, 2.0, 1.0, 0.5, 1.0)


@given(st.floats(-1.0, 0.95), st.floats(-1.0, 3.0), st.floats(0.01, 500.0))
def test_singular_integral_matches_plain_quad(a, b, t):
    ref, _ = integrate.quad(lambda s: (t - s) ** (-a) * (1 + s) ** (-b), 0, t, limit=400, epsrel=1e-11)
    assert singular_integral(a, b, t) == pytest.approx(ref, rel=1e-6)


def test_bound_examples():
    assert singular_integral(0.0, 0.0, 7.0) == pytest.approx(7.0)
    assert singular_integral(0.0, 0.0, 7.0) <= integral_bound(0.0, 0.0, 7.0)
    assert singular_integral(0.5, 2.0, 10.0) <= integral_bound(0.5, 2.0, 10.0)
    assert singular_integral(0.5, 1.0, 10.0) <= integral_bound(0.5, 1.0, 10.0)
    assert singular_integral_extended(0.2, 2, 0.5, 0.8, 20.0) <= integral_bound_extended(0.2, 2, 0.5, 0.8, 20.0)
    assert singular_integral_extended(0.2, 2, 0.5, 0.8, 0.0) == 0.0
    assert integral_bound_extended(0.2, 2, 0.5, 0.8, 0.0) >= 0.0


def test_uncorrected_b1_shape_is_not_a_majorant():
    # the integral behaves like t^-a log t, which outgrows (1+t)^-1 log(1+t)
    ratios = [singular_integral(0.5, 1.0, t) / ((1 + t) ** -1 * math.log1p(t)) for t in (10.0, 100.0, 1000.0)]
    assert ratios[0] < ratios[1] < ratios[2]
    corrected = [singular_integral(0.5, 1.0, t) / ((1 + t) ** -0.5 * math.log(math.e + t)) for t in (10, 100, 1000)]
    assert max(corrected) < 2.0


def test_extended_reduces_to_single_envelope():
    for (a, b, t) in [(0.3, 2.0, 5.0), (0.5, 0.5, 40.0), (-0.5, 1.0, 3.0)]:
        assert singular_integral_extended(a, b, a, b, t) == pytest.approx(singular_integral(a, b, t), rel=1e-9)


def test_extended_against_plain_quad():
    a0, b0, a1, b1, t = 0.2, 2.0, 0.5, 0.8, 20.0
    f = lambda s: min((t - s) ** -a0 * (1 + s) ** -b0, (t - s) ** -a1 * (1 + s) ** -b1)
    ref, _ = integrate.quad(f, 0, t, limit=500, epsrel=1e-10, points=[t * 0.5, t * 0.9, t * 0.99])
    assert singular_integral_extended(a0, b0, a1, b1, t) == pytest.approx(ref, rel=1e-6)


def test_corpus_is_frozen():
    c1, c2 = bound_corpus(), bound_corpus(BOUND_SEED)
    assert c1 == c2
    assert set(c1) == set(BOUND_CONSTANTS)
    assert all(len(v) == 50 for v in c1.values())


# -------------------------------------------------------------- X norm


def _synthetic(grid, times, factor):
    g = profile_field(grid, "gaussian")
    snaps = [Field(grid, factor(t) * g.values) for t in times]
    return Trajectory(CauchyProblem(0.5, g), np.asarray(times), snaps), g


def test_x_norm_zero():
    grid = SpatialGrid(1, 64, 10.0)
    traj, _ = _synthetic(grid, [0.0, 1.0, 2.0], lambda t: 0.0)
    assert x_norm(traj, "thm00", 2.0) == 0.0


def test_x_norm_weights_compose():
    grid = SpatialGrid(1, 128, 10.0)
    times = np.linspace(0.0, 10.0, 11)
    traj, g = _synthetic(grid, times, lambda t: (1 + t) ** 0.5)
    gain = 0.5 * 1.5 * 0.5
    expected = kernel_lq_norm(g, 1) + 11.0 ** gain * kernel_lq_norm(g, 2)
    assert x_norm(traj, "thm00", 2.0) == pytest.approx(expected, rel=1e-12)
    traj1, _ = _synthetic(grid, times, lambda t: 1 + t)
    assert x_norm(traj1, "thm10", 2.0) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(ValueError):
        x_norm(traj, "thm99", 2.0)
