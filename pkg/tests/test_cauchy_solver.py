from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracdiffusive.cauchy_solver import (CauchyProblem, FixedForcing, mode_eigenvalues, reconstruct_ut,
                                         solve_linear, solve_rl_problem, solve_semilinear)
from fracdiffusive.fractional_calculus import FractionalOrder, TimeGrid, TimeSeries, caputo_derivative
from fracdiffusive.spectral_kernels import Field, SpatialGrid, kernel_lq_norm, profile_field
from fracdiffusive.special_functions import eval_ml, ml_weighted_derivative

HALF = FractionalOrder(0.5)


@pytest.fixture
def grid():
    return SpatialGrid(1, 128, 20.0)


def zero(grid):
    return Field(grid, np.zeros(grid.shape))


def mode(grid, k=3):
    return profile_field(grid, "mode", wavenumber=k)


def xi(grid, k=3):
    return math.pi * k / grid.half_width


# ------------------------------------------------------------ problem


def test_problem_validation(grid):
    g2 = SpatialGrid(1, 64, 20.0)
    with pytest.raises(ValueError):
        CauchyProblem(HALF, zero(grid), zero(g2))
    with pytest.raises(ValueError):
        CauchyProblem(HALF, zero(grid), power=1.0)
    with pytest.raises(ValueError):
        CauchyProblem(HALF, zero(grid), forcing=FixedForcing.separable(zero(grid)), power=2.0)
    with pytest.raises(ValueError):
        FixedForcing(lambda t: 0.0, K=-1.0)
    assert CauchyProblem(0.5, zero(grid)).alpha == HALF


def test_mode_eigenvalues(grid):
    lam = mode_eigenvalues(grid)
    assert lam[0] == 0.0 and np.all(np.diff(lam) > 0)
    assert lam.max() == pytest.approx((math.pi * 64 / grid.half_width) ** 2)
    assert mode_eigenvalues(grid, 2.0)[1] == pytest.approx(lam[1] ** 2)


# ------------------------------------------------------------- linear


def test_initial_value_recovered(grid):
    u0 = profile_field(grid, "gaussian", width=2.0)
    traj = solve_linear(CauchyProblem(HALF, u0), [1e-6])
    assert np.max(np.abs(traj.snapshots[0].values - u0.values)) <= 1e-8


def test_initial_velocity_recovered(grid):
    u1 = profile_field(grid, "gaussian", width=2.0)
    t = 1e-6
    traj = solve_linear(CauchyProblem(HALF, zero(grid), u1), [t])
    assert np.max(np.abs(traj.snapshots[0].values / t - u1.values)) <= 1e-6


@pytest.mark.parametrize("k", [1, 3, 10])
def test_single_mode_exact(grid, k):
    times = np.array([0.0, 0.3, 1.0, 7.5, 40.0])
    traj = solve_linear(CauchyProblem(HALF, mode(grid, k)), times)
    amp = eval_ml(1.5, 1.0, times ** 1.5 * xi(grid, k) ** 2)
    for a, snap in zip(amp, traj.snapshots):
        assert np.max(np.abs(snap.values - a * mode(grid, k).values)) <= 1e-9 * max(abs(a), 1e-3)


def test_single_mode_fractional_laplacian(grid):
    times = np.array([0.5, 2.0])
    traj = solve_linear(CauchyProblem(HALF, mode(grid), laplacian_power=1.5), times)
    amp = eval_ml(1.5, 1.0, times ** 1.5 * xi(grid) ** 3)
    for a, snap in zip(amp, traj.snapshots):
        assert np.allclose(snap.values, a * mode(grid).values, atol=1e-12)


@settings(max_examples=15)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_linearity(a, b, c):
    g = SpatialGrid(1, 64, 10.0)
    u0 = profile_field(g, "gaussian")
    u1 = profile_field(g, "bump", width=3.0)
    f = profile_field(g, "mode", wavenumber=2)
    times = [0.5, 2.0]

    def run(x, y, z):
        forcing = FixedForcing.separable(Field(g, z * f.values), 1.0, 1.5)
        return solve_linear(CauchyProblem(HALF, Field(g, x * u0.values), Field(g, y * u1.values), forcing),
                            times, quad_step=0.1)

    full = run(a, b, c)
    parts = [run(a, 0, 0), run(0, b, 0), run(0, 0, c)]
    for i in range(2):
        combo = sum(p.snapshots[i].values for p in parts)
        assert np.allclose(full.snapshots[i].values, combo, atol=1e-12)


def test_forced_mode_ode_residual(grid):
    # u'' of order 1.5 + xi^2 u = (1+t)^-1 on a single mode, starting from rest
    res = []
    for h in (2e-2, 1e-2):
        step = TimeGrid.covering(2.0, h)
        forcing = FixedForcing.separable(mode(grid), 1.0, 1.0)
        traj = solve_linear(CauchyProblem(HALF, zero(grid), None, forcing), step.times, quad_step=h)
        amp = np.array([s.values[64] for s in traj.snapshots])
        lhs = caputo_derivative(TimeSeries(step, amp), 1.5).values
        resid = lhs + xi(grid) ** 2 * amp - (1.0 + step.times) ** -1.0
        res.append(np.max(np.abs(resid[step.times >= 0.2])))
    assert res[1] < res[0] and res[1] <= 5e-2


def test_well_posedness_ratio_bounded():
    g = SpatialGrid(1, 256, 40.0)
    ratios = []
    for width in (0.5, 1.0, 4.0):
        for q in (1.0, 2.0, math.inf):
            u0 = profile_field(g, "gaussian", width=width)
            u1 = profile_field(g, "bump", width=2 * width)
            forcing = FixedForcing.separable(profile_field(g, "gaussian", width=width), 1.0, 0.0)
            traj = solve_linear(CauchyProblem(HALF, u0, u1, forcing), [0.5, 1.0, 2.0], quad_step=0.05)
            for t, s in zip(traj.times, traj.snapshots):
                rhs = kernel_lq_norm(u0, q) + t * kernel_lq_norm(u1, q) + kernel_lq_norm(forcing.profile, q)
                ratios.append(kernel_lq_norm(s, q) / rhs)
    assert max(ratios) <= 5.0


# ---------------------------------------------------------- semilinear


def test_zero_data_stays_zero(grid):
    traj = solve_semilinear(CauchyProblem(HALF, zero(grid), power=3.0), TimeGrid(0.1, 20))
    assert traj.completed
    assert all(np.all(s.values == 0.0) for s in traj.snapshots)


def test_small_data_first_picard_iterate():
    g = SpatialGrid(1, 128, 30.0)
    eps, p = 1e-2, 2.0
    u0 = profile_field(g, "gaussian", amplitude=eps)
    step = TimeGrid.covering(2.0, 0.05)
    out = step.times[::10]
    semi = solve_semilinear(CauchyProblem(HALF, u0, power=p), step, out_times=out)
    lin = solve_linear(CauchyProblem(HALF, u0), out)

    def sampler(t):
        return np.abs(solve_linear(CauchyProblem(HALF, u0), [t]).snapshots[0].values) ** p

    forced = solve_linear(CauchyProblem(HALF, Field(g, np.zeros(g.shape)), None, FixedForcing(sampler)), out,
                          quad_step=step.h)
    for s, l, f in zip(semi.snapshots[1:], lin.snapshots[1:], forced.snapshots[1:]):
        first = f.values
        diff = s.values - l.values
        assert np.max(np.abs(diff - first)) <= 5 * eps * np.max(np.abs(first))


def test_keep_nonlinear_part(grid):
    u0 = profile_field(grid, "gaussian", amplitude=0.1)
    step = TimeGrid(0.1, 10)
    traj = solve_semilinear(CauchyProblem(HALF, u0, power=2.0), step, keep_nonlinear=True)
    lin = solve_linear(CauchyProblem(HALF, u0), traj.times)
    for s, l, n in zip(traj.snapshots, lin.snapshots, traj.nonlinear_part):
        assert np.allclose(s.values, l.values + n.values, atol=1e-12)


def test_subcritical_large_data_blows_up():
    g = SpatialGrid(1, 256, 40.0)
    u0 = profile_field(g, "bump", amplitude=5.0, width=2.0)
    traj = solve_semilinear(CauchyProblem(HALF, u0, power=2.0), TimeGrid.covering(10.0, 0.02))
    assert traj.status == "blowup"
    assert traj.blowup_time is not None and traj.blowup_time < 10.0
    sup = traj.norms(math.inf)
    assert np.all(np.diff(sup) >= 0.0)


def test_output_beyond_horizon_rejected(grid):
    with pytest.raises(ValueError):
        solve_semilinear(CauchyProblem(HALF, zero(grid), power=2.0), TimeGrid(0.1, 10), out_times=[5.0])


def test_semilinear_needs_power(grid):
    with pytest.raises(ValueError):
        solve_semilinear(CauchyProblem(HALF, zero(grid)), TimeGrid(0.1, 10))
    with pytest.raises(ValueError):
        solve_linear(CauchyProblem(HALF, zero(grid), power=2.0), [1.0])


# ------------------------------------------------------- time derivative


def test_ut_initial_velocity(grid):
    u1 = profile_field(grid, "gaussian", width=2.0)
    prob = CauchyProblem(HALF, zero(grid), u1)
    ut = reconstruct_ut(solve_linear(prob, [1e-6]))
    assert np.max(np.abs(ut.snapshots[0].values - u1.values)) <= 1e-6


def test_ut_single_mode_matches_finite_differences(grid):
    prob = CauchyProblem(HALF, mode(grid))
    t, dt = 1.5, 1e-3
    u = solve_linear(prob, [t - dt, t + dt])
    fd = (u.snapshots[1].values - u.snapshots[0].values) / (2 * dt)
    ut = reconstruct_ut(solve_linear(prob, [t])).snapshots[0].values
    assert np.max(np.abs(ut - fd)) <= 1e-4
    lam = -xi(grid) ** 2
    amp = ml_weighted_derivative(0.5, 1.0, lam, t, 1)
    assert np.allclose(ut, amp * mode(grid).values, atol=1e-10)


def test_ut_forced_matches_finite_differences(grid):
    forcing = FixedForcing.separable(profile_field(grid, "gaussian"), 1.0, 1.0)
    prob = CauchyProblem(HALF, zero(grid), None, forcing)
    t, dt = 1.0, 0.05
    u = solve_linear(prob, [t - dt, t + dt], quad_step=0.005)
    fd = (u.snapshots[1].values - u.snapshots[0].values) / (2 * dt)
    ut = reconstruct_ut(solve_linear(prob, [t], quad_step=0.005), quad_step=0.005).snapshots[0].values
    assert np.max(np.abs(ut - fd)) <= 1e-2 * np.max(np.abs(fd))


def test_ut_zero(grid):
    ut = reconstruct_ut(solve_linear(CauchyProblem(HALF, zero(grid)), [0.5, 1.0]))
    assert all(np.all(s.values == 0.0) for s in ut.snapshots)


def test_ut_rejects_semilinear_and_zero_time(grid):
    traj = solve_semilinear(CauchyProblem(HALF, zero(grid), power=2.0), TimeGrid(0.1, 2))
    with pytest.raises(ValueError):
        reconstruct_ut(traj)
    with pytest.raises(ValueError):
        reconstruct_ut(solve_linear(CauchyProblem(HALF, zero(grid)), [0.0]))


# ------------------------------------------------- Riemann-Liouville data


def test_rl_single_mode(grid):
    times = np.array([0.2, 1.0, 3.0])
    traj = solve_rl_problem(HALF, zero(grid), mode(grid), None, times)
    amp = times ** 0.5 * eval_ml(1.5, 1.5, times ** 1.5 * xi(grid) ** 2)
    for a, s in zip(amp, traj.snapshots):
        assert np.max(np.abs(s.values - a * mode(grid).values)) <= 1e-9 * abs(a)


def test_rl_zero(grid):
    traj = solve_rl_problem(HALF, zero(grid), zero(grid), None, [0.0, 1.0])
    assert all(np.all(s.values == 0.0) for s in traj.snapshots)


def test_rl_singular_datum_bounded(grid):
    times = np.array([1e-6, 1e-4, 1e-2])
    traj = solve_rl_problem(HALF, mode(grid), zero(grid), None, times)
    scaled = [np.max(np.abs(s.values)) * t ** 0.5 for t, s in zip(times, traj.snapshots)]
    assert np.allclose(scaled, 1.0 / math.gamma(0.5), rtol=1e-3)
    with pytest.raises(ValueError):
        solve_rl_problem(HALF, mode(grid), zero(grid), None, [0.0])
