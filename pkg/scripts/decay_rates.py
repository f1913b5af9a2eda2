"""Decay-rate diagnostics for the semilinear scenarios.

Runs the small-data supercritical cases and, besides the fitted sup-norm
exponent of the full solution, fits the exponent of the nonlinear Duhamel
part alone. For n = 2 it also repeats the run with zero-mass data, which
removes the leading mass term of the linear part.
"""

from __future__ import annotations

import argparse
import math

import numpy as np

from fracdiffusive.analysis import DecayScenario, decay_fit, fit_instants, theoretical_decay
from fracdiffusive.cauchy_solver import CauchyProblem, solve_semilinear
from fracdiffusive.fractional_calculus import FractionalOrder, TimeGrid
from fracdiffusive.spectral_kernels import Field, SpatialGrid, kernel_lq_norm, profile_field


def zero_mass(grid: SpatialGrid, amplitude: float) -> Field:
    # (|x|^2 - n/2) exp(-|x|^2) integrates to zero in any dimension
    r2 = sum(c ** 2 for c in grid.coords())
    return Field(grid, amplitude * (r2 - 0.5 * grid.dim) * np.exp(-r2))


def report(label: str, u0: Field, u1: Field | None, power: float, step: float, theory: float) -> None:
    times = fit_instants()
    problem = CauchyProblem(FractionalOrder(0.5), u0, u1, power=power)
    traj = solve_semilinear(problem, TimeGrid.covering(float(times.max()), step), out_times=times,
                            keep_nonlinear=True)
    if not traj.completed:
        print(f"{label}: {traj.status} at t={traj.blowup_time}")
        return
    full = decay_fit(traj.times, traj.norms(math.inf)).exponent
    nl_norms = np.array([kernel_lq_norm(f, math.inf) for f in traj.nonlinear_part])
    nl = decay_fit(traj.times, nl_norms).exponent
    print(f"{label}: full {full:+.4f}, nonlinear part {nl:+.4f} (size {nl_norms[-1]:.2e}), theory {theory:+.3f}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--amplitude", type=float, default=0.01)
    args = parser.parse_args()
    g1 = SpatialGrid(1, 1024, 200.0)
    report("n=1 p=8 gaussian u0", profile_field(g1, "gaussian", args.amplitude), None, 8.0, 0.1,
           theoretical_decay(DecayScenario(1, 0.5, math.inf, "semilinear_thm00")))
    g2 = SpatialGrid(2, 128, 60.0)
    theory = theoretical_decay(DecayScenario(2, 0.5, math.inf, "semilinear_thm10"))
    bump = profile_field(g2, "gaussian", args.amplitude)
    report("n=2 p=4 gaussian u0=u1", bump, bump, 4.0, 0.25, theory)
    zm = zero_mass(g2, args.amplitude)
    report("n=2 p=4 zero-mass u0=u1", zm, zm, 4.0, 0.25, theory)


if __name__ == "__main__":
    main()
