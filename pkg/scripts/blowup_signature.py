"""Subcritical (p = 2 on the line) signature scan.

For each bump amplitude, solves to the largest horizon and prints the
weighted norm ``x_norm(thm00)`` restricted to each horizon, together with the
per-instant weighted values at the horizons, so that the location of the
supremum is visible.
"""

from __future__ import annotations

import argparse
from dataclasses import replace

import numpy as np

from fracdiffusive.analysis import x_norm
from fracdiffusive.cauchy_solver import CauchyProblem, solve_semilinear
from fracdiffusive.fractional_calculus import FractionalOrder, TimeGrid
from fracdiffusive.spectral_kernels import SpatialGrid, profile_field


def prefix(traj, horizon: float):
    keep = traj.times <= horizon + 1e-9
    return replace(traj, times=traj.times[keep], snapshots=[s for s, k in zip(traj.snapshots, keep) if k])


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--amplitudes", type=float, nargs="+", default=[0.05, 0.1, 0.2])
    parser.add_argument("--width", type=float, default=2.0)
    parser.add_argument("--horizons", type=float, nargs="+", default=[10.0, 20.0, 40.0])
    parser.add_argument("--step", type=float, default=0.1)
    args = parser.parse_args()
    grid = SpatialGrid(1, 512, 100.0)
    t_end = max(args.horizons)
    out_times = np.arange(0.0, t_end + 1e-9, 0.5)
    for amp in args.amplitudes:
        u0 = profile_field(grid, "bump", amplitude=amp, width=args.width)
        traj = solve_semilinear(CauchyProblem(FractionalOrder(0.5), u0, power=2.0),
                                TimeGrid.covering(t_end, args.step), out_times=out_times)
        sups = [x_norm(prefix(traj, h), "thm00", 2.0) for h in args.horizons if h <= traj.times[-1] + 1e-9]
        points = [x_norm(replace(traj, times=traj.times[i:i + 1], snapshots=traj.snapshots[i:i + 1]), "thm00", 2.0)
                  for i in [0] + [int(np.argmin(abs(traj.times - h))) for h in args.horizons]]
        print(f"A={amp:g}: {traj.status}"
              + (f" at t={traj.blowup_time:.3f}" if traj.blowup_time is not None else "")
              + f"; sup over horizons {', '.join(f'{v:.4g}' for v in sups)}"
              + f"; pointwise at t=0 and horizons {', '.join(f'{v:.4g}' for v in points)}")


if __name__ == "__main__":
    main()
