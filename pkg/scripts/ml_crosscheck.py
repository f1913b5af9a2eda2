"""Compare the Mittag-Leffler evaluators against an mpmath series reference.

For each ``rho`` and ``beta`` prints the largest relative error of the
dispatcher, the power series and the asymptotic decomposition over a grid of
``z`` (argument ``-z^(1/rho)``). Needs ``mpmath`` (``pip install .[test]``).
"""

from __future__ import annotations

import argparse
import math

import mpmath
import numpy as np

from fracdiffusive.errors import CancellationLoss
from fracdiffusive.special_functions import MLQuery, eval_ml, eval_ml_asymptotic, eval_ml_series


def reference(a: float, beta: float, x: float) -> float:
    """``E_{a,beta}(-x)`` by direct summation with enough digits to absorb cancellation."""
    dps = 30 + int(x ** (1.0 / a) / 2)
    with mpmath.workdps(dps):
        a_mp, b_mp, z = mpmath.mpf(a), mpmath.mpf(beta), -mpmath.mpf(x)
        total, k, small = mpmath.mpf(0), 0, 0
        while small < 3:
            term = z ** k * mpmath.rgamma(a_mp * k + b_mp)
            total += term
            tiny = abs(term) < mpmath.mpf(10) ** (5 - dps) * max(abs(total), mpmath.mpf(10) ** -300)
            small = small + 1 if k > 5 and tiny else 0
            k += 1
        return float(total)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rhos", type=float, nargs="+", default=[0.55, 0.7, 0.85])
    parser.add_argument("--z-max", type=float, default=30.0)
    parser.add_argument("--points", type=int, default=25)
    args = parser.parse_args()
    zs = np.geomspace(0.5, args.z_max, args.points)
    print(f"{'rho':>5} {'beta':>6} {'dispatcher':>11} {'series':>11} {'asymptotic':>11}")
    for rho in args.rhos:
        a = 1.0 / rho
        for beta in (1.0, a, 2.0):
            worst = {"dispatcher": 0.0, "series": 0.0, "asymptotic": 0.0}
            for z in zs:
                x = z ** a
                ref = reference(a, beta, x)
                scale = abs(ref) + 1e-300
                worst["dispatcher"] = max(worst["dispatcher"], abs(eval_ml(a, beta, x) - ref) / scale)
                worst["asymptotic"] = max(worst["asymptotic"],
                                          abs(eval_ml_asymptotic(MLQuery(a, beta, x)).total - ref) / scale)
                try:
                    worst["series"] = max(worst["series"], abs(eval_ml_series(a, beta, -x) - ref) / scale)
                except CancellationLoss:
                    worst["series"] = math.nan if worst["series"] == 0 else worst["series"]
            print(f"{rho:5.2f} {beta:6.3f} " + " ".join(f"{v:11.2e}" for v in worst.values()))
    print("series: cancellation costs log10(max term / |E|) digits; the guard refuses only once all are gone")


if __name__ == "__main__":
    main()
