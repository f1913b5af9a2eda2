"""Print the critical exponents and the scaling-invariant Lebesgue exponent as a markdown table."""

from __future__ import annotations

import argparse

from fracdiffusive.analysis import critical_exponents, q_scaling_inverse


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dims", type=int, nargs="+", default=[1, 2, 3])
    parser.add_argument("--alphas", type=float, nargs="+", default=[0.1, 0.3, 0.5, 0.7, 0.9])
    args = parser.parse_args()
    print("| n | alpha | p_bar | p_tilde | p_hat | p_memory | p with q_sc = 1 | chain ok |")
    print("|---|---|---|---|---|---|---|---|")
    for n in args.dims:
        for a in args.alphas:
            ce = critical_exponents(n, a)
            cells = [ce.p_bar, ce.p_tilde, ce.p_hat, ce.p_memory_crit, q_scaling_inverse(n, a)]
            ok = "yes" if not ce.ordering_violations() else "no"
            print(f"| {n} | {a:g} | " + " | ".join(f"{c:.6g}" for c in cells) + f" | {ok} |")


if __name__ == "__main__":
    main()
