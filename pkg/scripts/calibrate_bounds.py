"""Recompute the per-branch integral-bound constants from the fixed corpus.

Prints a ``BOUND_CONSTANTS`` literal (1.2 x the largest observed ratio) to
paste into ``fracdiffusive/analysis.py``.
"""

from __future__ import annotations

import argparse

from fracdiffusive.analysis import BOUND_SEED, bound_corpus, bound_ratios


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=BOUND_SEED)
    parser.add_argument("--size", type=int, default=50)
    args = parser.parse_args()
    ratios = bound_ratios(bound_corpus(args.seed, args.size))
    print("BOUND_CONSTANTS = {")
    for key, r in ratios.items():
        print(f'    "{key}": {float(f"{1.2 * r.max():.6g}")!r},   # max ratio {r.max():.4g}, min {r.min():.3g}')
    print("}")


if __name__ == "__main__":
    main()
