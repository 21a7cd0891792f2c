#!/usr/bin/env python3
"""Locate the definiteness boundary of each matrix family by bisection and
compare against the analytic values (5/12 for the plain quadratic energy,
1 for the scaled ones)."""

import sys

from moogvcf.lyapunov import MatrixFamily, definiteness_threshold

TARGETS = {
    MatrixFamily.AS: (0.0, 1.0, 5.0 / 12.0),
    MatrixFamily.BS: (0.5, 1.0001, 1.0),
    MatrixFamily.QS_WORST_CASE: (0.5, 1.0001, 1.0),
}


def main() -> int:
    print(f"{'family':<14} {'estimate':<22} {'target':<20} error")
    for family, (lo, hi, target) in TARGETS.items():
        est = definiteness_threshold(family, lo, hi, tol=1e-10)
        print(f"{family.value:<14} {est!r:<22} {target!r:<20} {abs(est - target):.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
