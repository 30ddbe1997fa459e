"""Approximate-mode residuals of the 45 relations against working precision.

For each precision the script draws convergent parameter sets, evaluates every
relation, and prints the largest residual next to the requested tolerance
10^-(digits-5) together with the largest reported tail bound.
"""

import argparse
import random

import mpmath

from reflcheck.hyper import HypPoint, contiguous_residual, eval_3f2, relation_ids
from reflcheck.suites import SuiteConfig, _convergent


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--digits", type=int, nargs="*", default=[20, 40, 60])
    ap.add_argument("--samples", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cfg = SuiteConfig()
    for digits in args.digits:
        rng = random.Random(args.seed)
        worst = bound = mpmath.mpf(0)
        terms = 0
        with mpmath.workdps(digits + 15):
            for _ in range(args.samples):
                params = _convergent(rng, cfg)
                v = eval_3f2(HypPoint.of(params, "approx", digits))
                bound, terms = max(bound, v.error_bound), max(terms, v.terms)
                for i in relation_ids():
                    worst = max(worst, abs(contiguous_residual(i, HypPoint.of(params, "approx", digits))))
            tol = mpmath.mpf(10) ** -(digits - 5)
            print(
                f"digits={digits:3d}  max residual={mpmath.nstr(worst, 3):>10s}  tolerance={mpmath.nstr(tol, 1):>6s}"
                f"  max tail bound={mpmath.nstr(bound, 3):>10s}  max terms={terms}"
            )


if __name__ == "__main__":
    main()
