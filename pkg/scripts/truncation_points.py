"""Where the ladder coefficients vanish on terminating families.

Family members are F(u) = 3F2(a+u, a-u, x; d, e; 1) with u = a + m.  The
lowering coefficient carries the factors (a-u), (a-d+u), (a-e+u) and the
raising one (a+u), (a-d-u), (a-e-u).  For each sampled triple this reports
the members at which a factor vanishes and confirms that the corresponding
bracket annihilates F(u) there.
"""

import argparse
import random
from fractions import Fraction

from reflcheck.hyper import LadderFamily, ladder_coefficient, ladder_residual
from reflcheck.scalar import format_rational
from reflcheck.suites import sample_rational


def vanishing_members(a, d, e, count):
    hits = []
    for m in range(count):
        u = a + m
        for which in ("down-minus", "up-minus"):
            if ladder_coefficient(which, a, d, e)({"u": u}) == 0:
                hits.append((m, which))
    return hits


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--triples", type=int, default=4)
    ap.add_argument("--count", type=int, default=6)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    triples = [(Fraction(1, 3), Fraction(1, 3) * 2 + 2, Fraction(7, 2))]
    while len(triples) < args.triples:
        a = sample_rational(rng, 6, nonint=True)
        if a.denominator == 2:
            continue
        # put d - a or e - a on the progression in half of the draws
        d = 2 * a + rng.randint(1, args.count - 1) if rng.random() < 0.5 else sample_rational(rng, 6, nonint=True)
        triples.append((a, d, sample_rational(rng, 6, nonint=True)))

    for a, d, e in triples:
        fam = LadderFamily(a, d, e, -2, 3, count=args.count + 1)
        print(f"a={format_rational(a)} d={format_rational(d)} e={format_rational(e)}")
        for m, which in vanishing_members(a, d, e, args.count):
            lhs = [ladder_residual(which, fam, a + m, x) for x in range(-1, 3)]
            status = "annihilates" if all(v == 0 for v in lhs) else "DOES NOT annihilate"
            print(f"  u = a + {m}: {which} coefficient vanishes, bracket {status} F(u)")


if __name__ == "__main__":
    main()
