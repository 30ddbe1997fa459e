"""Wall-clock time and pass count for every verification suite."""

import argparse
import json
import time

from reflcheck.suites import SUITES, SuiteConfig, run_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--suites", nargs="*", default=list(SUITES))
    ap.add_argument("--json", help="write the timings here")
    args = ap.parse_args()

    cfg = SuiteConfig(seed=args.seed, jobs=args.jobs)
    rows = []
    for name in args.suites:
        t0 = time.perf_counter()
        rep = run_suite(name, cfg)
        dt = time.perf_counter() - t0
        n_pass = sum(c.passed for c in rep.cases)
        rows.append({"suite": name, "cases": len(rep.cases), "passed": n_pass, "seconds": round(dt, 2)})
        print(f"{name:14s} {n_pass:5d}/{len(rep.cases):<5d} {dt:7.2f} s")
    total = sum(r["seconds"] for r in rows)
    print(f"{'total':14s} {'':11s} {total:7.2f} s")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"seed": args.seed, "jobs": args.jobs, "rows": rows}, fh, indent=2)


if __name__ == "__main__":
    main()
