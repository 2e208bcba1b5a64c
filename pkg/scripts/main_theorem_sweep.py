"""Run the main-theorem sweep and write its report; optionally refresh the regression baseline.

    python3 scripts/main_theorem_sweep.py --out sweep.json
    python3 scripts/main_theorem_sweep.py --baseline tests/data/main_baseline.json
"""
import argparse
import json
import sys

from atomlab.cli import dumps
from atomlab.verify import run_suite


def summarize(results) -> dict:
    out = {}
    for r in results:
        if "spread" in r.detail:
            out[r.name] = {"spread": r.detail["spread"], "min_rho": r.detail["min_rho"],
                           "max_rho": r.detail["max_rho"], "n_atoms": r.samples, "seed": r.seed}
    return out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--atoms", type=int, default=50)
    ap.add_argument("--out", help="full JSON report")
    ap.add_argument("--baseline", help="write spread summary here")
    args = ap.parse_args(argv)

    results = run_suite("main", seed=args.seed, n_atoms=args.atoms)
    for r in results:
        extra = f"rho in [{r.detail['min_rho']:.4g}, {r.detail['max_rho']:.4g}]" if "min_rho" in r.detail else ""
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name} spread={r.observed:.6g} {extra}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(dumps([r.to_json() for r in results]))
    if args.baseline:
        with open(args.baseline, "w") as fh:
            json.dump(summarize(results), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0 if all(r.passed for r in results) else 1


if __name__ == "__main__":
    sys.exit(main())
