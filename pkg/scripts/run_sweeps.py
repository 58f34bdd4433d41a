"""Run every experiment at its default grid through the CLI entry point.

    python scripts/run_sweeps.py --out-dir results --seed 0 --jobs 4

Each experiment writes into ``<out-dir>/<experiment>``. The exit code is the
largest one returned by the individual runs.
"""
import argparse
import os

from spectral_perturb.cli import main

EXPERIMENTS = ["scaling", "first-order", "sbm-phase", "mc-entrywise", "certificates", "verify"]


def run(out_dir, seed, jobs, only=None):
    worst = 0
    for name in only or EXPERIMENTS:
        argv = [name, "--seed", str(seed), "--out-dir", os.path.join(out_dir, name)]
        if name != "verify":
            argv += ["--jobs", str(jobs)]
        print(f"== {name}")
        worst = max(worst, main(argv))
    return worst


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="results")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--only", nargs="*", choices=EXPERIMENTS)
    args = ap.parse_args()
    raise SystemExit(run(args.out_dir, args.seed, args.jobs, args.only))
