#!/usr/bin/env python3
"""Produce the per-stage convergence data for large arrays at desk scale.

Runs the trellis solver at N = 50, 80, 100 for one and two users and emits
``conv_N<n>_M<m>.dat`` files with the mean running-best rate per stage.
"""

import argparse
import sys

from pinchsel.cli import main


def run(trials: int, seed: int, out_root: str) -> int:
    for users in (1, 2):
        rc = main(
            [
                "convergence", "--n", "50,80,100", "--users", str(users),
                "--trials", str(trials), "--seed", str(seed),
                "--out-dir", f"{out_root}/M{users}",
            ]
        )
        if rc:
            return rc
    return 0


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=150)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--out-dir", default="runs/stage_convergence")
    args = parser.parse_args()
    sys.exit(run(args.trials, args.seed, args.out_dir))
