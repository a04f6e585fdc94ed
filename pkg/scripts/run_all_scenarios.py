"""Run every shipped scenario and drop the CSV grids under out/.

Usage: python scripts/run_all_scenarios.py [--threads N]
"""

import argparse
import os
import sys
import time

from backflow import cli

CONFIGS = ["dv_baseline", "cv_baseline", "dv_erase", "cv_erase", "cv_relay"]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--threads", type=int, default=None)
    args = ap.parse_args()

    root = os.path.join(os.path.dirname(__file__), os.pardir)
    for name in CONFIGS:
        cfg = os.path.join(root, "configs", f"{name}.yaml")
        argv = ["run", cfg]
        if args.threads is not None:
            argv += ["--threads", str(args.threads)]
        t0 = time.time()
        rc = cli.main(argv)
        print(f"{name}: rc={rc} ({time.time() - t0:.2f}s)")
        if rc != 0:
            return rc
    return 0


if __name__ == "__main__":
    sys.exit(main())
