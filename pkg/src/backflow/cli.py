"""Command-line scenario runner.

`backflow run <config.yaml>` simulates the configured trajectory pair and
writes the analysis grids as CSV files plus a JSON manifest of the fully
resolved configuration. `backflow validate <config.yaml>` only checks the
config. Exit codes: 0 success, 1 bad config, 2 numerical failure.

Output CSVs (floats printed with 17 significant digits, so re-runs are
byte-identical):

    lhs_grid.csv            s,t,lhs
    rhs_terms.csv           s,k,env_term,corr1,corr2,sum
    revivals.csv            s,any_revival,max_revival,first_t
    steady_trace.csv        n,f_system,f_incoming
    info_decomposition.csv  t,i_tot,i_int,i_ext   (dv full-history runs only)
    run_manifest.json
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .config import ConfigError, load_config
from .linalg import NumericalFailure
from .precursors import analyze, simulate_pair

THREADS_ENV = "BACKFLOW_THREADS"


def _fmt(value):
    return "%.17g" % value


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _default_threads():
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError:
        return 1
    return max(value, 1)


def _write_outputs(out_dir, config, report):
    os.makedirs(out_dir, exist_ok=True)
    written = []

    n = report.lhs.shape[0]
    rows = (
        [str(s), str(t), _fmt(report.lhs[s, t])]
        for s in range(n)
        for t in range(s + 1, n)
    )
    _write_csv(os.path.join(out_dir, "lhs_grid.csv"), ["s", "t", "lhs"], rows)
    written.append("lhs_grid.csv")

    rows = (
        [
            str(s),
            str(k),
            _fmt(report.rhs_env[s, j]),
            _fmt(report.rhs_corr1[s, j]),
            _fmt(report.rhs_corr2[s, j]),
            _fmt(report.rhs_env[s, j] + report.rhs_corr1[s, j] + report.rhs_corr2[s, j]),
        ]
        for s in range(n)
        for j, k in enumerate(report.levels)
    )
    _write_csv(
        os.path.join(out_dir, "rhs_terms.csv"),
        ["s", "k", "env_term", "corr1", "corr2", "sum"],
        rows,
    )
    written.append("rhs_terms.csv")

    rows = (
        [str(s), str(int(any_rev)), _fmt(max_rev), str(first_t)]
        for s, any_rev, max_rev, first_t in report.revival_summary
    )
    _write_csv(
        os.path.join(out_dir, "revivals.csv"),
        ["s", "any_revival", "max_revival", "first_t"],
        rows,
    )
    written.append("revivals.csv")

    rows = (
        [str(i), _fmt(report.f_system[i]), _fmt(report.f_incoming[i])]
        for i in range(n)
    )
    _write_csv(
        os.path.join(out_dir, "steady_trace.csv"),
        ["n", "f_system", "f_incoming"],
        rows,
    )
    written.append("steady_trace.csv")

    if report.info is not None:
        info = report.info
        rows = (
            [str(t), _fmt(info.i_tot[t]), _fmt(info.i_int[t]), _fmt(info.i_ext[t])]
            for t in range(n)
        )
        _write_csv(
            os.path.join(out_dir, "info_decomposition.csv"),
            ["t", "i_tot", "i_int", "i_ext"],
            rows,
        )
        written.append("info_decomposition.csv")

    manifest = {
        "config": config.resolved(),
        "bound_mode": report.bound_mode,
        "outputs": sorted(written),
    }
    with open(os.path.join(out_dir, "run_manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_run(args):
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    if args.output_dir is not None:
        config.output_dir = args.output_dir
    try:
        traj = simulate_pair(config, threads=args.threads)
        report = analyze(
            traj,
            levels=config.resolved_levels(),
            revival_eps=config.revival_eps,
            metric=config.metric,
            threads=args.threads,
        )
    except (NumericalFailure, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    try:
        _write_outputs(config.output_dir, config, report)
    except OSError as exc:
        print(f"cannot write outputs: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {config.output_dir}")
    return 0


def cmd_validate(args):
    try:
        load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    print("config ok")
    return 0


def build_parser():
    # --threads is accepted both before and after the subcommand; SUPPRESS
    # keeps an unused position from clobbering the other one's value
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--threads",
        type=int,
        default=argparse.SUPPRESS,
        help=f"worker threads for grid evaluation (default: ${THREADS_ENV} or 1)",
    )
    parser = argparse.ArgumentParser(
        prog="backflow",
        description="Collision-model distinguishability revivals and their precursors.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser(
        "run", help="simulate a scenario and write CSV reports", parents=[common]
    )
    p_run.add_argument("config", help="path to a scenario YAML file")
    p_run.add_argument("--output-dir", default=None, help="override config output_dir")
    p_run.set_defaults(func=cmd_run)
    p_val = sub.add_parser(
        "validate", help="check a scenario file without running it", parents=[common]
    )
    p_val.add_argument("config", help="path to a scenario YAML file")
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if not hasattr(args, "threads"):
        args.threads = _default_threads()
    if args.threads < 1:
        print("config error: --threads must be >= 1", file=sys.stderr)
        return 1
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
