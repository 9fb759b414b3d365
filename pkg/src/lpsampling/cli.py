"""Command line entry point: ``lpsampling stats|run|sweep``.

Exit codes: 0 on success, 1 when any experiment cell had a sampler failure,
2 on configuration or load errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from .harness import (ConfigError, DatasetSpec, ExperimentConfig, best_measure_table,
                      emit_results, format_best_table, format_results_table,
                      format_stats_table, run_sweep, run_with_histograms, stats_report)


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("config", help="JSON experiment config")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--reps", type=int, help="repetitions per cell")
    p.add_argument("--sf", type=float, help="sampling fraction s_f")
    p.add_argument("--auc-n", type=int, help="comparisons per sampled AUC")
    p.add_argument("--out", help="output directory")
    p.add_argument("--format", action="append", choices=("csv", "json"),
                   help="output format (repeatable)")
    p.add_argument("--jobs", type=int, help="worker processes")
    p.add_argument("--tie-tolerance", type=float, default=0.005,
                   help="AUC slack for the best-measure table")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lpsampling",
        description="Link-prediction benchmarks under different edge-sampling methods.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    st = sub.add_parser("stats", help="|V|, |E|, <k>, C, H of each edge list's giant component")
    st.add_argument("edge_lists", nargs="+")
    st.add_argument("--comment", action="append", help="comment prefix (default: # and %%)")
    st.add_argument("--separator", help="token separator (default: whitespace)")
    st.add_argument("--one-indexed", action="store_true",
                    help="tokens are 1-based integer node ids")

    _add_run_flags(sub.add_parser("run", help="run the repeated sampling protocol"))
    _add_run_flags(sub.add_parser("sweep", help="sweep FS m or FF p_f"))
    return parser


def _config_from_args(args) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.reps is not None:
        overrides["repetitions"] = args.reps
    if args.sf is not None:
        overrides["s_f"] = args.sf
    if args.auc_n is not None:
        overrides["auc_n"] = args.auc_n
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.format:
        overrides["formats"] = tuple(dict.fromkeys(args.format))
    if args.jobs is not None:
        overrides["jobs"] = args.jobs
    return replace(cfg, **overrides) if overrides else cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    if args.command == "stats":
        comment = tuple(args.comment) if args.comment else ("#", "%")
        specs = []
        for path in args.edge_lists:
            try:
                specs.append(DatasetSpec.from_dict({"path": path, "comment": comment,
                                                    "separator": args.separator,
                                                    "one_indexed": args.one_indexed}))
            except ConfigError as exc:
                print(f"error: {exc}", file=sys.stderr)
                return 2
        rows = stats_report(specs)
        print(format_stats_table(rows))
        return 2 if any(r.error for r in rows) else 0

    try:
        cfg = _config_from_args(args)
        if args.command == "sweep":
            results, hists = run_sweep(cfg), {}
        else:
            results, hists = run_with_histograms(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    print(format_results_table(results))
    print()
    print(format_best_table(best_measure_table(results, args.tie_tolerance)))
    if cfg.out_dir:
        stem = "sweep" if args.command == "sweep" else "results"
        try:
            for path in emit_results(results, hists, cfg.formats, cfg.out_dir, cfg, stem=stem):
                print(f"wrote {path}", file=sys.stderr)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    failed = [r for r in results if r.failures]
    if failed:
        print(f"{len(failed)} result cells had sampler failures", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
