"""Command-line driver.

Subcommands: simulate | estimate | benchmark | semisyn | hill.
Exit codes: 0 success, 2 usage error, 3 I/O error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .bench import (
    ExperimentConfig,
    estimator_cfg_from_dict,
    run_mse_benchmark,
    run_semi_synthetic,
)
from .datagen import SyntheticConfig, generate_synthetic, load_wavesurge
from .estimators import ObservationTable, estimate_nete
from .evt import ThresholdRule, adaptive_hill
from .exceptions import DataFormatError, NeteError
from .samplers import derived_rng

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NUMERICAL = 4

_METHOD_ALIASES = {
    "evt-ipw": "evt_ipw",
    "evt-dr": "evt_dr",
    "naive-ipw": "naive_ipw",
    "naive-dr": "naive_dr",
}


def _alpha_arg(text: str):
    if text == "auto":
        return "auto"
    try:
        return float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"--alpha must be 'auto' or a float, got {text!r}") from exc


def _threshold_arg(text: str):
    if text == "auto":
        return ThresholdRule()
    try:
        return ThresholdRule(fixed=float(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"--threshold must be 'auto' or a positive float, got {text!r}"
        ) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nete",
        description="Estimate treatment effects conditional on rare extreme events.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="draw a synthetic dataset and write it as CSV")
    p_sim.add_argument("--config", required=True, help="JSON file with DGP parameters")
    p_sim.add_argument("--out", required=True, help="output CSV path")
    p_sim.add_argument("--seed", type=int, default=0)

    p_est = sub.add_parser("estimate", help="run one estimator on a dataset CSV")
    p_est.add_argument("--data", required=True, help="ObservationTable CSV")
    p_est.add_argument("--method", default="evt-dr", choices=sorted(_METHOD_ALIASES))
    p_est.add_argument("--alpha", type=_alpha_arg, default="auto")
    p_est.add_argument("--threshold", type=_threshold_arg, default=ThresholdRule())
    p_est.add_argument("--seed", type=int, default=0)

    p_bench = sub.add_parser("benchmark", help="run the Monte Carlo MSE grid")
    p_bench.add_argument("--config", required=True, help="ExperimentConfig JSON file")
    p_bench.add_argument("--out", required=True, help="output prefix (writes <out>.csv and <out>.json)")
    p_bench.add_argument("--jobs", type=int, default=1)
    p_bench.add_argument("--seed", type=int, default=None, help="override the config seed")

    p_semi = sub.add_parser("semisyn", help="semi-synthetic wave/surge experiment")
    p_semi.add_argument(
        "--wavesurge",
        default=os.environ.get("NETE_WAVESURGE"),
        help="wave/surge CSV (default: $NETE_WAVESURGE)",
    )
    p_semi.add_argument("--train-size", type=int, default=1000)
    p_semi.add_argument("--seed", type=int, default=0)
    p_semi.add_argument(
        "--exponents",
        default="2,2;1,3;2.5,1;1.5,1.5",
        help="semicolon-separated alpha1,alpha2 pairs",
    )
    p_semi.add_argument("--out", default=None, help="optional output JSON path")

    p_hill = sub.add_parser("hill", help="adaptive tail-index estimate of a dataset's noise norms")
    p_hill.add_argument("--data", required=True, help="ObservationTable CSV")
    return parser


def _cmd_simulate(args) -> int:
    with open(args.config) as fh:
        raw = json.load(fh)
    n = int(raw.pop("n"))
    seed = int(raw.pop("seed", args.seed))
    dgp = SyntheticConfig(**raw)
    table, _ = generate_synthetic(dgp, n, derived_rng(seed))
    table.to_csv(args.out)
    return EXIT_OK


def _cmd_estimate(args) -> int:
    table = ObservationTable.from_csv(args.data)
    from .estimators import EstimatorConfig

    cfg = EstimatorConfig(alpha=args.alpha, threshold=args.threshold, seed=args.seed)
    est = estimate_nete(table, _METHOD_ALIASES[args.method], cfg=cfg, rng=derived_rng(args.seed))
    print(json.dumps(est.to_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_benchmark(args) -> int:
    with open(args.config) as fh:
        cfg = ExperimentConfig.from_json(fh.read())
    if args.seed is not None:
        from dataclasses import replace

        cfg = replace(cfg, seed=args.seed)
    result = run_mse_benchmark(cfg, jobs=args.jobs)
    result.to_long_csv(args.out + ".csv")
    result.to_summary_json(args.out + ".json")
    total_cells = len(result.cells)
    dead = sum(1 for c in result.cells if c.failure_count == c.repetitions)
    if total_cells and dead == total_cells:
        print("all benchmark cells failed", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_semisyn(args) -> int:
    if not args.wavesurge:
        print("no wave/surge CSV: pass --wavesurge or set NETE_WAVESURGE", file=sys.stderr)
        return EXIT_USAGE
    raw = load_wavesurge(args.wavesurge)
    pairs = []
    for chunk in args.exponents.split(";"):
        a1, a2 = (float(v) for v in chunk.split(","))
        pairs.append((a1, a2, args.train_size))
    from .datagen import SemiSynConfig

    configs = [SemiSynConfig(a1, a2, ts) for a1, a2, ts in pairs]
    rows = run_semi_synthetic(configs, raw, seed=args.seed)
    text = json.dumps(rows, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text)
    return EXIT_OK


def _cmd_hill(args) -> int:
    table = ObservationTable.from_csv(args.data)
    est = adaptive_hill(table.norms())
    print(json.dumps({"gamma_hat": est.gamma_hat, "k": est.k, "n": est.n}, sort_keys=True))
    return EXIT_OK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "estimate": _cmd_estimate,
    "benchmark": _cmd_benchmark,
    "semisyn": _cmd_semisyn,
    "hill": _cmd_hill,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (OSError, json.JSONDecodeError, DataFormatError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NeteError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
