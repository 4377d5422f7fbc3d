"""Command-line front end for the benchmark runner.

Two subcommands: ``run`` executes a sweep described by a preset, a JSON
config file, command-line flags, or any combination (flags win over the
file, the file wins over the preset); ``list-experiments`` shows the
available presets.
"""

import argparse
import json
import os
import sys

from .experiments import (
    ALGORITHMS,
    PRESETS,
    ExperimentConfig,
    emit_csv,
    emit_plotdata,
    run_experiment,
    write_summary,
)


def _smnr(text):
    if text == "clean":
        return "clean"
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"smnr must be a number in dB or 'clean', got {text!r}"
        ) from None


def _trials(text):
    try:
        q_str, p_str = text.split(",")
        q, p = int(q_str), int(p_str)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"trials must be Q,P (two integers), got {text!r}"
        ) from None
    return q, p


def build_parser():
    parser = argparse.ArgumentParser(
        prog="digp",
        description="Benchmark distributed greedy pursuit over networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a benchmark sweep")
    run.add_argument("--config", help="JSON file with config fields")
    run.add_argument("--preset", choices=sorted(PRESETS),
                     help="start from a named experiment preset")
    run.add_argument("--n", type=int, help="signal dimension")
    run.add_argument("--n-nodes", "--nodes", type=int, dest="n_nodes",
                     help="number of network nodes")
    run.add_argument("--k-common", type=int, help="shared support size")
    run.add_argument("--k-private", type=int,
                     help="per-node private support size")
    run.add_argument("--signal", choices=("gaussian", "binary"),
                     help="nonzero coefficient distribution")
    run.add_argument("--smnr", type=_smnr,
                     help="signal-to-noise ratio in dB, or 'clean'")
    run.add_argument("--alphas", "--alpha", type=float, nargs="+",
                     dest="alphas", metavar="A",
                     help="measurement fractions m/n to sweep")
    run.add_argument("--topology",
                     help="e.g. ring:2, ring:0..9, rand:2, watts:3,0.3, "
                          "or several joined with '+'")
    run.add_argument("--algorithms", nargs="+", choices=ALGORITHMS,
                     metavar="ALG",
                     help=f"subset of {', '.join(ALGORITHMS)}")
    run.add_argument("--trials", type=_trials, metavar="Q,P",
                     help="sensing-matrix draws Q and signal draws P")
    run.add_argument("--q-trials", type=int, help="sensing-matrix draws")
    run.add_argument("--p-trials", type=int, help="signal draws per matrix")
    run.add_argument("--seed", type=int, help="master seed")
    run.add_argument("--out", help="output directory")
    run.add_argument("--round-cap", type=int,
                     help="maximum diffusion rounds per run")
    run.add_argument("--jobs", type=int,
                     help="parallel workers (1 = serial)")
    run.add_argument("--quiet", action="store_true",
                     help="suppress progress lines")

    sub.add_parser("list-experiments", help="show available presets")
    return parser


def _assemble_config(args):
    fields = {}
    if args.preset:
        fields.update(PRESETS[args.preset]["overrides"])
    if args.config:
        with open(args.config) as fh:
            loaded = json.load(fh)
        unknown = set(loaded) - set(ExperimentConfig.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        fields.update(loaded)
    if args.trials is not None:
        fields["q_trials"], fields["p_trials"] = args.trials
    for name in ("n", "n_nodes", "k_common", "k_private", "signal", "smnr",
                 "alphas", "topology", "algorithms", "q_trials", "p_trials",
                 "seed", "out", "round_cap", "jobs"):
        value = getattr(args, name)
        if value is not None:
            fields[name] = value
    return ExperimentConfig(**fields)


def _run(args):
    config = _assemble_config(args)
    os.makedirs(config.out, exist_ok=True)
    progress = None if args.quiet else lambda line: print(line, flush=True)

    rows = run_experiment(config, progress=progress)

    csv_path = os.path.join(config.out, "results.csv")
    emit_csv(rows, csv_path)
    emit_plotdata(rows, os.path.join(config.out, "plotdata"))
    summary_path = os.path.join(config.out, "summary.txt")
    write_summary(rows, summary_path)
    with open(os.path.join(config.out, "config.json"), "w") as fh:
        json.dump(config.to_dict(), fh, indent=2)
        fh.write("\n")

    print(f"wrote {csv_path} ({len(rows)} cells)")
    print(f"wrote {summary_path}")
    return 0


def _list_experiments():
    width = max(len(name) for name in PRESETS)
    for name in PRESETS:
        preset = PRESETS[name]
        print(f"{name:<{width}}  {preset['description']}")
        overrides = preset["overrides"]
        keys = ("algorithms", "topology", "signal", "smnr", "n_nodes")
        parts = [f"{k}={overrides[k]}" for k in keys if k in overrides]
        print(f"{'':<{width}}  defaults: {'; '.join(parts)}")
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _run(args)
        return _list_experiments()
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
