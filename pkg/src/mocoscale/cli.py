"""Command line interface: instance generation, experiment execution,
hypervolume measurement, reference points, summaries, and plot data."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import harness, indicators, problems
from .core import load_archive_csv


def _cmd_gen(args) -> int:
    instance = problems.generate_instance(args.family, args.dim, args.objectives, args.seed)
    problems.save_instance(instance, args.out, embed_data=args.embed_data)
    print(f"wrote {problems.instance_id(instance)} to {args.out}")
    return 0


def _cmd_run(args) -> int:
    config = harness.ExperimentConfig.from_json(args.config)
    files = harness.run_experiment(
        config, workers=args.workers, resume=args.resume, allow_expensive=args.allow_expensive
    )
    for f in files:
        print(f)
    return 0


def _cmd_hv(args) -> int:
    ref = indicators.load_reference_point(args.ref)
    native = load_archive_csv(args.archive)
    canonical = native * ref.signs[None, :]
    print(repr(indicators.hypervolume_2d(canonical, ref)))
    return 0


def _cmd_refpoint(args) -> int:
    instance = problems.load_instance(args.instance)
    ref = indicators.sample_reference_point(instance, args.samples, args.seed)
    indicators.save_reference_point(ref, args.out)
    print(f"reference point {np.asarray(ref.values)} -> {args.out}")
    return 0


def _cmd_summarize(args) -> int:
    harness.summarize(args.records, args.out, alpha=args.alpha, holm_scope=args.holm_scope)
    print(f"summary written to {args.out}")
    return 0


def _cmd_plot_data(args) -> int:
    out = harness.export_plot_data(args.records, args.family, args.dim, args.budget, args.out)
    print(f"plot data written to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mocoscale")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a problem instance")
    p.add_argument("--family", required=True, choices=problems.FAMILIES)
    p.add_argument("--dim", required=True, type=int)
    p.add_argument("--objectives", type=int, default=2)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--embed-data", action="store_true")
    p.set_defaults(fn=_cmd_gen)

    p = sub.add_parser("run", help="execute an experiment grid")
    p.add_argument("--config", required=True)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--resume", action="store_true")
    p.add_argument("--allow-expensive", action="store_true")
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("hv", help="hypervolume of an archive snapshot")
    p.add_argument("--archive", required=True)
    p.add_argument("--ref", required=True)
    p.set_defaults(fn=_cmd_hv)

    p = sub.add_parser("refpoint", help="sample a reference point for an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--samples", required=True, type=int)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_refpoint)

    p = sub.add_parser("summarize", help="mean/SD and better-equal-worse tables")
    p.add_argument("--records", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--holm-scope", choices=["setting", "global"], default="setting")
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(fn=_cmd_summarize)

    p = sub.add_parser("plot-data", help="scatter and trajectory CSVs for one setting")
    p.add_argument("--records", required=True)
    p.add_argument("--family", required=True, choices=problems.FAMILIES)
    p.add_argument("--dim", required=True, type=int)
    p.add_argument("--budget", required=True, type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_plot_data)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
