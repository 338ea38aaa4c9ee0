#!/usr/bin/env python3
"""Execute the full benchmarking grid.

Four problem families x four dimensions x two budgets x five algorithms x
30 runs.  Resumable: re-invoking after an interruption skips completed runs.
The moqap 5000D / 1e7 cells are skipped unless --allow-expensive is given.
"""

import argparse

from mocoscale.harness import (
    DEFAULT_ALGORITHMS,
    DEFAULT_BUDGETS,
    DEFAULT_DIMENSIONS,
    ExperimentConfig,
    run_experiment,
    summarize,
)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results", help="output directory")
    parser.add_argument("--runs", type=int, default=30)
    parser.add_argument("--base-seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=None,
                        help="process count (default: MOCOSCALE_WORKERS or 1)")
    parser.add_argument("--allow-expensive", action="store_true")
    parser.add_argument("--families", nargs="+",
                        default=["motsp", "mokp", "monk", "moqap"])
    parser.add_argument("--dimensions", nargs="+", type=int, default=DEFAULT_DIMENSIONS)
    parser.add_argument("--budgets", nargs="+", type=int, default=DEFAULT_BUDGETS)
    args = parser.parse_args()

    config = ExperimentConfig(
        families=args.families,
        dimensions=args.dimensions,
        budgets=args.budgets,
        algorithms=list(DEFAULT_ALGORITHMS),
        runs=args.runs,
        base_seed=args.base_seed,
        output_dir=args.out,
    )
    run_experiment(config, workers=args.workers, resume=True,
                   allow_expensive=args.allow_expensive)
    summarize(f"{args.out}/records", f"{args.out}/summary")
    print(f"done; see {args.out}/summary/summary.txt")


if __name__ == "__main__":
    main()
