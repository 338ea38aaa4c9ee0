#!/usr/bin/env python3
"""Small end-to-end demonstration: a toy grid (two families, D=50, budget
10^4, 3 runs per algorithm), then summary tables and plot data.  Runs in a
couple of minutes on one core."""

import argparse

from mocoscale.harness import ExperimentConfig, export_plot_data, run_experiment, summarize


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="toy_results")
    args = parser.parse_args()

    config = ExperimentConfig(
        families=["motsp", "mokp"],
        dimensions=[50],
        budgets=[10_000],
        runs=3,
        reference_samples=1000,
        output_dir=args.out,
    )
    run_experiment(config)
    summarize(f"{args.out}/records", f"{args.out}/summary")
    export_plot_data(f"{args.out}/records", "motsp", 50, 10_000, f"{args.out}/plots")
    print(open(f"{args.out}/summary/summary.txt").read())


if __name__ == "__main__":
    main()
