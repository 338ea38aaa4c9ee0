"""Experiment orchestration: the (family, dimension, algorithm, budget, run)
grid, JSON-lines persistence with skip-and-resume, summary tables, and plot
data export."""

from __future__ import annotations

import csv
import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import indicators, problems, stats
from .algorithms import AlgorithmConfig, run_algorithm
from .core import load_archive_csv

DEFAULT_DIMENSIONS = [100, 500, 1000, 5000]
DEFAULT_BUDGETS = [10**5, 10**7]
DEFAULT_ALGORITHMS = ["semo", "semox", "nsga2", "smsemoa", "moead"]


@dataclass
class ExperimentConfig:
    families: list[str]
    dimensions: list[int] = field(default_factory=lambda: list(DEFAULT_DIMENSIONS))
    objectives: int = 2
    budgets: list[int] = field(default_factory=lambda: list(DEFAULT_BUDGETS))
    algorithms: list[str] = field(default_factory=lambda: list(DEFAULT_ALGORITHMS))
    runs: int = 30
    base_seed: int = 0
    reference_samples: int = 10**4
    output_dir: str = "results"

    def __post_init__(self):
        if not (self.families and self.dimensions and self.budgets and self.algorithms):
            raise ValueError("families, dimensions, budgets and algorithms must be non-empty")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        for f in self.families:
            if f not in problems.FAMILIES:
                raise ValueError(f"unknown family {f!r}")

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls(**json.load(fh))

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(asdict(self), fh, indent=2, sort_keys=True)

    def fingerprint(self) -> str:
        doc = json.dumps(asdict(self), sort_keys=True)
        return hashlib.blake2b(doc.encode(), digest_size=8).hexdigest()


@dataclass
class RunRecord:
    family: str
    dim: int
    objectives: int
    algorithm: str
    budget: int
    run_index: int
    instance_seed: int
    run_seed: int
    final_hv: float
    archive_size: int
    trajectory: list
    archive_path: str
    runtime_seconds: float
    config_fingerprint: str

    def key(self):
        return (self.family, self.dim, self.algorithm, self.budget, self.run_index)


def derive_seed(base_seed: int, *parts) -> int:
    """64-bit seed from a labelled grid position; injective by construction
    as long as the labels are colon-free."""
    key = ":".join([str(base_seed)] + [str(p) for p in parts]).encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "big")


def _atomic_write(path: Path, write_fn) -> None:
    # the temp name keeps the final suffix so writers that key on it
    # (e.g. gzip for .gz) behave identically
    tmp = path.with_name("tmp__" + path.name)
    write_fn(tmp)
    os.replace(tmp, path)


@lru_cache(maxsize=8)
def _cached_instance(family, D, m, seed):
    return problems.generate_instance(family, D, m, seed)


def _execute_cell(args) -> dict:
    (family, D, m, instance_seed, algorithm, budget, run_index,
     run_seed, ref_values, ref_signs, archive_path, fingerprint) = args
    instance = _cached_instance(family, D, m, instance_seed)
    ref = indicators.ReferencePoint(
        values=np.asarray(ref_values), signs=np.asarray(ref_signs), provenance={"kind": "sampled"}
    )
    config = AlgorithmConfig(kind=algorithm, budget=budget, seed=run_seed)
    start = time.perf_counter()
    result = run_algorithm(instance, config, ref=ref)
    runtime = time.perf_counter() - start
    sign = problems.orientation_sign(instance)
    _atomic_write(Path(archive_path), lambda p: result.archive.to_csv(p, orientation_sign=sign, include_genotype=False))
    final_hv = result.trajectory[-1][1] if result.trajectory else 0.0
    return asdict(RunRecord(
        family=family, dim=D, objectives=m, algorithm=algorithm, budget=budget,
        run_index=run_index, instance_seed=instance_seed, run_seed=run_seed,
        final_hv=final_hv, archive_size=len(result.archive),
        trajectory=[[c, hv] for c, hv in result.trajectory],
        archive_path=archive_path, runtime_seconds=runtime,
        config_fingerprint=fingerprint,
    ))


def _is_expensive(family, D, budget) -> bool:
    return family == "moqap" and D >= 5000 and budget >= 10**7


def run_experiment(config: ExperimentConfig, workers: int | None = None,
                   resume: bool = True, allow_expensive: bool = False) -> list[Path]:
    """Execute the grid, persisting one JSON-lines record file per
    (family, dimension).  Existing records are skipped, so a completed grid
    reruns with zero new computation."""
    out = Path(config.output_dir)
    for sub in ("instances", "refpoints", "records", "archives"):
        (out / sub).mkdir(parents=True, exist_ok=True)
    if workers is None:
        workers = int(os.environ.get("MOCOSCALE_WORKERS", "1"))
    fingerprint = config.fingerprint()
    record_files = []

    for family in config.families:
        for D in config.dimensions:
            instance_seed = derive_seed(config.base_seed, family, D, "instance")
            instance = _cached_instance(family, D, config.objectives, instance_seed)
            inst_path = out / "instances" / f"{family}_{D}.json"
            if not inst_path.exists():
                _atomic_write(inst_path, lambda p: problems.save_instance(instance, p))

            ref_path = out / "refpoints" / f"{family}_{D}.json"
            if ref_path.exists():
                ref = indicators.load_reference_point(ref_path)
            else:
                ref_seed = derive_seed(config.base_seed, family, D, "refpoint")
                ref = indicators.sample_reference_point(instance, config.reference_samples, ref_seed)
                _atomic_write(ref_path, lambda p: indicators.save_reference_point(ref, p))

            rec_path = out / "records" / f"{family}_{D}.jsonl"
            record_files.append(rec_path)
            done = set()
            if resume and rec_path.exists():
                with open(rec_path) as fh:
                    for line in fh:
                        r = json.loads(line)
                        done.add((r["algorithm"], r["budget"], r["run_index"]))

            arch_dir = out / "archives" / f"{family}_{D}"
            arch_dir.mkdir(exist_ok=True)
            cells = []
            for algorithm in config.algorithms:
                for budget in config.budgets:
                    if _is_expensive(family, D, budget) and not allow_expensive:
                        continue
                    for r in range(config.runs):
                        if (algorithm, budget, r) in done:
                            continue
                        run_seed = derive_seed(config.base_seed, family, D, algorithm, budget, r)
                        archive_path = str(arch_dir / f"{algorithm}_{budget}_r{r}.csv.gz")
                        cells.append((family, D, config.objectives, instance_seed, algorithm,
                                      budget, r, run_seed, [float(v) for v in ref.values],
                                      [float(s) for s in ref.signs], archive_path, fingerprint))
            if not cells:
                continue
            if workers > 1:
                with ProcessPoolExecutor(max_workers=workers) as pool:
                    results = list(pool.map(_execute_cell, cells))
            else:
                results = []
                for cell in cells:
                    try:
                        results.append(_execute_cell(cell))
                    except Exception as exc:  # isolate per-run failures
                        print(f"run failed ({cell[4]} budget={cell[5]} r={cell[6]}): {exc}")
            with open(rec_path, "a") as fh:
                for rec in results:
                    fh.write(json.dumps(rec, sort_keys=True) + "\n")
    return record_files


def load_records(records_dir) -> list[dict]:
    records = []
    for path in sorted(Path(records_dir).glob("*.jsonl")):
        with open(path) as fh:
            records.extend(json.loads(line) for line in fh)
    return records


def _group_records(records):
    settings: dict[tuple, dict[str, list]] = {}
    for r in records:
        settings.setdefault((r["family"], r["dim"], r["budget"]), {}).setdefault(r["algorithm"], []).append(r)
    return settings


def summarize(records_dir, out_dir, alpha: float = 0.05, holm_scope: str = "setting"):
    """Per-setting mean/SD of final HV plus better/equal/worse counts.

    ``holm_scope`` is "setting" (Holm family = the pairs of one setting) or
    "global" (one family across every setting).
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    settings = _group_records(load_records(records_dir))

    sample_sets: dict[tuple, list[stats.SampleSet]] = {}
    for key in sorted(settings):
        family, dim, budget = key
        groups = []
        for alg in sorted(settings[key]):
            hv = np.array([r["final_hv"] for r in settings[key][alg]])
            if hv.size < 2:
                print(f"warning: dropping {alg} in {key}: fewer than 2 runs")
                continue
            groups.append(stats.SampleSet(alg, family, dim, budget, hv))
        sample_sets[key] = groups

    all_pairs, all_raw = {}, []
    for key, groups in sample_sets.items():
        pairs, raw = stats.comparison_pairs(groups)
        all_pairs[key] = (pairs, raw, len(all_raw))
        all_raw.extend(raw)
    global_adjusted = stats.holm_adjust(all_raw) if (holm_scope == "global" and all_raw) else None

    rows = []
    text_lines = []
    for key, groups in sample_sets.items():
        family, dim, budget = key
        pairs, raw, offset = all_pairs[key]
        if holm_scope == "global":
            adjusted = global_adjusted[offset : offset + len(raw)]
        else:
            adjusted = stats.holm_adjust(raw) if raw else []
        cells = stats.comparison_table(groups, alpha=alpha, adjusted_p=adjusted)
        text_lines.append(f"{family} {dim}D, budget {budget}")
        for s, cell in zip(groups, cells):
            mean, sd = s.hv_values.mean(), s.hv_values.std(ddof=1)
            rows.append([family, dim, budget, s.algorithm, repr(mean), repr(sd),
                         cell.better, cell.equal, cell.worse])
            text_lines.append(f"  {s.algorithm:<10} {mean:.3e} ({sd:.2e})   {cell}")
        text_lines.append("")

    with open(out / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["family", "dim", "budget", "algorithm", "mean_hv", "sd_hv", "better", "equal", "worse"])
        w.writerows(rows)
    (out / "summary.txt").write_text("\n".join(text_lines))
    return rows


def export_plot_data(records_dir, family: str, dim: int, budget: int, out_dir):
    """Per-run archive scatter CSVs (native orientation), an aligned
    trajectory CSV with mean and SD bands, and the representative run (final
    HV closest to the mean) per algorithm."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = [r for r in load_records(records_dir)
               if r["family"] == family and r["dim"] == dim and r["budget"] == budget]
    if not records:
        raise ValueError(f"no records for {family} {dim}D budget {budget}")

    by_alg: dict[str, list[dict]] = {}
    for r in records:
        by_alg.setdefault(r["algorithm"], []).append(r)

    representative = {}
    for alg, recs in sorted(by_alg.items()):
        finals = np.array([r["final_hv"] for r in recs])
        rep = recs[int(np.argmin(np.abs(finals - finals.mean())))]
        representative[alg] = rep["run_index"]
        for r in recs:
            points = load_archive_csv(r["archive_path"])
            with open(out / f"scatter_{alg}_r{r['run_index']}.csv", "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["f1", "f2"])
                w.writerows(points.tolist())

    grid = [c for c, _ in by_alg[next(iter(by_alg))][0]["trajectory"]]
    header = ["eval_count"]
    cols = [grid]
    for alg, recs in sorted(by_alg.items()):
        hv = np.array([[p[1] for p in r["trajectory"]] for r in recs])
        header += [f"{alg}_mean", f"{alg}_sd"]
        cols.append(hv.mean(axis=0))
        cols.append(hv.std(axis=0, ddof=1) if hv.shape[0] > 1 else np.zeros(hv.shape[1]))
    with open(out / "trajectories.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(zip(*cols))

    with open(out / "representative_runs.json", "w") as fh:
        json.dump(representative, fh, sort_keys=True)
    return out
