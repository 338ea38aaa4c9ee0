"""Scalability benchmarking of multi-objective evolutionary algorithms on
combinatorial optimisation problems."""

from .algorithms import ALGORITHMS, AlgorithmConfig, run_algorithm
from .core import Archive, BitString, Individual, Permutation, dominates, non_dominated_filter
from .harness import ExperimentConfig, run_experiment, summarize
from .indicators import ReferencePoint, hv_contributions, hypervolume_2d, sample_reference_point
from .problems import FAMILIES, evaluate, generate_instance

__all__ = [
    "ALGORITHMS",
    "AlgorithmConfig",
    "Archive",
    "BitString",
    "ExperimentConfig",
    "FAMILIES",
    "Individual",
    "Permutation",
    "ReferencePoint",
    "dominates",
    "evaluate",
    "generate_instance",
    "hv_contributions",
    "hypervolume_2d",
    "non_dominated_filter",
    "run_algorithm",
    "run_experiment",
    "sample_reference_point",
    "summarize",
]

__version__ = "0.1.0"
