"""Nonparametric comparison pipeline: Friedman, Wilcoxon rank-sum with an
exact small-sample path, Holm step-down adjustment, and better/equal/worse
tables."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.stats import chi2, norm, rankdata


@dataclass
class SampleSet:
    algorithm: str
    problem: str
    dimension: int
    budget: int
    hv_values: np.ndarray

    def __post_init__(self):
        self.hv_values = np.asarray(self.hv_values, dtype=float)
        if self.hv_values.size < 2:
            raise ValueError("need at least 2 runs")
        if not np.all(np.isfinite(self.hv_values)):
            raise ValueError("hv values must be finite")


@dataclass
class ComparisonCell:
    better: int
    equal: int
    worse: int

    def __str__(self):
        return f"{self.better}/{self.equal}/{self.worse}"


def friedman_test(groups) -> tuple[float, float]:
    """Friedman rank-sum test over k groups aligned by run index.

    Q = 12n / (k(k+1)) * sum_j (Rbar_j - (k+1)/2)^2, with average ranks on
    ties; the p-value is the chi-square(k-1) upper tail.
    """
    data = np.asarray([np.asarray(g, dtype=float) for g in groups])
    k, n = data.shape
    if k < 2:
        raise ValueError("need at least 2 groups")
    if n < 2:
        raise ValueError("need at least 2 runs per group")
    ranks = np.apply_along_axis(rankdata, 0, data)  # rank within each block
    rbar = ranks.mean(axis=1)
    q = 12.0 * n / (k * (k + 1)) * np.sum((rbar - (k + 1) / 2.0) ** 2)
    return float(q), float(chi2.sf(q, k - 1))


@lru_cache(maxsize=None)
def _u_counts(n1: int, n2: int) -> tuple[int, ...]:
    """Number of rank assignments giving each U value, for tie-free samples."""
    counts = np.zeros(n1 * n2 + 1, dtype=object)
    counts[0] = 1
    # c(u; n1, n2) = c(u - n2; n1 - 1, n2) + c(u; n1, n2 - 1)
    if n1 == 0 or n2 == 0:
        return tuple(counts)
    a = np.array(_u_counts(n1 - 1, n2), dtype=object)
    b = np.array(_u_counts(n1, n2 - 1), dtype=object)
    counts = np.zeros(n1 * n2 + 1, dtype=object)
    counts[n2:][: a.size] += a
    counts[: b.size] += b
    return tuple(counts)


def wilcoxon_rank_sum(a, b) -> tuple[float, float]:
    """Two-sided Wilcoxon rank-sum (Mann-Whitney) test.

    Exact p by enumeration when n1 + n2 <= 20 and there are no ties;
    otherwise a normal approximation with tie-corrected variance and
    continuity correction.  Returns (U, p).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n1, n2 = a.size, b.size
    if n1 < 2 or n2 < 2:
        raise ValueError("samples must have at least 2 observations")
    combined = np.concatenate([a, b])
    ranks = rankdata(combined)
    r1 = ranks[:n1].sum()
    u1 = r1 - n1 * (n1 + 1) / 2.0
    u2 = n1 * n2 - u1
    u = min(u1, u2)
    has_ties = np.unique(combined).size < n1 + n2

    if n1 + n2 <= 20 and not has_ties:
        counts = _u_counts(n1, n2)
        total = sum(counts)
        tail = sum(counts[: int(u) + 1])
        p = min(1.0, 2.0 * tail / total)
        return float(u), float(p)

    mu = n1 * n2 / 2.0
    n = n1 + n2
    _, t = np.unique(combined, return_counts=True)
    tie_term = ((t**3 - t).sum()) / (n * (n - 1))
    var = n1 * n2 / 12.0 * ((n + 1) - tie_term)
    if var <= 0:
        return float(u), 1.0
    z = (abs(u1 - mu) - 0.5) / np.sqrt(var)
    z = max(z, 0.0)
    return float(u), float(min(1.0, 2.0 * norm.sf(z)))


def holm_adjust(p) -> np.ndarray:
    """Holm step-down adjustment, returned in the input order."""
    p = np.asarray(p, dtype=float)
    if np.any((p < 0) | (p > 1)):
        raise ValueError("p-values must be in [0, 1]")
    m = p.size
    order = np.argsort(p, kind="stable")
    adjusted = np.empty(m)
    running = 0.0
    for rank, i in enumerate(order):
        running = max(running, min(1.0, (m - rank) * p[i]))
        adjusted[i] = running
    return adjusted


def comparison_table(samples: list[SampleSet], alpha: float = 0.05, adjusted_p=None) -> list[ComparisonCell]:
    """Better/equal/worse counts for each sample set against all others.

    Pairwise Wilcoxon p-values are Holm-adjusted over the k(k-1)/2 pairs of
    the setting (pass ``adjusted_p`` to reuse an externally adjusted family).
    "Better" requires significance at alpha and a higher mean HV.
    """
    k = len(samples)
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    if adjusted_p is None:
        raw = [wilcoxon_rank_sum(samples[i].hv_values, samples[j].hv_values)[1] for i, j in pairs]
        adjusted_p = holm_adjust(raw) if pairs else []
    means = [s.hv_values.mean() for s in samples]
    cells = [ComparisonCell(0, 0, 0) for _ in samples]
    for (i, j), padj in zip(pairs, adjusted_p):
        if padj >= alpha:
            cells[i].equal += 1
            cells[j].equal += 1
        elif means[i] > means[j]:
            cells[i].better += 1
            cells[j].worse += 1
        else:
            cells[j].better += 1
            cells[i].worse += 1
    return cells


def comparison_pairs(samples: list[SampleSet]) -> tuple[list[tuple[int, int]], list[float]]:
    """Raw Wilcoxon p-values for all ordered pairs (i < j) in a setting."""
    k = len(samples)
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    raw = [wilcoxon_rank_sum(samples[i].hv_values, samples[j].hv_values)[1] for i, j in pairs]
    return pairs, raw
