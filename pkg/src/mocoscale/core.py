"""Dominance relations and the unbounded bi-objective non-dominated archive.

All objective vectors are handled in a canonical minimisation orientation;
maximisation problems negate their objectives at the evaluation boundary.
"""

from __future__ import annotations

import csv
import gzip
import io
from bisect import bisect_left
from dataclasses import dataclass
from typing import Union

import numpy as np


@dataclass(frozen=True, eq=False)
class BitString:
    """Binary genotype, stored as a 0/1 uint8 array."""

    bits: np.ndarray

    @property
    def D(self) -> int:
        return int(self.bits.shape[0])

    def to_str(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)


@dataclass(frozen=True, eq=False)
class Permutation:
    """Permutation genotype: a bijection on {0..D-1}."""

    order: np.ndarray

    @property
    def D(self) -> int:
        return int(self.order.shape[0])

    def is_valid(self) -> bool:
        return bool(np.array_equal(np.sort(self.order), np.arange(self.D)))

    def to_str(self) -> str:
        return " ".join(str(int(v)) for v in self.order)


Genotype = Union[BitString, Permutation]


@dataclass(frozen=True, eq=False)
class Individual:
    genotype: Genotype
    objectives: np.ndarray


def dominates(a, b) -> bool:
    """Pareto dominance in minimisation orientation: a <= b everywhere, a != b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return bool(np.all(a <= b) and np.any(a < b))


def non_dominated_filter(vectors) -> np.ndarray:
    """Indices of vectors not dominated by any other vector, in original order.

    O(n^2) pairwise comparison, chunked so that memory stays bounded for
    inputs of 10^4+ vectors.
    """
    F = np.asarray(vectors, dtype=float)
    if F.ndim != 2 or F.shape[0] == 0:
        raise ValueError("empty set")
    n = F.shape[0]
    dominated = np.zeros(n, dtype=bool)
    chunk = 512
    for s in range(0, n, chunk):
        blk = F[s : s + chunk]
        le = (blk[:, None, :] <= F[None, :, :]).all(-1)
        lt = (blk[:, None, :] < F[None, :, :]).any(-1)
        dominated |= (le & lt).any(axis=0)
    return np.flatnonzero(~dominated)


@dataclass(frozen=True)
class InsertOutcome:
    accepted: bool
    removed: int

    def __bool__(self) -> bool:
        return self.accepted


REJECTED = InsertOutcome(False, 0)


class Archive:
    """Unbounded mutually non-dominated set for two objectives.

    Members are kept sorted ascending by the first objective, which for a
    non-dominated bi-objective set forces the second objective to be strictly
    decreasing.  Insertion is O(log n + r) where r is the number of members
    removed.  A candidate whose objective vector equals an existing member's
    is rejected (one representative per objective vector).
    """

    def __init__(self):
        self._f0: list[float] = []
        self._f1: list[float] = []
        self._members: list[Individual] = []

    def __len__(self) -> int:
        return len(self._members)

    @property
    def members(self) -> list[Individual]:
        return list(self._members)

    def member(self, i: int) -> Individual:
        return self._members[i]

    def random_member(self, rng: np.random.Generator) -> Individual:
        return self._members[int(rng.integers(len(self._members)))]

    def objectives(self) -> np.ndarray:
        if not self._members:
            return np.empty((0, 2))
        return np.column_stack([self._f0, self._f1])

    def insert(self, individual: Individual) -> InsertOutcome:
        z = np.asarray(individual.objectives, dtype=float)
        if z.shape != (2,):
            raise ValueError("archive is bi-objective; got shape %s" % (z.shape,))
        if not np.all(np.isfinite(z)):
            raise ValueError("objective values must be finite")
        x, y = float(z[0]), float(z[1])
        f0, f1 = self._f0, self._f1
        i = bisect_left(f0, x)
        # Members left of i have f0 < x; the closest one has the smallest f1
        # among them, so it alone decides weak dominance from the left.
        if i > 0 and f1[i - 1] <= y:
            return REJECTED
        if i < len(f0) and f0[i] == x and f1[i] <= y:
            return REJECTED
        j = i
        while j < len(f0) and f1[j] >= y:
            j += 1
        removed = j - i
        del f0[i:j], f1[i:j], self._members[i:j]
        f0.insert(i, x)
        f1.insert(i, y)
        self._members.insert(i, individual)
        return InsertOutcome(True, removed)

    def check_invariants(self) -> None:
        f0, f1 = self._f0, self._f1
        for k in range(1, len(f0)):
            if not (f0[k] > f0[k - 1] and f1[k] < f1[k - 1]):
                raise AssertionError("archive sort invariant violated")

    def to_csv(self, path, orientation_sign: float = 1.0, include_genotype: bool = False) -> None:
        """Snapshot as CSV in native orientation (sign -1 un-negates maximisation)."""
        def write_rows(fh):
            w = csv.writer(fh)
            header = ["f1", "f2"]
            if include_genotype:
                header.append("genotype")
            w.writerow(header)
            for ind in self._members:
                row = [repr(orientation_sign * float(v)) for v in ind.objectives]
                if include_genotype:
                    row.append(ind.genotype.to_str())
                w.writerow(row)

        if str(path).endswith(".gz"):
            # fixed mtime and no embedded name keep the bytes reproducible
            with open(path, "wb") as raw:
                gz = gzip.GzipFile(filename="", mode="wb", fileobj=raw, mtime=0)
                with io.TextIOWrapper(gz, newline="") as fh:
                    write_rows(fh)
        else:
            with open(path, "wt", newline="") as fh:
                write_rows(fh)


def load_archive_csv(path) -> np.ndarray:
    """Objective rows of an archive snapshot, in the file's native orientation."""
    opener = gzip.open if str(path).endswith(".gz") else open
    with opener(path, "rt", newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        rows = [(float(r[0]), float(r[1])) for r in reader]
    return np.asarray(rows, dtype=float).reshape(-1, 2)
