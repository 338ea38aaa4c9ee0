"""Variation operators for bit-string and permutation genotypes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BitString, Permutation


@dataclass
class OperatorConfig:
    """Operator rates.  ``bitflip_rate`` of None means 1/D at the point of use.

    ``permutation_mutation_semantics`` controls how the 0.05 permutation
    mutation rate is read inside the GAs: "per_offspring" applies one mutation
    move to an offspring with probability 0.05; "per_gene" applies a number of
    moves drawn as Binomial(D, 0.05).
    """

    crossover_rate: float = 1.0
    bitflip_rate: float | None = None
    permutation_mutation_rate: float = 0.05
    permutation_mutation_semantics: str = "per_offspring"

    def __post_init__(self):
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValueError("crossover_rate must be in [0, 1]")
        if not 0.0 <= self.permutation_mutation_rate <= 1.0:
            raise ValueError("permutation_mutation_rate must be in [0, 1]")
        if self.permutation_mutation_semantics not in ("per_offspring", "per_gene"):
            raise ValueError("unknown permutation_mutation_semantics")


# ---------------------------------------------------------------- bit strings

def uniform_crossover(a: BitString, b: BitString, rng: np.random.Generator):
    """Per position, swap parental alleles with probability 0.5; the two
    children are complementary at every position."""
    if a.D != b.D:
        raise ValueError("length mismatch")
    swap = rng.random(a.D) < 0.5
    c1 = np.where(swap, b.bits, a.bits)
    c2 = np.where(swap, a.bits, b.bits)
    return BitString(c1.astype(np.uint8)), BitString(c2.astype(np.uint8))


def bitflip_mutation(g: BitString, p: float, rng: np.random.Generator) -> BitString:
    """Flip each bit independently with probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be in [0, 1]")
    flips = rng.random(g.D) < p
    return BitString(np.where(flips, 1 - g.bits, g.bits).astype(np.uint8))


def k_bit_flip(g: BitString, k: int, rng: np.random.Generator) -> BitString:
    """Flip exactly k distinct uniformly chosen positions."""
    if k > g.D:
        raise ValueError("k must be <= D")
    pos = rng.choice(g.D, size=k, replace=False)
    bits = g.bits.copy()
    bits[pos] = 1 - bits[pos]
    return BitString(bits)


# --------------------------------------------------------------- permutations

@dataclass(frozen=True)
class TwoOptMove:
    """Reversal of positions i..j inclusive (i == j is the identity)."""

    i: int
    j: int


@dataclass(frozen=True)
class TwoSwapMove:
    """Exchange of the contents of positions i and j."""

    i: int
    j: int


def sample_two_opt_move(D: int, rng: np.random.Generator) -> TwoOptMove:
    if D < 3:
        raise ValueError("2-opt requires D >= 3")
    i, j = sorted(rng.choice(D, size=2, replace=False).tolist())
    return TwoOptMove(int(i), int(j))


def sample_two_swap_move(D: int, rng: np.random.Generator) -> TwoSwapMove:
    if D < 2:
        raise ValueError("2-swap requires D >= 2")
    i, j = rng.choice(D, size=2, replace=False).tolist()
    return TwoSwapMove(int(i), int(j))


def apply_move(g: Permutation, move) -> Permutation:
    order = g.order.copy()
    if isinstance(move, TwoOptMove):
        order[move.i : move.j + 1] = order[move.i : move.j + 1][::-1]
    elif isinstance(move, TwoSwapMove):
        order[move.i], order[move.j] = order[move.j], order[move.i]
    else:
        raise TypeError(f"unknown move {move!r}")
    return Permutation(order)


def two_opt_mutation(g: Permutation, rng: np.random.Generator) -> Permutation:
    return apply_move(g, sample_two_opt_move(g.D, rng))


def two_swap_mutation(g: Permutation, rng: np.random.Generator) -> Permutation:
    return apply_move(g, sample_two_swap_move(g.D, rng))


def ox(a: Permutation, b: Permutation, i: int, j: int):
    """Order crossover with the segment [i, j] fixed (classic OX).

    Each child copies one parent's segment and fills the remaining positions,
    starting after the segment, with the other parent's cities taken in
    cyclic order starting after the segment.
    """
    if a.D != b.D:
        raise ValueError("length mismatch")
    D = a.D

    def one(keep: np.ndarray, fill: np.ndarray) -> Permutation:
        child = np.empty(D, dtype=keep.dtype)
        child[i : j + 1] = keep[i : j + 1]
        in_seg = np.zeros(D, dtype=bool)
        in_seg[keep[i : j + 1]] = True
        donors = np.roll(fill, -(j + 1) % D)
        donors = donors[~in_seg[donors]]
        slots = np.roll(np.arange(D), -(j + 1) % D)[: D - (j - i + 1)]
        child[slots] = donors
        return Permutation(child)

    return one(a.order, b.order), one(b.order, a.order)


def order_crossover(a: Permutation, b: Permutation, rng: np.random.Generator):
    if a.D != b.D:
        raise ValueError("length mismatch")
    i, j = sorted(rng.choice(a.D, size=2, replace=False).tolist())
    return ox(a, b, int(i), int(j))


def cycle_crossover(a: Permutation, b: Permutation):
    """Classic CX: positions are partitioned into cycles of the mapping a->b;
    alternating cycles are copied from a and from b, so every child allele
    comes from the same position in one of the parents."""
    if a.D != b.D:
        raise ValueError("length mismatch")
    D = a.D
    pos_in_a = np.empty(D, dtype=np.int64)
    pos_in_a[a.order] = np.arange(D)
    c1 = np.empty(D, dtype=a.order.dtype)
    c2 = np.empty(D, dtype=a.order.dtype)
    visited = np.zeros(D, dtype=bool)
    from_a = True
    for start in range(D):
        if visited[start]:
            continue
        p = start
        while not visited[p]:
            visited[p] = True
            if from_a:
                c1[p], c2[p] = a.order[p], b.order[p]
            else:
                c1[p], c2[p] = b.order[p], a.order[p]
            p = int(pos_in_a[b.order[p]])
        from_a = not from_a
    return Permutation(c1), Permutation(c2)
