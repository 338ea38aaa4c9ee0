"""The five optimizers (SEMO, SEMOx, NSGA-II, SMS-EMOA, MOEA/D).

Every algorithm routes each objective-function evaluation through a shared
recorder that enforces the evaluation budget, feeds the external unbounded
archive, and logs the archive hypervolume at geometrically spaced
checkpoints.  Comparisons between algorithms are made on the archives, not
the internal populations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Archive, BitString, Individual, Permutation
from .indicators import ReferencePoint, hv_contributions, hypervolume_2d
from .operators import (
    OperatorConfig,
    apply_move,
    bitflip_mutation,
    cycle_crossover,
    k_bit_flip,
    order_crossover,
    sample_two_opt_move,
    sample_two_swap_move,
    two_opt_mutation,
    two_swap_mutation,
    uniform_crossover,
)
from .problems import MokpInstance, delta_evaluate, evaluate, random_genotype, repair_mokp

ALGORITHMS = ("semo", "semox", "nsga2", "smsemoa", "moead")

CHECKPOINTS_PER_DECADE = 25


def checkpoint_grid(budget: int, per_decade: int = CHECKPOINTS_PER_DECADE) -> list[int]:
    """Geometrically spaced evaluation counts, ending exactly at the budget."""
    points = {budget}
    k = 0
    while True:
        c = int(round(10.0 ** (k / per_decade)))
        if c >= budget:
            break
        points.add(max(c, 1))
        k += 1
    return sorted(points)


@dataclass
class AlgorithmConfig:
    kind: str
    budget: int
    seed: int
    population_size: int = 100
    moead_neighborhood: int = 20
    operators: OperatorConfig = field(default_factory=OperatorConfig)
    smsemoa_parent_selection: str = "tournament"  # or "random"

    def __post_init__(self):
        if self.kind not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.kind!r}")
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if self.kind in ("nsga2", "smsemoa", "moead") and self.budget < self.population_size:
            raise ValueError("budget must be >= population_size for population algorithms")


@dataclass(frozen=True)
class EvaluationEvent:
    eval_index: int
    individual: Individual


@dataclass
class RunResult:
    archive: Archive
    trajectory: list[tuple[int, float]]
    evaluations: int
    events: list[EvaluationEvent] | None = None
    crossover_log: list[tuple[int, bool]] | None = None


class _Recorder:
    """Budget accounting, external archive feeding, and trajectory logging."""

    def __init__(self, budget, ref: ReferencePoint | None, collect_events=False):
        self.budget = budget
        self.count = 0
        self.archive = Archive()
        self.ref = ref
        self.events = [] if collect_events else None
        self.trajectory: list[tuple[int, float]] = []
        self._checkpoints = checkpoint_grid(budget) if ref is not None else []
        self._next_cp = 0

    @property
    def exhausted(self) -> bool:
        return self.count >= self.budget

    @property
    def remaining(self) -> int:
        return self.budget - self.count

    def record(self, genotype, objectives) -> Individual:
        if self.exhausted:
            raise RuntimeError("evaluation past budget")
        self.count += 1
        ind = Individual(genotype, objectives)
        self.archive.insert(ind)
        if self.events is not None:
            self.events.append(EvaluationEvent(self.count, ind))
        if self._next_cp < len(self._checkpoints) and self.count == self._checkpoints[self._next_cp]:
            self.trajectory.append((self.count, hypervolume_2d(self.archive.objectives(), self.ref)))
            self._next_cp += 1
        return ind

    def evaluate(self, instance, genotype) -> Individual:
        return self.record(genotype, evaluate(instance, genotype))


# ------------------------------------------------------------- ranking tools

@dataclass
class RankedPopulation:
    rank: np.ndarray
    crowding: np.ndarray
    fronts: list[np.ndarray]


def _fronts_2d(F: np.ndarray) -> list[np.ndarray]:
    """Front assignment for two objectives in O(n log n).

    Processing points in lexicographic order, a front dominates the next
    point iff the front's current minimum, as a (f1, f0) pair, is
    lexicographically smaller than the point's; the minima are sorted, so
    the point's front index falls out of a binary search (patience sorting).
    """
    from bisect import bisect_left

    order = np.lexsort((F[:, 1], F[:, 0]))
    rank = np.empty(F.shape[0], dtype=np.int64)
    tails: list[tuple[float, float]] = []
    for idx in order:
        key = (F[idx, 1], F[idx, 0])
        r = bisect_left(tails, key)
        rank[idx] = r
        if r == len(tails):
            tails.append(key)
        else:
            tails[r] = key
    return [np.flatnonzero(rank == r) for r in range(len(tails))]


def fast_nondominated_sort(objectives) -> list[np.ndarray]:
    """Partition into fronts: front 0 is the non-dominated subset, front k is
    the non-dominated subset of what remains after removing fronts < k."""
    F = np.asarray(objectives, dtype=float)
    if F.ndim != 2 or F.shape[0] == 0:
        raise ValueError("empty population")
    if F.shape[1] == 2:
        return _fronts_2d(F)
    n = F.shape[0]
    le = (F[:, None, :] <= F[None, :, :]).all(-1)
    lt = (F[:, None, :] < F[None, :, :]).any(-1)
    dom = le & lt  # dom[i, j]: i dominates j
    n_dom = dom.sum(axis=0)
    assigned = np.zeros(n, dtype=bool)
    fronts = []
    while not assigned.all():
        front = np.flatnonzero((n_dom == 0) & ~assigned)
        fronts.append(front)
        assigned[front] = True
        n_dom = n_dom - dom[front].sum(axis=0)
    return fronts


def crowding_distance(front_objectives) -> np.ndarray:
    """NSGA-II crowding: boundary solutions get +inf, interior solutions the
    sum over objectives of the normalized neighbor gap."""
    F = np.asarray(front_objectives, dtype=float)
    n = F.shape[0]
    if n == 0:
        raise ValueError("empty front")
    if n <= 2:
        return np.full(n, np.inf)
    dist = np.zeros(n)
    for k in range(F.shape[1]):
        order = np.argsort(F[:, k], kind="stable")
        vals = F[order, k]
        dist[order[0]] = np.inf
        dist[order[-1]] = np.inf
        span = vals[-1] - vals[0]
        if n > 2 and span > 0:
            dist[order[1:-1]] += (vals[2:] - vals[:-2]) / span
    return dist


def rank_population(objectives) -> RankedPopulation:
    F = np.asarray(objectives, dtype=float)
    fronts = fast_nondominated_sort(F)
    rank = np.empty(F.shape[0], dtype=np.int64)
    crowding = np.empty(F.shape[0])
    for r, front in enumerate(fronts):
        rank[front] = r
        crowding[front] = crowding_distance(F[front])
    return RankedPopulation(rank=rank, crowding=crowding, fronts=fronts)


def _tournament(ranked: RankedPopulation, rng: np.random.Generator) -> int:
    n = ranked.rank.size
    i, j = int(rng.integers(n)), int(rng.integers(n))
    if ranked.rank[i] != ranked.rank[j]:
        return i if ranked.rank[i] < ranked.rank[j] else j
    if ranked.crowding[i] != ranked.crowding[j]:
        return i if ranked.crowding[i] > ranked.crowding[j] else j
    return i if rng.random() < 0.5 else j


def smsemoa_removal_index(front_objectives) -> int:
    """Member of the worst front to discard: smallest hypervolume contribution
    against the front's own nadir shifted by +1 in each objective."""
    F = np.asarray(front_objectives, dtype=float)
    if F.shape[0] == 1:
        return 0
    ref = F.max(axis=0) + 1.0
    return int(np.argmin(hv_contributions(F, ref, assume_nondominated=True)))


def tchebycheff(objectives, weights, ideal) -> float:
    """Weighted Chebyshev distance to the ideal point."""
    return float(np.max(weights * np.abs(np.asarray(objectives) - ideal)))


# ---------------------------------------------------------- family variation

def _local_move(instance, parent: Individual, rec: _Recorder, rng) -> Individual:
    """SEMO's single mutation move, with incremental evaluation for the
    permutation families."""
    fam = instance.family
    if fam == "mokp":
        child = repair_mokp(instance, k_bit_flip(parent.genotype, 2, rng))
        return rec.evaluate(instance, child)
    if fam == "monk":
        return rec.evaluate(instance, k_bit_flip(parent.genotype, 1, rng))
    if fam == "motsp":
        move = sample_two_opt_move(instance.D, rng)
    else:
        move = sample_two_swap_move(instance.D, rng)
    objs = delta_evaluate(instance, parent.genotype, move, base=parent.objectives)
    return rec.record(apply_move(parent.genotype, move), objs)


def _crossover(instance, a, b, rng):
    fam = instance.family
    if fam in ("mokp", "monk"):
        return uniform_crossover(a, b, rng)
    if fam == "motsp":
        return order_crossover(a, b, rng)
    return cycle_crossover(a, b)


def _ga_mutate(instance, g, rng, ops: OperatorConfig):
    fam = instance.family
    if fam in ("mokp", "monk"):
        p = ops.bitflip_rate if ops.bitflip_rate is not None else 1.0 / instance.D
        return bitflip_mutation(g, p, rng)
    mutate = two_opt_mutation if fam == "motsp" else two_swap_mutation
    if ops.permutation_mutation_semantics == "per_offspring":
        if rng.random() < ops.permutation_mutation_rate:
            g = mutate(g, rng)
        return g
    for _ in range(rng.binomial(instance.D, ops.permutation_mutation_rate)):
        g = mutate(g, rng)
    return g


def _ga_offspring(instance, pa, pb, rng, ops: OperatorConfig):
    """Crossover (at the configured rate) plus mutation; two children."""
    if rng.random() < ops.crossover_rate:
        c1, c2 = _crossover(instance, pa, pb, rng)
    else:
        c1, c2 = pa, pb
    c1 = _ga_mutate(instance, c1, rng, ops)
    c2 = _ga_mutate(instance, c2, rng, ops)
    if isinstance(instance, MokpInstance):
        c1, c2 = repair_mokp(instance, c1), repair_mokp(instance, c2)
    return c1, c2


# ------------------------------------------------------------------ the runs

def run_algorithm(instance, config: AlgorithmConfig, ref: ReferencePoint | None = None,
                  collect_events: bool = False, instrument: bool = False) -> RunResult:
    rng = np.random.default_rng(np.random.SeedSequence(config.seed))
    rec = _Recorder(config.budget, ref, collect_events=collect_events)
    runner = {
        "semo": _run_semo,
        "semox": _run_semox,
        "nsga2": _run_nsga2,
        "smsemoa": _run_smsemoa,
        "moead": _run_moead,
    }[config.kind]
    crossover_log = runner(instance, config, rec, rng, instrument)
    assert rec.count == config.budget, "budget accounting violated"
    return RunResult(
        archive=rec.archive,
        trajectory=rec.trajectory,
        evaluations=rec.count,
        events=rec.events,
        crossover_log=crossover_log,
    )


def _run_semo(instance, config, rec, rng, instrument=False):
    rec.evaluate(instance, random_genotype(instance, rng))
    while not rec.exhausted:
        parent = rec.archive.random_member(rng)
        _local_move(instance, parent, rec, rng)
    return None


def _run_semox(instance, config, rec, rng, instrument=False):
    """SEMO with crossover: once the archive holds at least two solutions,
    two distinct parents are crossed, one child is kept at random and then
    mutated exactly as in SEMO."""
    log = [] if instrument else None
    rec.evaluate(instance, random_genotype(instance, rng))
    while not rec.exhausted:
        size = len(rec.archive)
        use_crossover = size >= 2
        if log is not None:
            log.append((size, use_crossover))
        if use_crossover:
            i, j = rng.choice(size, size=2, replace=False).tolist()
            pa, pb = rec.archive.member(int(i)), rec.archive.member(int(j))
            c1, c2 = _crossover(instance, pa.genotype, pb.genotype, rng)
            child = c1 if rng.random() < 0.5 else c2
            fam = instance.family
            if fam == "mokp":
                child = repair_mokp(instance, k_bit_flip(child, 2, rng))
            elif fam == "monk":
                child = k_bit_flip(child, 1, rng)
            elif fam == "motsp":
                child = two_opt_mutation(child, rng)
            else:
                child = two_swap_mutation(child, rng)
            rec.evaluate(instance, child)
        else:
            parent = rec.archive.random_member(rng)
            _local_move(instance, parent, rec, rng)
    return log


def _init_population(instance, config, rec, rng):
    pop = []
    for _ in range(config.population_size):
        pop.append(rec.evaluate(instance, random_genotype(instance, rng)))
    return pop


def _run_nsga2(instance, config, rec, rng, instrument=False):
    N = config.population_size
    pop = _init_population(instance, config, rec, rng)
    while not rec.exhausted:
        F = np.array([ind.objectives for ind in pop])
        ranked = rank_population(F)
        children = []
        while len(children) < N:
            pa = pop[_tournament(ranked, rng)]
            pb = pop[_tournament(ranked, rng)]
            children.extend(_ga_offspring(instance, pa.genotype, pb.genotype, rng, config.operators))
        offspring = [rec.evaluate(instance, g) for g in children[: min(N, rec.remaining)]]
        combined = pop + offspring
        CF = np.array([ind.objectives for ind in combined])
        cranked = rank_population(CF)
        # fill whole fronts, then cut the last one by descending crowding
        order = np.lexsort((-cranked.crowding, cranked.rank))
        pop = [combined[i] for i in order[:N]]
    return None


def _run_smsemoa(instance, config, rec, rng, instrument=False):
    N = config.population_size
    pop = _init_population(instance, config, rec, rng)
    F = np.array([ind.objectives for ind in pop])
    ranked = rank_population(F)
    while not rec.exhausted:
        if config.smsemoa_parent_selection == "random":
            ia, ib = int(rng.integers(N)), int(rng.integers(N))
        else:
            ia, ib = _tournament(ranked, rng), _tournament(ranked, rng)
        c1, c2 = _ga_offspring(instance, pop[ia].genotype, pop[ib].genotype, rng, config.operators)
        child = c1 if rng.random() < 0.5 else c2
        pop.append(rec.evaluate(instance, child))
        F = np.vstack([F, pop[-1].objectives])
        cranked = rank_population(F)
        last = cranked.fronts[-1]
        drop = int(last[smsemoa_removal_index(F[last])])
        pop.pop(drop)
        F = np.delete(F, drop, axis=0)
        # removing a worst-front member cannot change any other rank; only
        # the crowding of the front that shrank needs refreshing
        rank = np.delete(cranked.rank, drop)
        crowding = np.delete(cranked.crowding, drop)
        shrunk = np.flatnonzero(rank == cranked.rank[drop])
        if shrunk.size:
            crowding[shrunk] = crowding_distance(F[shrunk])
        ranked = RankedPopulation(rank=rank, crowding=crowding, fronts=[])
    return None


def moead_weights(N: int) -> np.ndarray:
    i = np.arange(N) / (N - 1)
    return np.column_stack([i, 1.0 - i])


def _run_moead(instance, config, rec, rng, instrument=False):
    N = config.population_size
    T = min(config.moead_neighborhood, N)
    W = moead_weights(N)
    d = ((W[:, None, :] - W[None, :, :]) ** 2).sum(-1)
    B = np.argsort(d, axis=1, kind="stable")[:, :T]
    pop = _init_population(instance, config, rec, rng)
    P = np.array([ind.objectives for ind in pop])
    ideal = P.min(axis=0)
    while not rec.exhausted:
        for i in range(N):
            if rec.exhausted:
                break
            picks = rng.choice(T, size=2, replace=False)
            pa = pop[int(B[i, picks[0]])]
            pb = pop[int(B[i, picks[1]])]
            c1, c2 = _ga_offspring(instance, pa.genotype, pb.genotype, rng, config.operators)
            g = c1 if rng.random() < 0.5 else c2
            child = rec.evaluate(instance, g)
            ideal = np.minimum(ideal, child.objectives)
            WB = W[B[i]]
            new_vals = (WB * np.abs(child.objectives[None, :] - ideal)).max(axis=1)
            old_vals = (WB * np.abs(P[B[i]] - ideal)).max(axis=1)
            for j in B[i][new_vals < old_vals]:
                pop[int(j)] = child
                P[int(j)] = child.objectives
    return None
