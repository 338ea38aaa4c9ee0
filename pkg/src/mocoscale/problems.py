"""Seeded generation and evaluation of the four combinatorial problem families.

Families and encodings:
  motsp  - permutation, minimise m tour costs over per-objective cost matrices
  mokp   - bit string, maximise m knapsack values under m capacities
  monk   - bit string, maximise m NK-landscape objectives (K interacting bits)
  moqap  - permutation, minimise m flow-times-distance assignment costs

``evaluate`` always returns the canonical minimisation orientation, so
maximisation families (mokp, monk) come out negated.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .core import BitString, Genotype, Permutation
from .operators import TwoOptMove, TwoSwapMove, apply_move

GENERATOR_VERSION = 1

FAMILIES = ("motsp", "mokp", "monk", "moqap")
_FAMILY_IDS = {f: i for i, f in enumerate(FAMILIES)}

#: canonical = sign * native; -1 for maximisation families
ORIENTATION_SIGN = {"motsp": 1.0, "mokp": -1.0, "monk": -1.0, "moqap": 1.0}

DEFAULT_NK_ORDER = 10


@dataclass(eq=False)
class MotspInstance:
    D: int
    m: int
    seed: int
    cost: np.ndarray  # (m, D, D), symmetric per objective, [0, 1) entries, zero diagonal

    family = "motsp"
    encoding = "permutation"


@dataclass(eq=False)
class MokpInstance:
    D: int
    m: int
    seed: int
    values: np.ndarray  # (m, D) integers in [10, 100]
    weights: np.ndarray  # (m, D) integers in [10, 100]
    capacities: np.ndarray  # (m,), half the per-knapsack total weight
    repair_order: np.ndarray = field(default=None)  # ascending max_j(v/w)

    family = "mokp"
    encoding = "bitstring"

    def __post_init__(self):
        if self.repair_order is None:
            ratio = (self.values / self.weights).max(axis=0)
            self.repair_order = np.argsort(ratio, kind="stable")
        self._cum_w = np.cumsum(self.weights[:, self.repair_order], axis=1)


@dataclass(eq=False)
class MonkInstance:
    D: int
    m: int
    seed: int
    K: int
    links: np.ndarray  # (D, m, K) interacting positions, distinct, != i
    contribution_seed: int  # contributions derived on demand from this

    family = "monk"
    encoding = "bitstring"


@dataclass(eq=False)
class MoqapInstance:
    D: int
    m: int
    seed: int
    flow: np.ndarray  # (m, D, D), entries in [0, 100]
    dist: np.ndarray  # (D, D) Euclidean distances of points in [0, 5000]^2

    family = "moqap"
    encoding = "permutation"


ProblemInstance = Union[MotspInstance, MokpInstance, MonkInstance, MoqapInstance]


def instance_id(instance: ProblemInstance) -> str:
    return f"{instance.family}-D{instance.D}-m{instance.m}-s{instance.seed}"


def orientation_sign(instance: ProblemInstance) -> float:
    return ORIENTATION_SIGN[instance.family]


# ------------------------------------------------------------------ generation

def generate_instance(family: str, D: int, m: int, seed: int, K: int = DEFAULT_NK_ORDER) -> ProblemInstance:
    """Deterministic instance generation: a pure function of its arguments."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    if D < 2:
        raise ValueError("D must be >= 2")
    if m < 2:
        raise ValueError("m must be >= 2")
    rng = np.random.default_rng([int(seed), _FAMILY_IDS[family], D, m])

    if family == "motsp":
        # one draw per city pair: symmetric costs, zero diagonal
        draws = rng.random((m, D, D))
        upper = np.triu(draws, k=1)
        cost = upper + upper.transpose(0, 2, 1)
        return MotspInstance(D=D, m=m, seed=seed, cost=cost)

    if family == "mokp":
        values = rng.integers(10, 101, size=(m, D)).astype(np.int64)
        weights = rng.integers(10, 101, size=(m, D)).astype(np.int64)
        capacities = weights.sum(axis=1) / 2.0
        return MokpInstance(D=D, m=m, seed=seed, values=values, weights=weights, capacities=capacities)

    if family == "monk":
        if D <= K:
            raise ValueError("K must be < D")
        links = np.empty((D, m, K), dtype=np.int64)
        for i in range(D):
            for j in range(m):
                pick = rng.choice(D - 1, size=K, replace=False)
                pick[pick >= i] += 1
                links[i, j] = pick
        contribution_seed = int(rng.integers(0, 2**63, dtype=np.int64))
        return MonkInstance(D=D, m=m, seed=seed, K=K, links=links, contribution_seed=contribution_seed)

    # moqap
    flow = rng.random((m, D, D)) * 100.0
    points = rng.random((D, 2)) * 5000.0
    diff = points[:, None, :] - points[None, :, :]
    dist = np.sqrt((diff**2).sum(-1))
    return MoqapInstance(D=D, m=m, seed=seed, flow=flow, dist=dist)


# ------------------------------------------------- NK contributions (hashed)

_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(x: np.ndarray) -> np.ndarray:
    z = x + np.uint64(_GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def nk_contributions(instance: MonkInstance, bits: np.ndarray) -> np.ndarray:
    """Contribution c_{i,j} for every (bit, objective) pair, shape (D, m).

    Contributions are uniform [0, 1) values derived from a counter-based hash
    of (contribution_seed, i, j, bit pattern) rather than pre-drawn tables,
    so repeated queries with the same pattern are identical by construction.
    """
    D, m, K = instance.D, instance.m, instance.K
    x = bits.astype(np.uint64)
    neigh = x[instance.links]  # (D, m, K)
    weights = np.uint64(1) << np.arange(K, dtype=np.uint64)
    pattern = (x[:, None] << np.uint64(K)) | (neigh * weights).sum(axis=2)
    idx = (np.arange(D, dtype=np.uint64)[:, None] * np.uint64(m)) + np.arange(m, dtype=np.uint64)[None, :]
    key = (idx << np.uint64(K + 1)) | pattern
    seeded = np.asarray(np.uint64(instance.contribution_seed), dtype=np.uint64)
    h = _splitmix64(_splitmix64(seeded[None, None] ^ key))
    return h / np.float64(2.0**64)


# ------------------------------------------------------------------ evaluation

def _check_encoding(instance: ProblemInstance, g: Genotype) -> None:
    want = BitString if instance.encoding == "bitstring" else Permutation
    if not isinstance(g, want):
        raise TypeError(f"{instance.family} expects {want.__name__}")
    if g.D != instance.D:
        raise ValueError(f"genotype length {g.D} != instance D {instance.D}")


def mokp_loads(instance: MokpInstance, bits: np.ndarray) -> np.ndarray:
    return instance.weights @ bits.astype(np.int64)


def mokp_is_feasible(instance: MokpInstance, g: BitString) -> bool:
    return bool(np.all(mokp_loads(instance, g.bits) <= instance.capacities))


def repair_mokp(instance: MokpInstance, g: BitString) -> BitString:
    """Greedy ratio repair: drop selected items in ascending max_j(v/w) order
    until every capacity is met.  Feasible genotypes pass through unchanged."""
    load = mokp_loads(instance, g.bits)
    if np.all(load <= instance.capacities):
        return g
    order = instance.repair_order
    sel = g.bits[order].astype(bool)
    sel_order = order[sel]
    cum = np.cumsum(instance.weights[:, sel_order], axis=1)
    need = load - instance.capacities
    r = 0
    for j in range(instance.m):
        if need[j] > 0:
            r = max(r, int(np.searchsorted(cum[j], need[j], side="left")) + 1)
    bits = g.bits.copy()
    bits[sel_order[:r]] = 0
    return BitString(bits)


def evaluate(instance: ProblemInstance, g: Genotype) -> np.ndarray:
    """Objective vector in canonical minimisation orientation."""
    _check_encoding(instance, g)

    if isinstance(instance, MotspInstance):
        tour = g.order
        nxt = np.roll(tour, -1)  # closed tour: includes the returning edge
        return instance.cost[:, tour, nxt].sum(axis=1)

    if isinstance(instance, MokpInstance):
        if not mokp_is_feasible(instance, g):
            raise ValueError("evaluate requires feasible genotype")
        return -(instance.values @ g.bits.astype(np.int64)).astype(float)

    if isinstance(instance, MonkInstance):
        return -nk_contributions(instance, g.bits).mean(axis=0)

    if isinstance(instance, MoqapInstance):
        p = g.order
        loc = instance.dist[p][:, p]
        return (instance.flow * loc[None, :, :]).sum(axis=(1, 2))

    raise TypeError(f"unknown instance type {type(instance)!r}")


def delta_evaluate(instance: ProblemInstance, g: Permutation, move, base: np.ndarray | None = None) -> np.ndarray:
    """Objectives after applying ``move`` to ``g``, computed incrementally.

    ``base`` is evaluate(instance, g); if omitted it is computed in full.
    Matches the full evaluation to within 1e-9 relative and counts as one
    function evaluation wherever budgets apply.
    """
    if base is None:
        base = evaluate(instance, g)
    if isinstance(instance, MotspInstance):
        if not isinstance(move, TwoOptMove):
            raise TypeError("motsp expects a TwoOptMove")
        i, j = move.i, move.j
        if i == j:
            return base.copy()
        tour = g.order
        D = instance.D
        prev, after = tour[(i - 1) % D], tour[(j + 1) % D]
        seg = tour[i : j + 1]
        C = instance.cost
        old = C[:, prev, seg[0]] + C[:, seg[-1], after] + C[:, seg[:-1], seg[1:]].sum(axis=1)
        new = C[:, prev, seg[-1]] + C[:, seg[0], after] + C[:, seg[1:], seg[:-1]].sum(axis=1)
        return base + (new - old)

    if isinstance(instance, MoqapInstance):
        if not isinstance(move, TwoSwapMove):
            raise TypeError("moqap expects a TwoSwapMove")
        a, b = move.i, move.j
        if a == b:
            return base.copy()
        p = g.order
        pa, pb = p[a], p[b]
        others = np.delete(np.arange(instance.D), [a, b])
        po = p[others]
        F, L = instance.flow, instance.dist
        delta = (
            F[:, a, others] @ (L[pb, po] - L[pa, po])
            + F[:, b, others] @ (L[pa, po] - L[pb, po])
            + F[:, others, a] @ (L[po, pb] - L[po, pa])
            + F[:, others, b] @ (L[po, pa] - L[po, pb])
            + F[:, a, b] * (L[pb, pa] - L[pa, pb])
            + F[:, b, a] * (L[pa, pb] - L[pb, pa])
        )
        return base + delta

    raise ValueError(f"delta_evaluate unsupported for family {instance.family!r}")


def random_genotype(instance: ProblemInstance, rng: np.random.Generator, repair: bool = True) -> Genotype:
    """Uniform random genotype for the instance's encoding (MOKP repaired)."""
    if instance.encoding == "bitstring":
        g = BitString(rng.integers(0, 2, size=instance.D, dtype=np.int64).astype(np.uint8))
        if repair and isinstance(instance, MokpInstance):
            g = repair_mokp(instance, g)
        return g
    return Permutation(rng.permutation(instance.D).astype(np.int64))


# ----------------------------------------------------------------- persistence

def save_instance(instance: ProblemInstance, path, embed_data: bool = False) -> None:
    doc = {
        "family": instance.family,
        "D": instance.D,
        "m": instance.m,
        "seed": instance.seed,
        "generator_version": GENERATOR_VERSION,
    }
    if isinstance(instance, MonkInstance):
        doc["K"] = instance.K
    if embed_data:
        if isinstance(instance, MotspInstance):
            doc["data"] = {"cost": instance.cost.tolist()}
        elif isinstance(instance, MokpInstance):
            doc["data"] = {
                "values": instance.values.tolist(),
                "weights": instance.weights.tolist(),
                "capacities": instance.capacities.tolist(),
            }
        elif isinstance(instance, MonkInstance):
            doc["data"] = {
                "links": instance.links.tolist(),
                "contribution_seed": instance.contribution_seed,
            }
        else:
            doc["data"] = {"flow": instance.flow.tolist(), "dist": instance.dist.tolist()}
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True)


def load_instance(path) -> ProblemInstance:
    with open(path) as fh:
        doc = json.load(fh)
    family, D, m, seed = doc["family"], doc["D"], doc["m"], doc["seed"]
    data = doc.get("data")
    if data is None:
        return generate_instance(family, D, m, seed, K=doc.get("K", DEFAULT_NK_ORDER))
    if family == "motsp":
        return MotspInstance(D=D, m=m, seed=seed, cost=np.asarray(data["cost"]))
    if family == "mokp":
        return MokpInstance(
            D=D, m=m, seed=seed,
            values=np.asarray(data["values"], dtype=np.int64),
            weights=np.asarray(data["weights"], dtype=np.int64),
            capacities=np.asarray(data["capacities"]),
        )
    if family == "monk":
        return MonkInstance(
            D=D, m=m, seed=seed, K=doc["K"],
            links=np.asarray(data["links"], dtype=np.int64),
            contribution_seed=data["contribution_seed"],
        )
    return MoqapInstance(D=D, m=m, seed=seed, flow=np.asarray(data["flow"]), dist=np.asarray(data["dist"]))
