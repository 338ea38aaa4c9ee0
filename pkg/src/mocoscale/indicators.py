"""Exact bi-objective hypervolume, per-point contributions, and the
random-sampling reference point procedure."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import problems
from .core import non_dominated_filter


@dataclass(frozen=True)
class ReferencePoint:
    """HV bound in canonical minimisation orientation.

    ``signs`` records the per-objective orientation sign (canonical =
    sign * native), so archive snapshots stored natively can be mapped back.
    """

    values: np.ndarray
    signs: np.ndarray
    provenance: dict = field(default_factory=dict)


def hypervolume_2d(points, ref) -> float:
    """Exact Lebesgue measure dominated by ``points`` and bounded by ``ref``.

    Points that do not dominate the reference point contribute zero.
    Sort-and-sweep, O(n log n).
    """
    ref = np.asarray(ref.values if isinstance(ref, ReferencePoint) else ref, dtype=float)
    if ref.shape != (2,):
        raise ValueError("exact HV implemented for m=2 only")
    F = np.asarray(points, dtype=float).reshape(-1, 2)
    F = F[(F[:, 0] < ref[0]) & (F[:, 1] < ref[1])]
    if F.shape[0] == 0:
        return 0.0
    F = F[np.lexsort((F[:, 1], F[:, 0]))]
    # keep the staircase: strictly decreasing f1 along ascending f0
    best = np.minimum.accumulate(F[:, 1])
    keep = np.ones(len(F), dtype=bool)
    keep[1:] = F[1:, 1] < best[:-1]
    F = F[keep]
    xs = np.append(F[:, 0], ref[0])
    widths = np.diff(xs)
    heights = ref[1] - F[:, 1]
    return float(np.dot(widths, heights))


def hv_contributions(front, ref, assume_nondominated: bool = False) -> np.ndarray:
    """Exclusive hypervolume of each front member: HV(front) - HV(front \\ {i}).

    The front must be mutually non-dominated (``assume_nondominated`` skips
    the check on hot paths).  Members outside the reference region
    contribute zero.
    """
    ref = np.asarray(ref.values if isinstance(ref, ReferencePoint) else ref, dtype=float)
    F = np.asarray(front, dtype=float).reshape(-1, 2)
    n = F.shape[0]
    if not assume_nondominated and len(non_dominated_filter(F)) != n:
        raise ValueError("front must be non-dominated")
    contrib = np.zeros(n)
    inside = (F[:, 0] < ref[0]) & (F[:, 1] < ref[1])
    idx = np.flatnonzero(inside)
    if idx.size == 0:
        return contrib
    order = idx[np.argsort(F[idx, 0], kind="stable")]
    x = F[order, 0]
    y = F[order, 1]
    right_x = np.append(x[1:], ref[0])
    upper_y = np.concatenate(([ref[1]], y[:-1]))
    contrib[order] = (right_x - x) * (upper_y - y)
    # objective-equal duplicates have zero exclusive volume
    _, inverse, counts = np.unique(F[inside], axis=0, return_inverse=True, return_counts=True)
    dup = np.flatnonzero(inside)[counts[inverse] > 1]
    contrib[dup] = 0.0
    return contrib


def reference_from_extremes(min_i: float, max_i: float, maximise: bool) -> float:
    """Offset the nadir by a tenth of the objective range, in the worse
    direction for the given native orientation."""
    span = max_i - min_i
    if span == 0:
        warnings.warn("degenerate objective range; reference offset is 0")
    return (min_i - span / 10.0) if maximise else (max_i + span / 10.0)


def sample_reference_point(instance, n_samples: int, seed: int) -> ReferencePoint:
    """Reference point slightly worse than the nadir of the non-dominated
    subset of ``n_samples`` uniform random solutions (MOKP samples repaired)."""
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    rng = np.random.default_rng([int(seed), 0x5EF, instance.D, instance.m])
    objs = np.empty((n_samples, instance.m))
    for i in range(n_samples):
        g = problems.random_genotype(instance, rng)
        objs[i] = problems.evaluate(instance, g)
    nd = objs[non_dominated_filter(objs)]
    sign = problems.orientation_sign(instance)
    maximise = sign < 0
    native = sign * nd
    values = np.empty(instance.m)
    for k in range(instance.m):
        r_native = reference_from_extremes(float(native[:, k].min()), float(native[:, k].max()), maximise)
        values[k] = sign * r_native
    return ReferencePoint(
        values=values,
        signs=np.full(instance.m, sign),
        provenance={
            "kind": "sampled",
            "instance_id": problems.instance_id(instance),
            "n_samples": n_samples,
            "sampling_seed": int(seed),
        },
    )


def explicit_reference_point(values, signs=None) -> ReferencePoint:
    values = np.asarray(values, dtype=float)
    if signs is None:
        signs = np.ones_like(values)
    return ReferencePoint(values=values, signs=np.asarray(signs, dtype=float), provenance={"kind": "explicit"})


def save_reference_point(ref: ReferencePoint, path) -> None:
    doc = {
        "instance_id": ref.provenance.get("instance_id"),
        "n_samples": ref.provenance.get("n_samples"),
        "sampling_seed": ref.provenance.get("sampling_seed"),
        "values": [float(v) for v in ref.values],
        "signs": [float(s) for s in ref.signs],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True)


def load_reference_point(path) -> ReferencePoint:
    with open(path) as fh:
        doc = json.load(fh)
    prov = {"kind": "sampled" if doc.get("n_samples") else "explicit"}
    for k in ("instance_id", "n_samples", "sampling_seed"):
        if doc.get(k) is not None:
            prov[k] = doc[k]
    return ReferencePoint(
        values=np.asarray(doc["values"], dtype=float),
        signs=np.asarray(doc.get("signs", [1.0] * len(doc["values"])), dtype=float),
        provenance=prov,
    )
