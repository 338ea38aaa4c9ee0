import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mocoscale.core import (
    Archive,
    BitString,
    Individual,
    Permutation,
    dominates,
    non_dominated_filter,
)


def ind(x, y):
    return Individual(BitString(np.zeros(1, dtype=np.uint8)), np.array([x, y], dtype=float))


class TestDominates:
    def test_strict_one_component(self):
        assert dominates((1, 2), (2, 2))

    def test_equal_vectors_do_not_dominate(self):
        assert not dominates((1, 2), (1, 2))

    def test_incomparable(self):
        assert not dominates((1, 3), (2, 1))
        assert not dominates((2, 1), (1, 3))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            dominates((1, 2), (1, 2, 3))

    @given(st.lists(st.integers(0, 5), min_size=2, max_size=4),
           st.lists(st.integers(0, 5), min_size=2, max_size=4))
    def test_antisymmetric(self, a, b):
        if len(a) != len(b):
            return
        assert not (dominates(a, b) and dominates(b, a))


class TestNonDominatedFilter:
    def test_incomparable_chain(self):
        keep = non_dominated_filter([(1, 3), (2, 2), (3, 1)])
        assert keep.tolist() == [0, 1, 2]

    def test_simple_dominance(self):
        assert non_dominated_filter([(1, 1), (2, 2)]).tolist() == [0]

    def test_empty_input(self):
        with pytest.raises(ValueError, match="empty"):
            non_dominated_filter([])

    def test_matches_pairwise_oracle(self):
        rng = np.random.default_rng(7)
        F = rng.integers(0, 20, size=(200, 2)).astype(float)
        keep = set(non_dominated_filter(F).tolist())
        oracle = set()
        for i in range(len(F)):
            if not any(dominates(F[j], F[i]) for j in range(len(F)) if j != i):
                oracle.add(i)
        assert keep == oracle


def naive_insert(front: list, z: tuple):
    """Reference O(n) archive insert: reject on weak dominance, sweep removals."""
    if any((a[0] <= z[0] and a[1] <= z[1]) for a in front):
        return front, False
    kept = [a for a in front if not (z[0] <= a[0] and z[1] <= a[1])]
    kept.append(z)
    kept.sort()
    return kept, True


class TestArchive:
    def test_insert_between(self):
        a = Archive()
        for p in [(1, 3), (3, 1)]:
            a.insert(ind(*p))
        out = a.insert(ind(2, 2))
        assert out.accepted and out.removed == 0
        assert a.objectives().tolist() == [[1, 3], [2, 2], [3, 1]]

    def test_dominating_insert_sweeps(self):
        a = Archive()
        for p in [(1, 3), (2, 2), (3, 1)]:
            a.insert(ind(*p))
        out = a.insert(ind(1, 1))
        assert out.accepted and out.removed == 3
        assert a.objectives().tolist() == [[1, 1]]

    def test_objective_equal_duplicate_rejected(self):
        a = Archive()
        assert a.insert(ind(2, 2)).accepted
        assert not a.insert(ind(2, 2)).accepted
        assert len(a) == 1

    def test_matches_brute_force_on_random_stream(self):
        rng = np.random.default_rng(11)
        a = Archive()
        points = rng.integers(0, 50, size=(10_000, 2)).astype(float)
        for p in points:
            a.insert(ind(p[0], p[1]))
        a.check_invariants()
        distinct = np.unique(points, axis=0)
        expected = distinct[non_dominated_filter(distinct)]
        got = a.objectives()
        assert np.array_equal(np.sort(got, axis=0), np.sort(expected, axis=0))

    def test_matches_naive_insert_semantics(self):
        rng = np.random.default_rng(3)
        a = Archive()
        front = []
        for _ in range(2000):
            z = tuple(rng.integers(0, 30, size=2).astype(float).tolist())
            front, accepted = naive_insert(front, z)
            out = a.insert(ind(*z))
            assert out.accepted == accepted
            assert a.objectives().tolist() == [list(p) for p in front]

    def test_mutual_nondominance_after_stream(self):
        rng = np.random.default_rng(5)
        a = Archive()
        for _ in range(500):
            a.insert(ind(*rng.random(2)))
        F = a.objectives()
        for i in range(len(F)):
            for j in range(len(F)):
                if i != j:
                    assert not dominates(F[i], F[j])

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 9), st.integers(0, 9)), min_size=1, max_size=30),
           st.randoms(use_true_random=False))
    def test_permutation_independent(self, points, rnd):
        a1, a2 = Archive(), Archive()
        shuffled = list(points)
        rnd.shuffle(shuffled)
        for p in points:
            a1.insert(ind(float(p[0]), float(p[1])))
        for p in shuffled:
            a2.insert(ind(float(p[0]), float(p[1])))
        assert a1.objectives().tolist() == a2.objectives().tolist()

    def test_reinsert_idempotent(self):
        a = Archive()
        rng = np.random.default_rng(9)
        for _ in range(200):
            a.insert(ind(*rng.integers(0, 10, size=2).astype(float)))
        before = a.objectives().tolist()
        for row in before:
            assert not a.insert(ind(*row)).accepted
        assert a.objectives().tolist() == before

    def test_rejects_wrong_dimension(self):
        a = Archive()
        with pytest.raises(ValueError):
            a.insert(Individual(BitString(np.zeros(1, dtype=np.uint8)), np.array([1.0, 2.0, 3.0])))

    def test_csv_roundtrip(self, tmp_path):
        from mocoscale.core import load_archive_csv

        a = Archive()
        for p in [(1, 3), (2, 2), (3, 1)]:
            a.insert(ind(*p))
        path = tmp_path / "arch.csv"
        a.to_csv(path, orientation_sign=-1.0, include_genotype=True)
        native = load_archive_csv(path)
        assert np.array_equal(native, -a.objectives())


class TestGenotypes:
    def test_permutation_validity(self):
        assert Permutation(np.array([2, 0, 1])).is_valid()
        assert not Permutation(np.array([0, 0, 1])).is_valid()

    def test_to_str(self):
        assert BitString(np.array([1, 0, 1], dtype=np.uint8)).to_str() == "101"
        assert Permutation(np.array([2, 0, 1])).to_str() == "2 0 1"
