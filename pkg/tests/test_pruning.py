import math

import numpy as np
import pytest

from diarlab.errors import ValidationError
from diarlab.pruning import PruningSpec, prune, prune_fixed_k, prune_pna, prune_top_p, two_means_split

EXAMPLE = np.array([
    [0.0, 0.9, 0.2, 0.8],
    [0.9, 0.0, 0.5, 0.3],
    [0.2, 0.5, 0.0, 0.7],
    [0.8, 0.3, 0.7, 0.0],
])


def random_affinity(rng, n):
    a = rng.uniform(0.01, 1.0, (n, n))
    a = (a + a.T) / 2
    np.fill_diagonal(a, 0.0)
    return a


def naive_prune(a, counts, symmetrize="max"):
    n = len(a)
    kept = np.zeros_like(a)
    for i in range(n):
        ranked = sorted((j for j in range(n) if j != i), key=lambda j: (-a[i, j], j))
        for j in ranked[:counts[i]]:
            kept[i, j] = a[i, j]
    return np.maximum(kept, kept.T) if symmetrize == "max" else np.minimum(kept, kept.T)


def test_fixed_k_example():
    pruned = prune_fixed_k(EXAMPLE, 2)
    np.testing.assert_array_equal(pruned[0], [0.0, 0.9, 0.0, 0.8])
    np.testing.assert_array_equal(pruned[1], [0.9, 0.0, 0.5, 0.0])
    np.testing.assert_array_equal(pruned, pruned.T)


def test_ties_go_to_lower_column():
    a = np.full((4, 4), 0.5)
    np.fill_diagonal(a, 0.0)
    pruned = prune_fixed_k(a, 1)
    expected = np.zeros((4, 4))
    expected[0, 1:] = expected[1:, 0] = 0.5
    np.testing.assert_array_equal(pruned, expected)


@pytest.mark.parametrize("symmetrize", ["max", "min"])
def test_fixed_k_matches_naive(rng, symmetrize):
    for k in (1, 3, 6):
        a = random_affinity(rng, 12)
        np.testing.assert_array_equal(prune_fixed_k(a, k, symmetrize), naive_prune(a, [k] * 12, symmetrize))


def test_full_neighbourhood_keeps_matrix(rng):
    a = random_affinity(rng, 9)
    np.testing.assert_array_equal(prune_fixed_k(a, 8), a)
    np.testing.assert_array_equal(prune_fixed_k(a, 50), a)
    np.testing.assert_array_equal(prune_top_p(a, 1.0), a)


def test_top_p_counts(rng):
    a = random_affinity(rng, 101)
    np.testing.assert_array_equal(prune_top_p(a, 0.01), prune_fixed_k(a, 2))
    np.testing.assert_array_equal(prune_top_p(a, 0.05), prune_fixed_k(a, 5))
    np.testing.assert_array_equal(prune_top_p(a, 0.01, min_keep=4), prune_fixed_k(a, 4))
    assert np.all((prune_top_p(a, 0.01) > 0).sum(axis=1) >= 2)


def test_two_means_split():
    np.testing.assert_array_equal(two_means_split([0.95, 0.93, 0.91, 0.10, 0.12]), [True, True, True, False, False])
    assert two_means_split([0.4, 0.4, 0.4]).all()
    assert two_means_split([0.7]).all()


def exhaustive_split(values):
    x = np.asarray(values, dtype=float)
    xs = np.sort(x)
    best_sse, best_threshold = np.inf, xs[0]
    for t in range(1, len(xs)):
        if xs[t] == xs[t - 1]:
            continue
        low, high = xs[:t], xs[t:]
        sse = ((low - low.mean()) ** 2).sum() + ((high - high.mean()) ** 2).sum()
        if sse < best_sse:
            best_sse, best_threshold = sse, xs[t]
    return x >= best_threshold


def test_two_means_split_matches_exhaustive_search(rng):
    for _ in range(500):
        values = rng.uniform(0.0, 1.0, int(rng.integers(2, 13)))
        np.testing.assert_array_equal(two_means_split(values), exhaustive_split(values))


@pytest.mark.parametrize("tau, min_keep", [(0.2, 2), (0.5, 1), (1.0, 3)])
def test_pna_matches_naive(rng, tau, min_keep):
    for _ in range(20):
        n = int(rng.integers(3, 16))
        a = random_affinity(rng, n)
        counts = [max(math.ceil(tau * int(exhaustive_split(np.delete(a[i], i)).sum()) - 1e-9), min_keep)
                  for i in range(n)]
        np.testing.assert_array_equal(prune_pna(a, tau, min_keep), naive_prune(a, counts))


def test_pna_on_two_groups(rng):
    n = 10
    groups = np.arange(n) // 5
    a = np.where(groups[:, None] == groups[None, :], rng.uniform(0.85, 0.95, (n, n)), rng.uniform(0.05, 0.15, (n, n)))
    a = (a + a.T) / 2
    np.fill_diagonal(a, 0.0)
    # четыре соседа своей группы, 20% от них округляется вверх до 1, min_keep поднимает до 2
    np.testing.assert_array_equal(prune_pna(a), prune_fixed_k(a, 2))
    np.testing.assert_array_equal(prune_pna(a, tau=1.0), prune_fixed_k(a, 4))


def test_prune_dispatch(rng):
    a = random_affinity(rng, 8)
    np.testing.assert_array_equal(prune(a, PruningSpec("fixed_k", k=3)), prune_fixed_k(a, 3))
    np.testing.assert_array_equal(prune(a, PruningSpec("top_p", p=0.5)), prune_top_p(a, 0.5))
    np.testing.assert_array_equal(prune(a, PruningSpec("pna", tau=0.5)), prune_pna(a, 0.5))


@pytest.mark.parametrize("kwargs", [
    {"strategy": "knn"},
    {"strategy": "fixed_k"},
    {"strategy": "fixed_k", "k": 0},
    {"strategy": "top_p", "p": 0.0},
    {"strategy": "top_p", "p": 1.5},
    {"strategy": "pna", "tau": 0.0},
    {"strategy": "pna", "symmetrize": "mean"},
])
def test_spec_validation(kwargs):
    with pytest.raises(ValidationError):
        PruningSpec(**kwargs)


def test_too_small_matrix():
    with pytest.raises(ValidationError):
        prune_fixed_k(np.zeros((1, 1)), 1)
