"""Разметка сегментов по кластерам и общий детерминированный k-means"""
import logging
import warnings
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from sklearn.cluster import KMeans

from .errors import ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClusterAssignment:
    """Номер кластера для каждого сегмента; все номера из [0, K) встречаются"""
    labels: Tuple[int, ...]
    num_clusters: int

    def __post_init__(self):
        labels = tuple(int(x) for x in self.labels)
        if set(labels) != set(range(self.num_clusters)):
            raise ValidationError(f"метки {sorted(set(labels))} не покрывают [0, {self.num_clusters})")
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.labels)

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "ClusterAssignment":
        canonical = canonical_relabel(labels)
        return cls(tuple(canonical), len(set(canonical)))


def canonical_relabel(labels: Sequence[int]) -> np.ndarray:
    """Перенумерация кластеров в порядке первого появления"""
    mapping = {}
    out = np.empty(len(labels), dtype=int)
    for i, label in enumerate(labels):
        out[i] = mapping.setdefault(label, len(mapping))
    return out


def farthest_point_centers(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Первый центр случайный, каждый следующий наиболее удалён от выбранных"""
    chosen = [int(rng.integers(len(x)))]
    dist = np.sum((x - x[chosen[0]]) ** 2, axis=1)
    for _ in range(1, k):
        idx = int(np.argmax(dist))
        chosen.append(idx)
        dist = np.minimum(dist, np.sum((x - x[idx]) ** 2, axis=1))
    return x[chosen]


def seeded_kmeans(x: np.ndarray, k: int, restarts: int = 10, seed: int = 0) -> np.ndarray:
    """k-means Ллойда с несколькими перезапусками; побеждает наименьшая инерция"""
    x = np.asarray(x, dtype=float)
    if k < 1 or restarts < 1:
        raise ValidationError("k и число перезапусков должны быть положительными")
    if len(x) < k:
        raise ValidationError(f"сегментов ({len(x)}) меньше, чем кластеров ({k})")
    best_labels, best_inertia = None, np.inf
    for restart in range(restarts):
        rng = np.random.default_rng([seed % 2 ** 64, restart])
        centers = farthest_point_centers(x, k, rng)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            model = KMeans(n_clusters=k, init=centers, n_init=1, algorithm="lloyd").fit(x)
        if model.inertia_ < best_inertia:
            best_labels, best_inertia = model.labels_, model.inertia_
    logger.debug("k-means: k=%d, инерция %.6g", k, best_inertia)
    return canonical_relabel(best_labels)
