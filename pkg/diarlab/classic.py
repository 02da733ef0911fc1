"""Базовые методы: агломеративная иерархическая кластеризация и k-means по эмбеддингам"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.cluster.hierarchy import cut_tree, fcluster, linkage
from scipy.spatial.distance import pdist

from .assignment import ClusterAssignment, seeded_kmeans
from .embeddings import EmbeddingSet
from .errors import ValidationError

logger = logging.getLogger(__name__)

LINKAGES = ("average", "complete", "single")


@dataclass(frozen=True)
class AhcConfig:
    """Связь кластеров и ровно один критерий остановки"""
    linkage: str = "average"
    target_k: Optional[int] = None
    threshold: Optional[float] = None

    def __post_init__(self):
        if self.linkage not in LINKAGES:
            raise ValidationError(f"неизвестный тип связи: {self.linkage}")
        if (self.target_k is None) == (self.threshold is None):
            raise ValidationError("задайте ровно одно из: target_k или threshold")
        if self.target_k is not None and self.target_k < 1:
            raise ValidationError("target_k должно быть положительным")


def ahc_cluster(embeddings: EmbeddingSet, cfg: AhcConfig) -> ClusterAssignment:
    """Слияние ближайших по косинусному расстоянию кластеров до критерия остановки"""
    n = len(embeddings)
    if cfg.target_k is not None and cfg.target_k > n:
        raise ValidationError(f"target_k ({cfg.target_k}) больше числа сегментов ({n})")
    if n == 1:
        return ClusterAssignment((0,), 1)

    distances = np.clip(pdist(embeddings.vectors, metric="cosine"), 0.0, None)
    tree = linkage(distances, method=cfg.linkage)
    if cfg.target_k is not None:
        labels = cut_tree(tree, n_clusters=cfg.target_k).reshape(-1)
    else:
        labels = fcluster(tree, t=cfg.threshold, criterion="distance")
    result = ClusterAssignment.from_labels(labels)
    logger.debug("AHC (%s): %d кластеров", cfg.linkage, result.num_clusters)
    return result


def kmeans_cluster(embeddings: EmbeddingSet, k: int, restarts: int = 10, seed: int = 0) -> ClusterAssignment:
    """k-means по нормированным эмбеддингам с той же инициализацией, что и в спектральном методе"""
    if len(embeddings) < k:
        raise ValidationError(f"сегментов ({len(embeddings)}) меньше, чем кластеров ({k})")
    return ClusterAssignment.from_labels(seeded_kmeans(embeddings.vectors, k, restarts, seed))
