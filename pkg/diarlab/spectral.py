"""Спектральная кластеризация: нормированный лапласиан, оценка числа дикторов по eigengap"""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import eigh

from .assignment import ClusterAssignment, seeded_kmeans
from .errors import ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpectralConfig:
    num_speakers: Optional[int] = 2
    max_speakers: int = 8
    kmeans_restarts: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.max_speakers < 1 or self.kmeans_restarts < 1:
            raise ValidationError("max_speakers и kmeans_restarts должны быть положительными")
        if self.num_speakers is not None:
            if self.num_speakers < 1:
                raise ValidationError("num_speakers должно быть положительным")
            if self.num_speakers > self.max_speakers:
                raise ValidationError("num_speakers больше max_speakers")


def normalized_laplacian(a: np.ndarray) -> np.ndarray:
    """L = I - D^(-1/2) A D^(-1/2)"""
    a = np.asarray(a, dtype=float)
    degree = a.sum(axis=1)
    isolated = np.flatnonzero(degree <= 0)
    if isolated.size:
        raise ValidationError(f"изолированная вершина графа: {isolated[0]}")
    scale = 1 / np.sqrt(degree)
    lap = np.eye(len(a)) - scale[:, None] * a * scale[None, :]
    return (lap + lap.T) / 2


def laplacian_spectrum(a: np.ndarray, count: int) -> Tuple[np.ndarray, np.ndarray]:
    """count наименьших собственных пар лапласиана по возрастанию"""
    lap = normalized_laplacian(a)
    count = min(count, len(lap))
    return eigh(lap, subset_by_index=[0, count - 1])


def estimate_num_speakers(eigenvalues: np.ndarray, max_speakers: int) -> int:
    """Позиция наибольшего скачка среди первых max_speakers + 1 собственных значений"""
    values = np.asarray(eigenvalues, dtype=float)
    if max_speakers < 1:
        raise ValidationError("max_speakers должно быть положительным")
    if len(values) < max_speakers + 1:
        raise ValidationError(f"нужно не меньше {max_speakers + 1} собственных значений, получено {len(values)}")
    return int(np.argmax(np.diff(values[:max_speakers + 1]))) + 1


def spectral_embedding(a: np.ndarray, num_clusters: int) -> np.ndarray:
    """Собственные векторы num_clusters наименьших собственных значений, строки нормированы"""
    _, vectors = laplacian_spectrum(a, num_clusters)
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    return np.divide(vectors, norms, out=np.zeros_like(vectors), where=norms > 0)


def spectral_cluster(a: np.ndarray, cfg: SpectralConfig) -> ClusterAssignment:
    a = np.asarray(a, dtype=float)
    n = len(a)
    if cfg.num_speakers is None:
        if n < 2:
            raise ValidationError("меньше двух сегментов")
        max_k = min(cfg.max_speakers, n - 1)
        values, _ = laplacian_spectrum(a, max_k + 1)
        k = estimate_num_speakers(values, max_k)
        logger.info("Оценка числа дикторов по eigengap: %d", k)
    else:
        k = cfg.num_speakers
    if n < k:
        raise ValidationError(f"сегментов ({n}) меньше, чем дикторов ({k})")

    embedding = spectral_embedding(a, k)
    nonzero = np.any(embedding != 0, axis=1)
    labels = np.zeros(n, dtype=int)
    if nonzero.any():
        points = embedding[nonzero]
        labels[nonzero] = seeded_kmeans(points, min(k, len(points)), cfg.kmeans_restarts, cfg.seed)
    return ClusterAssignment.from_labels(labels)
