"""Матрицы попарного сходства сегментов: косинусное и многоядерное"""
import logging
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .embeddings import EmbeddingSet
from .errors import ValidationError

logger = logging.getLogger(__name__)


class KernelId(str, Enum):
    """Ядра сходства для многоядерной матрицы"""
    POLY1 = "poly1"
    POLY2 = "poly2"
    POLY3 = "poly3"
    POLY4 = "poly4"
    ARCCOS0 = "arccos0"
    ARCCOS1 = "arccos1"

    @property
    def is_polynomial(self) -> bool:
        return self.value.startswith("poly")

    @property
    def degree(self) -> int:
        return int(self.value[-1])


ALL_KERNELS = tuple(KernelId)


def _cosine(embeddings: EmbeddingSet) -> np.ndarray:
    if len(embeddings) < 2:
        raise ValidationError(f"{embeddings.recording_id}: меньше двух сегментов, кластеризовать нечего")
    v = embeddings.vectors
    s = v @ v.T
    s = (s + s.T) / 2
    return np.clip(s, -1.0, 1.0)


def _finalize(values: np.ndarray) -> np.ndarray:
    values = np.clip(values, 0.0, 1.0)
    np.fill_diagonal(values, 0.0)
    return values


def cosine_affinity(embeddings: EmbeddingSet) -> np.ndarray:
    """Сходство (1 + cos) / 2 с нулевой диагональю"""
    return _finalize((1 + _cosine(embeddings)) / 2)


def kernel_affinity(embeddings: EmbeddingSet, kernel: KernelId) -> np.ndarray:
    """
    Полиномиальные ядра: ((1 + s) / 2)^d
    Арккосинусные ядра: k0 = 1 - θ/π, k1 = (sin θ + (π - θ) cos θ) / π
    """
    kernel = KernelId(kernel)
    s = _cosine(embeddings)
    if kernel.is_polynomial:
        values = ((1 + s) / 2) ** kernel.degree
    else:
        theta = np.arccos(s)
        if kernel is KernelId.ARCCOS0:
            values = 1 - theta / np.pi
        else:
            values = (np.sin(theta) + (np.pi - theta) * np.cos(theta)) / np.pi
    return _finalize(values)


def fuse_kernels(matrices: Sequence[np.ndarray], weights: Optional[Sequence[float]] = None) -> np.ndarray:
    """Среднее матриц после мин-макс нормировки внедиагональных элементов"""
    if len(matrices) == 0:
        raise ValidationError("нет матриц для объединения")
    shape = np.shape(matrices[0])
    if len(shape) != 2 or shape[0] != shape[1] or shape[0] < 2:
        raise ValidationError(f"ожидалась квадратная матрица n×n, n ≥ 2, получено {shape}")
    if any(np.shape(m) != shape for m in matrices):
        raise ValidationError("матрицы разного размера")

    if weights is None:
        w = np.full(len(matrices), 1 / len(matrices))
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape != (len(matrices),) or np.any(w < 0) or w.sum() <= 0:
            raise ValidationError("веса ядер должны быть неотрицательны, по одному на матрицу")
        w = w / w.sum()

    off = ~np.eye(shape[0], dtype=bool)
    rescaled = []
    for m in matrices:
        m = np.asarray(m, dtype=float)
        lo, hi = m[off].min(), m[off].max()
        if hi > lo:
            r = (m - lo) / (hi - lo)
        else:
            r = np.full(shape, 0.5)
        rescaled.append(r)
    fused = np.tensordot(w, np.stack(rescaled), axes=1)
    return _finalize(fused)


def multi_kernel_affinity(embeddings: EmbeddingSet, kernels: Sequence[KernelId] = ALL_KERNELS,
                          weights: Optional[Sequence[float]] = None) -> np.ndarray:
    kernels = [KernelId(k) for k in kernels]
    logger.debug("Объединение ядер: %s", ", ".join(k.value for k in kernels))
    return fuse_kernels([kernel_affinity(embeddings, k) for k in kernels], weights)


def check_affinity(values: np.ndarray, atol: float = 1e-12) -> None:
    """Проверка инвариантов матрицы сходства"""
    values = np.asarray(values)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ValidationError(f"матрица сходства не квадратная: {values.shape}")
    if not np.allclose(values, values.T, rtol=0, atol=atol):
        raise ValidationError("матрица сходства не симметрична")
    if np.any(np.diag(values) != 0):
        raise ValidationError("ненулевая диагональ матрицы сходства")
    if np.any(values < 0) or np.any(values > 1):
        raise ValidationError("элементы матрицы сходства вне [0, 1]")
