"""Разреживание матрицы сходства до графа ближайших соседей"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ValidationError

logger = logging.getLogger(__name__)

STRATEGIES = ("fixed_k", "top_p", "pna")
SYMMETRIZE_MODES = ("max", "min")


@dataclass(frozen=True)
class PruningSpec:
    """Стратегия разреживания и её параметры"""
    strategy: str
    k: Optional[int] = None
    p: Optional[float] = None
    tau: float = 0.20
    min_keep: int = 2
    symmetrize: str = "max"

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValidationError(f"неизвестная стратегия разреживания: {self.strategy}")
        if self.strategy == "fixed_k" and (self.k is None or self.k < 1):
            raise ValidationError("fixed_k требует k ≥ 1")
        if self.strategy == "top_p" and (self.p is None or not 0 < self.p <= 1):
            raise ValidationError("top_p требует 0 < p ≤ 1")
        if not 0 < self.tau <= 1:
            raise ValidationError("tau должно лежать в (0, 1]")
        if self.min_keep < 1:
            raise ValidationError("min_keep должно быть положительным")
        if self.symmetrize not in SYMMETRIZE_MODES:
            raise ValidationError(f"неизвестный способ симметризации: {self.symmetrize}")


def _as_matrix(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"ожидалась квадратная матрица, получено {a.shape}")
    if len(a) < 2:
        raise ValidationError("меньше двух сегментов, разреживать нечего")
    return a


def _ceil(x: float) -> int:
    return math.ceil(x - 1e-9)


def _keep_top(a: np.ndarray, counts: np.ndarray, symmetrize: str) -> np.ndarray:
    """Оставить в строке i counts[i] наибольших внедиагональных элементов"""
    n = len(a)
    work = a.copy()
    np.fill_diagonal(work, -np.inf)
    # при равенстве выигрывает меньший номер столбца
    order = np.argsort(-work, axis=1, kind="stable")
    mask = np.zeros((n, n), dtype=bool)
    for i in range(n):
        mask[i, order[i, :min(int(counts[i]), n - 1)]] = True
    kept = np.where(mask, a, 0.0)
    if symmetrize == "min":
        return np.minimum(kept, kept.T)
    return np.maximum(kept, kept.T)


def prune_fixed_k(a: np.ndarray, k: int, symmetrize: str = "max") -> np.ndarray:
    a = _as_matrix(a)
    if k < 1:
        raise ValidationError("k должно быть ≥ 1")
    return _keep_top(a, np.full(len(a), k), symmetrize)


def prune_top_p(a: np.ndarray, p: float, min_keep: int = 2, symmetrize: str = "max") -> np.ndarray:
    """Доля p ближайших соседей каждой вершины, но не меньше min_keep"""
    a = _as_matrix(a)
    if not 0 < p <= 1:
        raise ValidationError("p должно лежать в (0, 1]")
    count = max(_ceil(p * (len(a) - 1)), min_keep)
    logger.debug("top_p: n=%d, p=%g, оставляем %d соседей", len(a), p, count)
    return _keep_top(a, np.full(len(a), count), symmetrize)


def two_means_split(scores: np.ndarray) -> np.ndarray:
    """
    Точное разбиение одномерной выборки на две группы с минимальной
    внутригрупповой суммой квадратов. Возвращает маску группы с большим средним.
    Постоянная выборка целиком относится к верхней группе.
    """
    x = np.asarray(scores, dtype=float).reshape(-1)
    n = len(x)
    mask = np.ones(n, dtype=bool)
    if n < 2:
        return mask
    order = np.argsort(x, kind="stable")
    xs = x[order]
    if xs[0] == xs[-1]:
        return mask
    c1 = np.cumsum(xs)
    c2 = np.cumsum(xs ** 2)
    # разрез только между различными значениями
    cuts = np.flatnonzero(xs[1:] > xs[:-1]) + 1
    low_n = cuts
    high_n = n - cuts
    low_sse = c2[cuts - 1] - c1[cuts - 1] ** 2 / low_n
    high_sum = c1[-1] - c1[cuts - 1]
    high_sse = (c2[-1] - c2[cuts - 1]) - high_sum ** 2 / high_n
    best = int(cuts[np.argmin(low_sse + high_sse)])
    mask[:] = False
    mask[order[best:]] = True
    return mask


def prune_pna(a: np.ndarray, tau: float = 0.20, min_keep: int = 2, symmetrize: str = "max") -> np.ndarray:
    """Доля tau от оценённой группы «тот же диктор» в каждой строке"""
    a = _as_matrix(a)
    if not 0 < tau <= 1:
        raise ValidationError("tau должно лежать в (0, 1]")
    n = len(a)
    counts = np.empty(n, dtype=int)
    for i in range(n):
        same = two_means_split(np.delete(a[i], i))
        counts[i] = max(_ceil(tau * int(same.sum())), min_keep)
    return _keep_top(a, counts, symmetrize)


def prune(a: np.ndarray, spec: PruningSpec) -> np.ndarray:
    if spec.strategy == "fixed_k":
        return prune_fixed_k(a, spec.k, spec.symmetrize)
    if spec.strategy == "top_p":
        return prune_top_p(a, spec.p, spec.min_keep, spec.symmetrize)
    return prune_pna(a, spec.tau, spec.min_keep, spec.symmetrize)
