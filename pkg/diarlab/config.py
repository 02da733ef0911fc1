"""Конфигурация запуска: метод кластеризации, его параметры и файлы настроек YAML"""
import logging
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import yaml

from .affinity import ALL_KERNELS, KernelId
from .errors import ValidationError

logger = logging.getLogger(__name__)

METHODS = ("ahc", "kmeans", "sc-fixed", "sc-adapt", "sc-pna", "sc-mk")

# параметры, допустимые для каждого метода
METHOD_PARAMS = {
    "ahc": ("linkage", "threshold", "target_k"),
    "kmeans": (),
    "sc-fixed": ("k",),
    "sc-adapt": ("p", "min_keep"),
    "sc-pna": ("tau", "min_keep"),
    "sc-mk": ("k", "kernels", "kernel_weights"),
}

METHOD_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "ahc": {"linkage": "average"},
    "kmeans": {},
    "sc-fixed": {"k": 10},
    "sc-adapt": {"p": 0.01, "min_keep": 2},
    "sc-pna": {"tau": 0.20, "min_keep": 2},
    "sc-mk": {"k": 15, "kernels": tuple(k.value for k in ALL_KERNELS)},
}


@dataclass(frozen=True)
class RunConfig:
    """Одна строка сетки экспериментов: метод, параметры, число дикторов, зерно, сглаживание"""
    method: str = "ahc"
    k: Optional[int] = None
    p: Optional[float] = None
    tau: Optional[float] = None
    min_keep: Optional[int] = None
    linkage: Optional[str] = None
    threshold: Optional[float] = None
    target_k: Optional[int] = None
    kernels: Optional[Tuple[str, ...]] = None
    kernel_weights: Optional[Tuple[float, ...]] = None
    num_speakers: Optional[int] = 2
    max_speakers: int = 8
    restarts: int = 10
    seed: int = 0
    symmetrize: str = "max"
    smooth_window: Optional[int] = None
    hop: float = 0.01

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValidationError(f"неизвестный метод: {self.method}")
        allowed = METHOD_PARAMS[self.method]
        for name in ("k", "p", "tau", "min_keep", "linkage", "threshold", "target_k", "kernels", "kernel_weights"):
            if getattr(self, name) is not None and name not in allowed:
                raise ValidationError(f"параметр {name} не используется методом {self.method}")
        if self.smooth_window is not None and (self.smooth_window < 1 or self.smooth_window % 2 == 0):
            raise ValidationError(f"окно сглаживания должно быть нечётным и ≥ 1: {self.smooth_window}")
        if self.num_speakers is not None and self.num_speakers < 1:
            raise ValidationError("число дикторов должно быть положительным")
        if self.kernels is not None:
            for kernel in self.kernels:
                KernelId(kernel)
        if self.kernel_weights is not None and self.kernels is not None \
                and len(self.kernel_weights) != len(self.kernels):
            raise ValidationError("число весов не совпадает с числом ядер")
        if not self.hop > 0:
            raise ValidationError("шаг кадра должен быть положительным")

    def with_defaults(self) -> "RunConfig":
        """Незаданные параметры метода заполняются значениями по умолчанию"""
        missing = {name: value for name, value in METHOD_DEFAULTS[self.method].items()
                   if getattr(self, name) is None}
        return replace(self, **missing)


CONFIG_FIELDS = {f.name for f in fields(RunConfig)}


def load_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """YAML-словарь; ключи совпадают с длинными флагами, дефисы допускаются"""
    with open(path, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: ожидался словарь ключ-значение")
    normalized = {str(key).replace("-", "_"): value for key, value in data.items()}
    logger.debug("Настройки из %s: %s", path, sorted(normalized))
    return normalized


def run_config_from_mapping(values: Dict[str, Any]) -> RunConfig:
    """RunConfig из словаря (флаги или YAML); None означает «не задано»"""
    unknown = sorted(set(values) - CONFIG_FIELDS)
    if unknown:
        raise ValidationError(f"неизвестные параметры: {', '.join(unknown)}")
    given = {key: value for key, value in values.items() if value is not None}
    for key in ("kernels", "kernel_weights"):
        if isinstance(given.get(key), str):
            given[key] = [item.strip() for item in given[key].split(",") if item.strip()]
    if "kernels" in given:
        given["kernels"] = tuple(str(k) for k in given["kernels"])
    if "kernel_weights" in given:
        given["kernel_weights"] = tuple(float(w) for w in given["kernel_weights"])
    if given.get("num_speakers") == "auto":
        given["num_speakers"] = None
    return RunConfig(**given).with_defaults()
