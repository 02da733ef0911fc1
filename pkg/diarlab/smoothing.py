"""Покадровая активность дикторов и временной медианный фильтр"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage

from .errors import ValidationError
from .rttm import Timeline, Turn

logger = logging.getLogger(__name__)

DEFAULT_HOP = 0.01


@dataclass(frozen=True, eq=False)
class FrameActivity:
    """Бинарная матрица активности S×T с шагом hop секунд"""
    recording_id: str
    hop: float
    speakers: Tuple[str, ...]
    activity: np.ndarray

    def __post_init__(self):
        if not self.hop > 0:
            raise ValidationError(f"шаг кадра должен быть положительным: {self.hop}")
        activity = np.array(self.activity, dtype=np.uint8)
        if activity.ndim != 2 or activity.shape[0] != len(self.speakers):
            raise ValidationError(f"ожидалась матрица {len(self.speakers)}×T, получено {activity.shape}")
        if np.any(activity > 1):
            raise ValidationError("активность должна быть бинарной")
        activity.setflags(write=False)
        object.__setattr__(self, "speakers", tuple(self.speakers))
        object.__setattr__(self, "activity", activity)

    @property
    def num_frames(self) -> int:
        return self.activity.shape[1]


@dataclass(frozen=True)
class MedianFilterSpec:
    window: int = 11

    def __post_init__(self):
        if self.window < 1 or self.window % 2 == 0:
            raise ValidationError(f"окно медианного фильтра должно быть нечётным и ≥ 1: {self.window}")


def _hop_ms(hop: float) -> float:
    return round(hop * 1000, 9)


def _frame_bounds(onset_ms: int, offset_ms: int, hop_ms: float) -> Tuple[int, int]:
    """Кадры, чья середина (t + 0.5)·hop лежит в [onset, offset)"""
    first = math.ceil(onset_ms / hop_ms - 0.5 - 1e-9)
    last = math.ceil(offset_ms / hop_ms - 0.5 - 1e-9)
    return max(first, 0), last


def rasterize(timeline: Timeline, hop: float = DEFAULT_HOP, speakers: Optional[Sequence[str]] = None,
              num_frames: Optional[int] = None) -> FrameActivity:
    if not hop > 0:
        raise ValidationError(f"шаг кадра должен быть положительным: {hop}")
    hop_ms = _hop_ms(hop)
    speakers = tuple(speakers) if speakers is not None else timeline.speakers
    if num_frames is None:
        extent_ms = max((turn.offset_ms for turn in timeline.turns), default=0)
        num_frames = math.ceil(extent_ms / hop_ms - 1e-9)
    activity = np.zeros((len(speakers), num_frames), dtype=np.uint8)
    rows = {spk: i for i, spk in enumerate(speakers)}
    for turn in timeline.turns:
        if turn.speaker not in rows:
            raise ValidationError(f"диктор {turn.speaker} отсутствует в списке")
        first, last = _frame_bounds(turn.onset_ms, turn.offset_ms, hop_ms)
        activity[rows[turn.speaker], first:min(last, num_frames)] = 1
    return FrameActivity(timeline.recording_id, hop, speakers, activity)


def median_filter(fa: FrameActivity, spec: MedianFilterSpec) -> FrameActivity:
    """Скользящая медиана по каждой строке; края дополняются повтором крайних значений"""
    if spec.window == 1 or fa.num_frames == 0:
        return fa
    filtered = ndimage.median_filter(fa.activity, size=(1, spec.window), mode="nearest")
    return FrameActivity(fa.recording_id, fa.hop, fa.speakers, filtered)


def _runs(row: np.ndarray) -> List[Tuple[int, int]]:
    padded = np.concatenate([[0], row.astype(np.int8), [0]])
    edges = np.diff(padded)
    return list(zip(np.flatnonzero(edges == 1).tolist(), np.flatnonzero(edges == -1).tolist()))


def derasterize(fa: FrameActivity) -> Timeline:
    """Непрерывные серии активных кадров превращаются в реплики"""
    turns = []
    for speaker, row in zip(fa.speakers, fa.activity):
        for start, end in _runs(row):
            turns.append(Turn(fa.recording_id, round(start * fa.hop, 6), round((end - start) * fa.hop, 6), speaker))
    return Timeline(fa.recording_id, tuple(turns))


def flip_count(activity: np.ndarray) -> np.ndarray:
    """Число переключений 0↔1 в каждой строке"""
    activity = np.asarray(activity, dtype=np.int8)
    if activity.shape[-1] < 2:
        return np.zeros(activity.shape[0], dtype=int)
    return np.abs(np.diff(activity, axis=1)).sum(axis=1)


def smooth_timeline(timeline: Timeline, window: int, hop: float = DEFAULT_HOP) -> Timeline:
    fa = rasterize(timeline, hop)
    smoothed = median_filter(fa, MedianFilterSpec(window))
    logger.debug("%s: переключений до %d, после %d", timeline.recording_id,
                 int(flip_count(fa.activity).sum()), int(flip_count(smoothed.activity).sum()))
    return derasterize(smoothed)
