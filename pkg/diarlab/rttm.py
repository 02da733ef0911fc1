"""Чтение и запись RTTM, алгебра интервалов над таймлайнами дикторов"""
import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Dict, FrozenSet, Hashable, Iterable, Iterator, List, Mapping, Sequence, Tuple, Union

import numpy as np

from .errors import ParseError, ValidationError

logger = logging.getLogger(__name__)

RTTM_FIELDS = 10
NA = "<NA>"

Region = Tuple[int, int, FrozenSet[Hashable]]


def to_ms(seconds: float) -> int:
    """Перевод секунд в целые миллисекунды"""
    return int(round(seconds * 1000))


@dataclass(frozen=True)
class Turn:
    """Реплика диктора: строка SPEAKER из RTTM"""
    recording_id: str
    onset: float
    duration: float
    speaker: str

    def __post_init__(self):
        if not self.speaker:
            raise ValidationError("пустая метка диктора")
        if not self.onset >= 0:
            raise ValidationError(f"начало реплики должно быть неотрицательным: {self.onset}")
        if not self.duration > 0:
            raise ValidationError(f"длительность реплики должна быть положительной: {self.duration}")

    @property
    def offset(self) -> float:
        return self.onset + self.duration

    @property
    def onset_ms(self) -> int:
        return to_ms(self.onset)

    @property
    def offset_ms(self) -> int:
        return to_ms(self.onset + self.duration)


def _turn_key(turn: Turn) -> Tuple[float, str, float]:
    return turn.onset, turn.speaker, turn.duration


@dataclass(frozen=True)
class Timeline:
    """Упорядоченные реплики одной записи"""
    recording_id: str
    turns: Tuple[Turn, ...] = ()

    def __post_init__(self):
        turns = tuple(sorted(self.turns, key=_turn_key))
        for turn in turns:
            if turn.recording_id != self.recording_id:
                raise ValidationError(
                    f"реплика записи {turn.recording_id} в таймлайне {self.recording_id}"
                )
        object.__setattr__(self, "turns", turns)

    def __len__(self) -> int:
        return len(self.turns)

    def __iter__(self) -> Iterator[Turn]:
        return iter(self.turns)

    @property
    def speakers(self) -> Tuple[str, ...]:
        return tuple(sorted({turn.speaker for turn in self.turns}))

    @property
    def extent(self) -> float:
        return max((turn.offset for turn in self.turns), default=0.0)


@dataclass(frozen=True)
class IntervalSet:
    """Непересекающиеся несмежные полуинтервалы [start, end) в миллисекундах"""
    intervals: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        intervals = tuple((int(s), int(e)) for s, e in self.intervals)
        for start, end in intervals:
            if end <= start:
                raise ValidationError(f"пустой интервал [{start}, {end})")
        for (_, prev_end), (next_start, _) in zip(intervals, intervals[1:]):
            if not prev_end < next_start:
                raise ValidationError("интервалы должны быть упорядочены и не соприкасаться")
        object.__setattr__(self, "intervals", intervals)

    @classmethod
    def from_ms(cls, pairs: Iterable[Tuple[int, int]]) -> "IntervalSet":
        """Объединение произвольных интервалов; смежные склеиваются"""
        merged: List[List[int]] = []
        for start, end in sorted((int(s), int(e)) for s, e in pairs if e > s):
            if merged and start <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], end)
            else:
                merged.append([start, end])
        return cls(tuple((s, e) for s, e in merged))

    @classmethod
    def from_seconds(cls, pairs: Iterable[Tuple[float, float]]) -> "IntervalSet":
        return cls.from_ms((to_ms(s), to_ms(e)) for s, e in pairs)

    def __len__(self) -> int:
        return len(self.intervals)

    def __iter__(self) -> Iterator[Tuple[int, int]]:
        return iter(self.intervals)

    @property
    def total_ms(self) -> int:
        return sum(end - start for start, end in self.intervals)

    @property
    def duration(self) -> float:
        """Суммарная длительность в секундах"""
        return self.total_ms / 1000

    def as_seconds(self) -> List[Tuple[float, float]]:
        return [(start / 1000, end / 1000) for start, end in self.intervals]

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet.from_ms(self.intervals + other.intervals)

    def intersection(self, other: "IntervalSet") -> "IntervalSet":
        result = []
        i = j = 0
        while i < len(self.intervals) and j < len(other.intervals):
            a_start, a_end = self.intervals[i]
            b_start, b_end = other.intervals[j]
            start, end = max(a_start, b_start), min(a_end, b_end)
            if start < end:
                result.append((start, end))
            if a_end < b_end:
                i += 1
            else:
                j += 1
        return IntervalSet.from_ms(result)

    def difference(self, other: "IntervalSet") -> "IntervalSet":
        result = []
        j = 0
        for start, end in self.intervals:
            while j < len(other.intervals) and other.intervals[j][1] <= start:
                j += 1
            cursor = start
            k = j
            while k < len(other.intervals) and other.intervals[k][0] < end:
                cut_start, cut_end = other.intervals[k]
                if cut_start > cursor:
                    result.append((cursor, cut_start))
                cursor = max(cursor, cut_end)
                k += 1
            if cursor < end:
                result.append((cursor, end))
        return IntervalSet.from_ms(result)

    def contains(self, points_ms: np.ndarray) -> np.ndarray:
        """Маска точек (в миллисекундах), попавших внутрь множества"""
        points = np.asarray(points_ms, dtype=float)
        if not self.intervals:
            return np.zeros(points.shape, dtype=bool)
        starts = np.array([s for s, _ in self.intervals], dtype=float)
        ends = np.array([e for _, e in self.intervals], dtype=float)
        idx = np.searchsorted(starts, points, side="right") - 1
        inside = idx >= 0
        inside[inside] = points[inside] < ends[idx[inside]]
        return inside


# --- Разбор и сериализация ---
def _read_text(data: Union[bytes, str, IO]) -> str:
    if hasattr(data, "read"):
        data = data.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return data


def parse_rttm(data: Union[bytes, str, IO]) -> Dict[str, Timeline]:
    """Разбор RTTM: строки SPEAKER превращаются в реплики, прочие пропускаются"""
    grouped: Dict[str, List[Turn]] = defaultdict(list)
    for line_number, line in enumerate(_read_text(data).split("\n"), 1):
        fields = line.rstrip("\r").split()
        if not fields or fields[0] != "SPEAKER":
            continue
        if len(fields) != RTTM_FIELDS:
            raise ParseError(f"ожидалось {RTTM_FIELDS} полей, получено {len(fields)}", line_number)
        try:
            onset = float(fields[3])
            duration = float(fields[4])
        except ValueError:
            raise ParseError(f"нечисловое время: {fields[3]!r} {fields[4]!r}", line_number) from None
        if not (math.isfinite(onset) and math.isfinite(duration)):
            raise ParseError("бесконечное или неопределённое время", line_number)
        if duration <= 0:
            raise ParseError(f"неположительная длительность {duration}", line_number)
        try:
            grouped[fields[1]].append(Turn(fields[1], onset, duration, fields[7]))
        except ValidationError as e:
            raise ParseError(str(e), line_number) from None
    return {rec: Timeline(rec, tuple(grouped[rec])) for rec in sorted(grouped)}


def serialize_rttm(timelines: Sequence[Timeline]) -> bytes:
    """Строки SPEAKER на миллисекундной сетке; реплики, пустые после округления, опускаются"""
    lines = []
    for timeline in timelines:
        for turn in timeline.turns:
            onset_ms, offset_ms = turn.onset_ms, turn.offset_ms
            if offset_ms <= onset_ms:
                logger.debug("%s: реплика %s короче миллисекунды пропущена", turn.recording_id, turn.speaker)
                continue
            lines.append(
                f"SPEAKER {turn.recording_id} 1 {onset_ms / 1000:.3f} {(offset_ms - onset_ms) / 1000:.3f} "
                f"{NA} {NA} {turn.speaker} {NA} {NA}\n"
            )
    return "".join(lines).encode("utf-8")


def read_rttm(path: Union[str, Path]) -> Dict[str, Timeline]:
    """Чтение файла RTTM или всех *.rttm из каталога"""
    path = Path(path)
    files = sorted(path.glob("*.rttm")) if path.is_dir() else [path]
    turns: Dict[str, List[Turn]] = defaultdict(list)
    for file in files:
        logger.debug("Чтение %s", file)
        for rec, timeline in parse_rttm(file.read_bytes()).items():
            turns[rec].extend(timeline.turns)
    return {rec: Timeline(rec, tuple(turns[rec])) for rec in sorted(turns)}


def write_rttm(target: Union[str, Path, IO], timelines: Sequence[Timeline]) -> None:
    payload = serialize_rttm(timelines)
    if hasattr(target, "write"):
        target.write(payload)
    else:
        Path(target).write_bytes(payload)


# --- Алгебра интервалов ---
def speaker_intervals(timeline: Timeline) -> Dict[str, IntervalSet]:
    """Речь каждого диктора как множество интервалов"""
    pairs: Dict[str, List[Tuple[int, int]]] = defaultdict(list)
    for turn in timeline.turns:
        pairs[turn.speaker].append((turn.onset_ms, turn.offset_ms))
    return {spk: IntervalSet.from_ms(pairs[spk]) for spk in sorted(pairs)}


def homogeneous_regions(layers: Mapping[Hashable, IntervalSet]) -> List[Region]:
    """Разбиение оси времени на участки с неизменным набором активных меток"""
    events: Dict[int, List[Tuple[Hashable, bool]]] = defaultdict(list)
    for label, intervals in layers.items():
        for start, end in intervals:
            events[start].append((label, True))
            events[end].append((label, False))
    times = sorted(events)
    active = set()
    regions: List[Region] = []
    for t0, t1 in zip(times, times[1:]):
        for label, starts in events[t0]:
            if starts:
                active.add(label)
            else:
                active.discard(label)
        regions.append((t0, t1, frozenset(active)))
    return regions


def speech_union(timeline: Timeline) -> IntervalSet:
    """Речь любого диктора"""
    return IntervalSet.from_ms((turn.onset_ms, turn.offset_ms) for turn in timeline.turns)


def overlap_regions(timeline: Timeline) -> IntervalSet:
    """Участки, где одновременно говорят не менее двух разных дикторов"""
    regions = homogeneous_regions(speaker_intervals(timeline))
    return IntervalSet.from_ms((start, end) for start, end, active in regions if len(active) >= 2)
