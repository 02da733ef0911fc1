"""DER: пропуск речи, ложная тревога и путаница дикторов при оптимальном сопоставлении"""
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.optimize import linear_sum_assignment

from .errors import ValidationError
from .rttm import IntervalSet, Timeline, homogeneous_regions, speaker_intervals, to_ms

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ["recording_id", "ref_speech", "missed", "false_alarm", "confusion", "der"]
DELTA_COLUMNS = ["recording_id", "der_a", "der_b", "delta"]
TOTAL = "TOTAL"

_COLLAR = ("collar",)


@dataclass(frozen=True)
class ScoringConfig:
    collar: float = 0.0
    score_overlap: bool = True

    def __post_init__(self):
        if not self.collar >= 0:
            raise ValidationError(f"воротник должен быть неотрицательным: {self.collar}")


@dataclass(frozen=True)
class DerBreakdown:
    """Составляющие ошибки в секундах; речь эталона считается с кратностью наложений"""
    recording_id: str
    ref_speech: float
    missed: float
    false_alarm: float
    confusion: float
    hypothesis_missing: bool = False

    @property
    def errors(self) -> float:
        return self.missed + self.false_alarm + self.confusion

    @property
    def der(self) -> float:
        if self.ref_speech > 0:
            return self.errors / self.ref_speech
        return 0.0 if self.errors == 0 else float("inf")


@dataclass(frozen=True)
class _Region:
    length: int
    ref: frozenset
    hyp: frozenset


def _scored_regions(ref: Timeline, hyp: Timeline, cfg: ScoringConfig) -> List[_Region]:
    layers: Dict[tuple, IntervalSet] = {}
    for spk, intervals in speaker_intervals(ref).items():
        layers[("ref", spk)] = intervals
    for spk, intervals in speaker_intervals(hyp).items():
        layers[("hyp", spk)] = intervals
    collar_ms = to_ms(cfg.collar)
    if collar_ms > 0:
        bounds = {b for turn in ref.turns for b in (turn.onset_ms, turn.offset_ms)}
        layers[_COLLAR] = IntervalSet.from_ms((max(0, b - collar_ms), b + collar_ms) for b in bounds)

    regions = []
    for start, end, active in homogeneous_regions(layers):
        if _COLLAR in active:
            continue
        ref_active = frozenset(label[1] for label in active if label[0] == "ref")
        hyp_active = frozenset(label[1] for label in active if label[0] == "hyp")
        if not ref_active and not hyp_active:
            continue
        if not cfg.score_overlap and len(ref_active) >= 2:
            continue
        regions.append(_Region(end - start, ref_active, hyp_active))
    return regions


def _speaker_map(ref: Timeline, hyp: Timeline, regions: Sequence[_Region]) -> Dict[str, str]:
    ref_speakers, hyp_speakers = ref.speakers, hyp.speakers
    if not ref_speakers or not hyp_speakers:
        return {}
    ref_index = {spk: i for i, spk in enumerate(ref_speakers)}
    hyp_index = {spk: j for j, spk in enumerate(hyp_speakers)}
    overlap = np.zeros((len(ref_speakers), len(hyp_speakers)))
    for region in regions:
        for r in region.ref:
            for h in region.hyp:
                overlap[ref_index[r], hyp_index[h]] += region.length
    rows, cols = linear_sum_assignment(overlap, maximize=True)
    return {hyp_speakers[j]: ref_speakers[i] for i, j in zip(rows, cols) if overlap[i, j] > 0}


def optimal_speaker_map(ref: Timeline, hyp: Timeline, cfg: Optional[ScoringConfig] = None) -> Dict[str, str]:
    """Взаимно однозначное отображение дикторов гипотезы в дикторов эталона с максимальным совпадением"""
    cfg = cfg or ScoringConfig()
    return _speaker_map(ref, hyp, _scored_regions(ref, hyp, cfg))


def score_file(ref: Timeline, hyp: Timeline, cfg: Optional[ScoringConfig] = None,
               hypothesis_missing: bool = False) -> DerBreakdown:
    cfg = cfg or ScoringConfig()
    if ref.recording_id != hyp.recording_id:
        raise ValidationError(f"разные записи: {ref.recording_id} и {hyp.recording_id}")
    regions = _scored_regions(ref, hyp, cfg)
    mapping = _speaker_map(ref, hyp, regions)

    ref_speech = missed = false_alarm = confusion = 0
    for region in regions:
        r, h = len(region.ref), len(region.hyp)
        correct = sum(1 for spk in region.hyp if mapping.get(spk) in region.ref)
        ref_speech += r * region.length
        missed += max(0, r - h) * region.length
        false_alarm += max(0, h - r) * region.length
        confusion += (min(r, h) - correct) * region.length
    return DerBreakdown(ref.recording_id, ref_speech / 1000, missed / 1000, false_alarm / 1000,
                        confusion / 1000, hypothesis_missing)


def aggregate(per_file: Sequence[DerBreakdown]) -> DerBreakdown:
    """Суммы составляющих по файлам; DER пересчитывается из сумм"""
    return DerBreakdown(
        TOTAL,
        sum(d.ref_speech for d in per_file),
        sum(d.missed for d in per_file),
        sum(d.false_alarm for d in per_file),
        sum(d.confusion for d in per_file),
        any(d.hypothesis_missing for d in per_file),
    )


def score_pair(ref: Timeline, hyp: Optional[Timeline], cfg: Optional[ScoringConfig] = None) -> DerBreakdown:
    """Оценка одного файла; отсутствующая гипотеза считается пустой"""
    if hyp is None:
        logger.warning("%s: нет гипотезы, вся речь считается пропущенной", ref.recording_id)
        return score_file(ref, Timeline(ref.recording_id), cfg, hypothesis_missing=True)
    return score_file(ref, hyp, cfg)


def score_corpus(pairs: Sequence[Tuple[Timeline, Optional[Timeline]]],
                 cfg: Optional[ScoringConfig] = None) -> Tuple[List[DerBreakdown], DerBreakdown]:
    """Пофайловые оценки и итог, пересчитанный из суммарных времён"""
    if not pairs:
        raise ValidationError("нет файлов для оценки")
    per_file = [score_pair(ref, hyp, cfg) for ref, hyp in pairs]
    return per_file, aggregate(per_file)


def pair_up(refs: Mapping[str, Timeline], hyps: Mapping[str, Timeline]) -> List[Tuple[Timeline, Optional[Timeline]]]:
    """Пары (эталон, гипотеза) в порядке идентификаторов записей"""
    extra = sorted(set(hyps) - set(refs))
    if extra:
        logger.warning("Гипотезы без эталона пропущены: %s", ", ".join(extra))
    return [(refs[rec], hyps.get(rec)) for rec in sorted(refs)]


def report_frame(per_file: Sequence[DerBreakdown], total: DerBreakdown, per_file_rows: bool = True) -> pd.DataFrame:
    rows = list(per_file) if per_file_rows else []
    rows.append(total)
    return pd.DataFrame(
        [[d.recording_id, d.ref_speech, d.missed, d.false_alarm, d.confusion, d.der] for d in rows],
        columns=REPORT_COLUMNS,
    )


def _der_by_id(results: Union[Mapping[str, float], Iterable[DerBreakdown]]) -> Dict[str, float]:
    if isinstance(results, Mapping):
        return {rec: (v.der if isinstance(v, DerBreakdown) else float(v)) for rec, v in results.items()}
    return {d.recording_id: d.der for d in results}


def delta_report(a, b, exclude: Iterable[str] = ()) -> pd.DataFrame:
    """Разность DER двух систем по файлам, по убыванию; положительная разность в пользу системы b"""
    der_a, der_b = _der_by_id(a), _der_by_id(b)
    if set(der_a) != set(der_b):
        only_a = sorted(set(der_a) - set(der_b))
        only_b = sorted(set(der_b) - set(der_a))
        raise ValidationError(f"наборы записей не совпадают: только в a {only_a}, только в b {only_b}")
    exclude = set(exclude)
    ids = [rec for rec in der_a if rec not in exclude]
    table = pd.DataFrame({
        "recording_id": ids,
        "der_a": [der_a[rec] for rec in ids],
        "der_b": [der_b[rec] for rec in ids],
    })
    table["delta"] = table["der_a"] - table["der_b"]
    order = np.argsort(-table["delta"].to_numpy(), kind="stable")
    return table.iloc[order].reset_index(drop=True)[DELTA_COLUMNS]


def relative_improvement(der_baseline: float, der_system: float) -> float:
    """Относительное снижение DER системы по сравнению с базовой"""
    if der_baseline <= 0:
        raise ValidationError("DER базовой системы должен быть положительным")
    return (der_baseline - der_system) / der_baseline
