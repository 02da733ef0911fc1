"""Признаки записей корпуса (SP, OVP, ADP, ADF3, SNR, STM) и их средние с 95% доверительными интервалами"""
import logging
import math
from dataclasses import asdict, dataclass
from typing import Dict, Iterator, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import stats

from .acoustics import (HOP, estimate_f3_track, estimate_pitch_track, frame_centers_ms,
                        frame_energy)
from .errors import ValidationError
from .rttm import Timeline, overlap_regions, speaker_intervals, speech_union

logger = logging.getLogger(__name__)

FEATURES = ("sp", "ovp", "adp", "adf3", "snr", "stm")
FEATURE_COLUMNS = ["recording_id", "duration", "sp", "ovp", "adp", "adf3", "snr", "stm"]
SUMMARY_COLUMNS = ["feature", "mean", "ci95_halfwidth", "count"]
STM_MODES = ("changes", "turns")
OVP_BASES = ("file", "speech")
CI_METHODS = ("normal", "t")

Audio = Tuple[np.ndarray, int]


@dataclass(frozen=True)
class RecordingFeatures:
    recording_id: str
    duration: float
    sp: float
    ovp: float
    stm: float
    adp: Optional[float] = None
    adf3: Optional[float] = None
    snr: Optional[float] = None


@dataclass(frozen=True)
class FeatureStat:
    mean: float
    half_width: float
    count: int


@dataclass(frozen=True)
class FeatureSummary:
    """Среднее и полуширина 95% интервала по каждому признаку; None, если значений нет"""
    stats: Dict[str, Optional[FeatureStat]]

    def __getitem__(self, feature: str) -> Optional[FeatureStat]:
        return self.stats[feature]

    def __iter__(self) -> Iterator[str]:
        return iter(self.stats)


def timeline_features(timeline: Timeline, duration: float, stm_mode: str = "changes",
                      ovp_base: str = "file") -> Tuple[float, float, float]:
    """Доля речи и наложений в процентах, смены дикторов в минуту"""
    if not duration > 0:
        raise ValidationError(f"длительность записи должна быть положительной: {duration}")
    if timeline.extent > duration + 5e-4:
        raise ValidationError(f"{timeline.recording_id}: реплики выходят за длительность записи")
    if stm_mode not in STM_MODES or ovp_base not in OVP_BASES:
        raise ValidationError(f"неизвестный режим: {stm_mode}, {ovp_base}")

    speech = speech_union(timeline).duration
    overlap = overlap_regions(timeline).duration
    sp = 100 * speech / duration
    if ovp_base == "speech":
        ovp = 100 * overlap / speech if speech > 0 else 0.0
    else:
        ovp = 100 * overlap / duration

    speakers = [turn.speaker for turn in timeline.turns]
    if stm_mode == "changes":
        events = sum(1 for prev, cur in zip(speakers, speakers[1:]) if cur != prev)
    else:
        events = len(speakers)
    return sp, ovp, events / (duration / 60)


def _median_difference(track: np.ndarray, masks: Sequence[np.ndarray], name: str,
                       recording_id: str) -> Optional[float]:
    medians = []
    for mask in masks:
        values = track[mask & ~np.isnan(track)]
        if not values.size:
            logger.warning("%s: у диктора нет вокализованных кадров, %s не определён", recording_id, name)
            return None
        medians.append(float(np.median(values)))
    return abs(medians[0] - medians[1])


def signal_to_noise(samples: np.ndarray, rate: int, timeline: Timeline, hop: float = HOP) -> Optional[float]:
    """10·log10 отношения средней энергии кадров речи к средней энергии кадров вне речи"""
    energy = frame_energy(samples, rate, hop)
    speech = speech_union(timeline).contains(frame_centers_ms(len(energy), hop))
    if not (~speech).any() or not speech.any():
        logger.warning("%s: нет кадров речи или пауз, SNR не определён", timeline.recording_id)
        return None
    signal, noise = energy[speech].mean(), energy[~speech].mean()
    if signal <= 0 or noise <= 0:
        logger.warning("%s: нулевая энергия речи или шума, SNR не определён", timeline.recording_id)
        return None
    return float(10 * np.log10(signal / noise))


def audio_features(samples: np.ndarray, rate: int, timeline: Timeline,
                   hop: float = HOP) -> Tuple[Optional[float], Optional[float], Optional[float]]:
    """Разность медиан тона и F3 двух дикторов по участкам без наложений и SNR"""
    snr = signal_to_noise(samples, rate, timeline, hop)
    speakers = timeline.speakers
    if len(speakers) != 2:
        logger.info("%s: дикторов %d, ADP и ADF3 считаются только для двух", timeline.recording_id, len(speakers))
        return None, None, snr

    pitch = estimate_pitch_track(samples, rate, hop)
    centers = frame_centers_ms(len(pitch), hop)
    overlap = overlap_regions(timeline)
    intervals = speaker_intervals(timeline)
    masks = [intervals[spk].difference(overlap).contains(centers) for spk in speakers]
    adp = _median_difference(pitch, masks, "ADP", timeline.recording_id)
    f3 = estimate_f3_track(samples, rate, hop, voiced=~np.isnan(pitch))
    adf3 = _median_difference(f3, masks, "ADF3", timeline.recording_id)
    return adp, adf3, snr


def recording_features(recording_id: str, timeline: Timeline, duration: float, audio: Optional[Audio] = None,
                       stm_mode: str = "changes", ovp_base: str = "file") -> RecordingFeatures:
    sp, ovp, stm = timeline_features(timeline, duration, stm_mode, ovp_base)
    adp = adf3 = snr = None
    if audio is not None:
        adp, adf3, snr = audio_features(audio[0], audio[1], timeline)
    return RecordingFeatures(recording_id, duration, sp, ovp, stm, adp, adf3, snr)


def summarize(features: Sequence[RecordingFeatures], ci: str = "normal") -> FeatureSummary:
    """Среднее и полуширина 95% интервала; одна запись даёт нулевую полуширину"""
    if not features:
        raise ValidationError("нет записей для сводки")
    if ci not in CI_METHODS:
        raise ValidationError(f"неизвестный способ интервала: {ci}")
    result: Dict[str, Optional[FeatureStat]] = {}
    for name in FEATURES:
        values = np.array([getattr(f, name) for f in features if getattr(f, name) is not None], dtype=float)
        count = len(values)
        if count == 0:
            result[name] = None
            continue
        half_width = 0.0
        if count > 1:
            quantile = 1.96 if ci == "normal" else float(stats.t.ppf(0.975, count - 1))
            half_width = quantile * float(np.std(values, ddof=1)) / math.sqrt(count)
        result[name] = FeatureStat(float(np.mean(values)), half_width, count)
    return FeatureSummary(result)


def features_frame(features: Sequence[RecordingFeatures]) -> pd.DataFrame:
    rows = [asdict(f) for f in features]
    return pd.DataFrame(rows, columns=FEATURE_COLUMNS).astype({c: float for c in FEATURE_COLUMNS[1:]})


def summary_frame(summary: FeatureSummary) -> pd.DataFrame:
    rows = []
    for name in summary:
        stat = summary[name]
        if stat is None:
            rows.append([name, np.nan, np.nan, 0])
        else:
            rows.append([name, stat.mean, stat.half_width, stat.count])
    return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)
