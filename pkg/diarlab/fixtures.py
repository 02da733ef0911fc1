"""Детерминированные синтетические данные: эмбеддинги, разговоры и звук с известными параметрами"""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.signal import lfilter

from .assignment import ClusterAssignment, canonical_relabel
from .embeddings import EmbeddingSet
from .errors import ValidationError
from .pipeline import assignment_to_timeline
from .rttm import Timeline, Turn, speaker_intervals

logger = logging.getLogger(__name__)

SOURCE_TILT = 0.97


@dataclass(frozen=True)
class AudioSpec:
    """Голосовой источник с тоном f0 через резонаторы, плюс белый шум с заданным SNR"""
    rate: int = 16000
    f0s: Tuple[float, ...] = (120.0, 210.0)
    resonances: Tuple[Tuple[float, ...], ...] = ((500.0, 1500.0, 2500.0),)
    bandwidth: float = 80.0
    snr_db: Optional[float] = 20.0
    amplitude: float = 0.1

    def __post_init__(self):
        if self.rate < 8000:
            raise ValidationError("частота дискретизации должна быть не ниже 8000 Гц")
        if not self.f0s or not self.resonances:
            raise ValidationError("нужны хотя бы один тон и один набор резонансов")
        if self.amplitude < 0:
            raise ValidationError("амплитуда должна быть неотрицательной")
        nyquist = self.rate / 2
        if any(not 0 < f < nyquist for group in self.resonances for f in group):
            raise ValidationError("резонансы должны лежать ниже частоты Найквиста")


@dataclass(frozen=True)
class FixtureSpec:
    seed: int = 0
    recording_id: str = "fixture"
    n_segments: int = 40
    dim: int = 32
    within_cosine: float = 0.9
    across_cosine: float = 0.1
    segment_length: float = 1.5
    duration: float = 300.0
    target_sp: float = 88.14
    target_ovp: float = 4.08
    target_stm: float = 16.0
    audio: Optional[AudioSpec] = field(default=None)


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _orthonormal_to(rng: np.random.Generator, basis: Sequence[np.ndarray], dim: int) -> np.ndarray:
    v = rng.standard_normal(dim)
    for b in basis:
        v = v - (v @ b) * b
    return _unit(v)


def gen_embeddings(spec: FixtureSpec) -> Tuple[EmbeddingSet, np.ndarray]:
    """
    Два кластера единичных векторов. Члены кластера лежат на окружности вокруг центроида
    в случайной плоскости, углы равномерны с небольшим дрожанием. Косинус внутри кластера
    не меньше within_cosine, между кластерами не больше across_cosine.
    """
    w, x = spec.within_cosine, spec.across_cosine
    if not w > x:
        raise ValidationError(f"within_cosine ({w}) должен превышать across_cosine ({x})")
    if not (-1 <= x and w <= 1):
        raise ValidationError("косинусы должны лежать в [-1, 1]")
    if spec.n_segments < 2 or spec.dim < 3:
        raise ValidationError("нужно не меньше двух сегментов и размерность не меньше 3")

    sigma = 0.9 * math.sqrt((1 - w) / (1 + w))
    centroid_cos = x * (1 + sigma ** 2) - 2 * sigma - sigma ** 2
    if centroid_cos < -1:
        raise ValidationError(f"недостижимые цели: косинус центроидов {centroid_cos:.3f} < -1")

    rng = np.random.default_rng(spec.seed)
    c0 = _unit(rng.standard_normal(spec.dim))
    c1 = centroid_cos * c0 + math.sqrt(1 - centroid_cos ** 2) * _orthonormal_to(rng, [c0], spec.dim)
    centroids = [c0, _unit(c1)]

    labels = canonical_relabel(rng.permutation(np.arange(spec.n_segments) % 2))
    vectors = np.empty((spec.n_segments, spec.dim))
    for k, c in enumerate(centroids):
        members = np.flatnonzero(labels == k)
        p1 = _orthonormal_to(rng, [c], spec.dim)
        p2 = _orthonormal_to(rng, [c, p1], spec.dim)
        step = 2 * math.pi / len(members)
        angles = rng.uniform() * 2 * math.pi + step * (np.arange(len(members)) + rng.uniform(-0.2, 0.2, len(members)))
        for idx, angle in zip(members, angles):
            noise = math.cos(angle) * p1 + math.sin(angle) * p2
            vectors[idx] = _unit(c + sigma * noise)

    onsets = np.arange(spec.n_segments) * spec.segment_length
    embeddings = EmbeddingSet(spec.recording_id, onsets, onsets + spec.segment_length, vectors)
    return embeddings, labels


def embeddings_reference(embeddings: EmbeddingSet, labels: Sequence[int]) -> Timeline:
    """Эталонный таймлайн: каждый сегмент принадлежит диктору своего кластера"""
    return assignment_to_timeline(embeddings, ClusterAssignment.from_labels(labels))


def gen_timeline(spec: FixtureSpec) -> Timeline:
    """
    Разговор двух чередующихся дикторов с заданными SP, OVP (проценты от длительности)
    и STM (смены дикторов в минуту). Наложения приходятся на половину переходов
    (на все, если пауз нет), паузы на остальные переходы и на края записи.
    """
    duration, sp, ovp, stm = spec.duration, spec.target_sp, spec.target_ovp, spec.target_stm
    if not duration > 0 or not 0 < sp <= 100 or not 0 <= ovp <= sp or stm < 0:
        raise ValidationError(f"недопустимые цели: sp={sp}, ovp={ovp}, stm={stm}, длительность {duration}")
    changes = int(round(stm * duration / 60))
    speech = sp * duration / 100
    overlap = ovp * duration / 100
    silence = duration - speech

    if changes == 0 and overlap > 0:
        raise ValidationError("наложения невозможны без смен дикторов")
    if overlap > 0:
        overlapped = list(range(changes)) if silence <= 0 else list(range(0, changes, 2))
    else:
        overlapped = []
    overlap_each = overlap / len(overlapped) if overlapped else 0.0
    gapped = [t for t in range(changes) if t not in set(overlapped)]
    slots = len(gapped) + 2 if silence > 0 else 0
    gap_each = silence / slots if slots else 0.0

    shifts = np.zeros(changes)
    shifts[overlapped] = -overlap_each
    shifts[gapped] = gap_each

    rng = np.random.default_rng(spec.seed)
    weights = 1 + rng.uniform(-0.3, 0.3, changes + 1)
    lengths = weights / weights.sum() * (speech + overlap)
    for i, length in enumerate(lengths):
        left = overlap_each if i > 0 and shifts[i - 1] < 0 else 0.0
        right = overlap_each if i < changes and shifts[i] < 0 else 0.0
        if not length > left + right:
            raise ValidationError("наложения не помещаются в реплики: уменьшите OVP или STM")

    turns: List[Turn] = []
    cursor = gap_each
    for i, length in enumerate(lengths):
        onset, offset = round(cursor, 3), round(cursor + length, 3)
        turns.append(Turn(spec.recording_id, onset, offset - onset, f"spk{i % 2:02d}"))
        if i < changes:
            cursor += length + shifts[i]
    logger.debug("Разговор: %d реплик, наложение %.3f с, пауза %.3f с", len(turns), overlap_each, gap_each)
    return Timeline(spec.recording_id, tuple(turns))


def _resonator_denominator(resonances: Sequence[float], bandwidth: float, rate: int) -> np.ndarray:
    radius = math.exp(-math.pi * bandwidth / rate)
    poles = []
    for freq in resonances:
        angle = 2 * math.pi * freq / rate
        poles += [radius * np.exp(1j * angle), radius * np.exp(-1j * angle)]
    return np.real(np.poly(poles))


def _voice(f0: float, resonances: Sequence[float], audio: AudioSpec, mask: np.ndarray) -> np.ndarray:
    """Импульсы с периодом 1/f0 через наклон источника и каскад резонаторов"""
    impulses = np.zeros(len(mask))
    positions = np.round(np.arange(0, len(mask), audio.rate / f0)).astype(int)
    impulses[positions[positions < len(mask)]] = 1.0
    impulses *= mask
    source = lfilter([1.0], [1.0, -SOURCE_TILT], impulses)
    denominator = _resonator_denominator(resonances, audio.bandwidth, audio.rate)
    voiced = lfilter([np.sum(denominator)], denominator, source) * mask
    power = np.mean(voiced[mask] ** 2) if mask.any() else 0.0
    return voiced * (audio.amplitude / math.sqrt(power)) if power > 0 else voiced


def gen_audio(audio: AudioSpec, timeline: Timeline, duration: float, seed: int = 0) -> np.ndarray:
    """Каждый диктор звучит в своих репликах; шум по всей записи задаёт SNR относительно речи"""
    n = int(round(duration * audio.rate))
    times_ms = (np.arange(n) + 0.5) * 1000 / audio.rate
    signal = np.zeros(n)
    speech = np.zeros(n, dtype=bool)
    for k, (speaker, intervals) in enumerate(speaker_intervals(timeline).items()):
        mask = intervals.contains(times_ms)
        speech |= mask
        f0 = audio.f0s[k % len(audio.f0s)]
        resonances = audio.resonances[k % len(audio.resonances)]
        signal += _voice(f0, resonances, audio, mask)
    if audio.snr_db is not None and speech.any():
        power = np.mean(signal[speech] ** 2)
        sigma = math.sqrt(power / 10 ** (audio.snr_db / 10))
        signal = signal + sigma * np.random.default_rng(seed).standard_normal(n)
    return signal


def gen_conversation(spec: FixtureSpec) -> Tuple[Timeline, np.ndarray]:
    """Разговор по целям SP/OVP/STM вместе со звуком"""
    timeline = gen_timeline(spec)
    audio = spec.audio or AudioSpec()
    return timeline, gen_audio(audio, timeline, spec.duration, spec.seed)


def fragment_timeline(timeline: Timeline, count: int, length: float = 0.1, seed: int = 0) -> Timeline:
    """Короткие ложные вставки соседнего диктора внутри случайных реплик"""
    if count < 0 or not length > 0:
        raise ValidationError(f"недопустимые параметры вставок: count={count}, length={length}")
    turns = timeline.turns
    if not turns or count == 0:
        return timeline
    speakers = timeline.speakers
    rng = np.random.default_rng(seed)
    inserted = []
    for i in rng.integers(len(turns), size=count):
        turn = turns[i]
        other = speakers[(speakers.index(turn.speaker) + 1) % len(speakers)] if len(speakers) > 1 else "spk99"
        onset = turn.onset + rng.uniform(0, max(turn.duration - length, 0.0))
        inserted.append(Turn(timeline.recording_id, round(onset, 3), length, other))
    return Timeline(timeline.recording_id, turns + tuple(inserted))
