"""Акустические треки: основной тон, третья форманта и энергия кадров"""
import logging
import math
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
import soundfile as sf
from numpy.lib.stride_tricks import sliding_window_view
from scipy.linalg import LinAlgError, solve_toeplitz
from scipy.signal import lfilter
from scipy.signal.windows import hamming

from .errors import ValidationError

logger = logging.getLogger(__name__)

HOP = 0.01
PITCH_WINDOW = 0.04
F3_WINDOW = 0.025
F0_MIN = 60.0
F0_MAX = 400.0
VOICING_THRESHOLD = 0.45
PRE_EMPHASIS = 0.97
MAX_BANDWIDTH = 400.0
MIN_FORMANT = 150.0
MIN_RATE = 8000


def read_audio(path: Union[str, Path]) -> Tuple[np.ndarray, int]:
    """Первый канал WAV в float64"""
    data, rate = sf.read(str(path), dtype="float64", always_2d=True)
    return data[:, 0].copy(), int(rate)


def _check_rate(rate: int) -> None:
    if rate < MIN_RATE:
        raise ValidationError(f"частота дискретизации {rate} Гц ниже {MIN_RATE} Гц")


def _hop_length(rate: int, hop: float) -> int:
    return int(round(rate * hop))


def num_frames(num_samples: int, rate: int, hop: float = HOP) -> int:
    """Кадр i центрирован в (i + 0.5)·hop, как в покадровой активности"""
    return num_samples // _hop_length(rate, hop)


def frame_centers_ms(count: int, hop: float = HOP) -> np.ndarray:
    return (np.arange(count) + 0.5) * hop * 1000


def _frame_starts(count: int, rate: int, hop: float, window: int) -> np.ndarray:
    centers = (np.arange(count) + 0.5) * _hop_length(rate, hop)
    return np.round(centers - window / 2).astype(int)


def _framed(samples: np.ndarray, rate: int, hop: float, window: int) -> Tuple[np.ndarray, np.ndarray]:
    """Окна всех кадров, целиком помещающихся в сигнал, и их номера"""
    count = num_frames(len(samples), rate, hop)
    starts = _frame_starts(count, rate, hop, window)
    valid = np.flatnonzero((starts >= 0) & (starts + window <= len(samples)))
    if len(samples) < window or valid.size == 0:
        return np.empty((0, window)), valid
    views = sliding_window_view(samples, window)
    return views[starts[valid]], valid


def _normalized_autocorrelation(frames: np.ndarray) -> np.ndarray:
    """Автокорреляция, нормированная на энергии перекрывающихся частей окна"""
    width = frames.shape[1]
    nfft = 1 << int(math.ceil(math.log2(2 * width)))
    spectrum = np.fft.rfft(frames, nfft, axis=1)
    acf = np.fft.irfft(np.abs(spectrum) ** 2, nfft, axis=1)[:, :width]
    energy = np.concatenate([np.zeros((len(frames), 1)), np.cumsum(frames ** 2, axis=1)], axis=1)
    lags = np.arange(width)
    head = energy[:, width - lags]
    tail = energy[:, [width]] - energy[:, lags]
    denom = np.sqrt(head * tail)
    return np.divide(acf, denom, out=np.zeros_like(acf), where=denom > 0)


def _pick_period(ncc: np.ndarray, lag_min: int, lag_max: int, threshold: float) -> Optional[float]:
    window = ncc[lag_min:lag_max + 1]
    peak = window.max()
    if not peak >= threshold:
        return None
    lags = np.arange(lag_min, lag_max + 1)
    local = (ncc[lags] >= ncc[lags - 1]) & (ncc[lags] >= ncc[np.minimum(lags + 1, len(ncc) - 1)])
    candidates = lags[local & (ncc[lags] >= 0.9 * peak)]
    lag = int(candidates[0]) if candidates.size else int(lags[np.argmax(window)])
    shift = 0.0
    if 0 < lag < len(ncc) - 1:
        a, b, c = ncc[lag - 1], ncc[lag], ncc[lag + 1]
        curvature = a - 2 * b + c
        if curvature < 0:
            shift = float(np.clip(0.5 * (a - c) / curvature, -0.5, 0.5))
    return lag + shift


def estimate_pitch_track(samples: np.ndarray, rate: int, hop: float = HOP,
                         threshold: float = VOICING_THRESHOLD) -> np.ndarray:
    """
    Основной тон по нормированной автокорреляции в окнах 40 мс, диапазон 60-400 Гц.
    Невокализованные кадры и кадры, чьё окно не помещается в сигнал, равны NaN.
    Сигнал короче одного окна даёт пустой трек.
    """
    _check_rate(rate)
    samples = np.asarray(samples, dtype=float)
    window = int(round(PITCH_WINDOW * rate))
    if len(samples) < window:
        return np.empty(0)
    track = np.full(num_frames(len(samples), rate, hop), np.nan)
    frames, index = _framed(samples, rate, hop, window)
    if not len(frames):
        return track
    lag_min = math.ceil(rate / F0_MAX)
    lag_max = min(math.floor(rate / F0_MIN), window - 2)
    ncc = _normalized_autocorrelation(frames)
    for row, i in zip(ncc, index):
        period = _pick_period(row, lag_min, lag_max, threshold)
        if period is not None:
            track[i] = rate / period
    logger.debug("Тон: %d из %d кадров вокализованы", int(np.sum(~np.isnan(track))), len(track))
    return track


def lpc_formants(frame: np.ndarray, rate: int, order: int) -> np.ndarray:
    """Частоты формант по корням полинома линейного предсказания, по возрастанию"""
    nfft = 1 << int(math.ceil(math.log2(2 * len(frame))))
    acf = np.fft.irfft(np.abs(np.fft.rfft(frame, nfft)) ** 2, nfft)[:order + 1]
    if acf[0] <= 0:
        return np.empty(0)
    coeffs = solve_toeplitz(acf[:order], acf[1:order + 1])
    roots = np.roots(np.concatenate([[1.0], -coeffs]))
    roots = roots[roots.imag > 0.01]
    freqs = np.angle(roots) * rate / (2 * np.pi)
    bandwidths = -(rate / np.pi) * np.log(np.abs(roots))
    keep = (bandwidths < MAX_BANDWIDTH) & (freqs > MIN_FORMANT)
    return np.sort(freqs[keep])


def estimate_f3_track(samples: np.ndarray, rate: int, hop: float = HOP,
                      voiced: Optional[np.ndarray] = None) -> np.ndarray:
    """Третья форманта на вокализованных кадрах; остальные кадры равны NaN"""
    _check_rate(rate)
    samples = np.asarray(samples, dtype=float)
    if voiced is None:
        voiced = ~np.isnan(estimate_pitch_track(samples, rate, hop))
    track = np.full(len(voiced), np.nan)
    if not voiced.any():
        return track
    order = int(round(2 + rate / 1000))
    window = int(round(F3_WINDOW * rate))
    emphasized = lfilter([1.0, -PRE_EMPHASIS], [1.0], samples)
    taper = hamming(window, sym=False)
    frames, index = _framed(emphasized, rate, hop, window)
    for frame, i in zip(frames, index):
        if i >= len(track) or not voiced[i]:
            continue
        try:
            formants = lpc_formants(frame * taper, rate, order)
        except (LinAlgError, ValueError):
            continue
        if len(formants) >= 3:
            track[i] = formants[2]
    return track


def frame_energy(samples: np.ndarray, rate: int, hop: float = HOP) -> np.ndarray:
    """Средняя энергия неперекрывающихся кадров длиной hop"""
    samples = np.asarray(samples, dtype=float)
    length = _hop_length(rate, hop)
    count = num_frames(len(samples), rate, hop)
    return np.mean(samples[:count * length].reshape(count, length) ** 2, axis=1)
