import streamlit as st
import numpy as np
import pandas as pd
from dataclasses import replace
from io import BytesIO
from typing import Callable, Dict, List, Optional, Sequence, Tuple, TypeVar

from diarlab.config import RunConfig
from diarlab.corpus_stats import features_frame, recording_features, summarize, summary_frame
from diarlab.embeddings import EmbeddingSet, parse_embeddings
from diarlab.errors import DiarlabError
from diarlab.fixtures import (AudioSpec, FixtureSpec, embeddings_reference, fragment_timeline, gen_conversation,
                              gen_embeddings, gen_timeline)
from diarlab.pipeline import assignment_to_timeline, cluster_embeddings, diarize
from diarlab.rttm import Timeline, parse_rttm, serialize_rttm
from diarlab.scoring import DerBreakdown, ScoringConfig, pair_up, score_file, score_pair
from diarlab.smoothing import flip_count, rasterize, smooth_timeline

T = TypeVar("T")

# голоса различаются тоном и резонансами
DASHBOARD_AUDIO = AudioSpec(resonances=((500.0, 1500.0, 2500.0), (650.0, 1750.0, 2900.0)))

METHOD_TITLES = {
    "ahc": "AHC (средняя связь)",
    "kmeans": "k-means",
    "sc-fixed": "SC, фиксированное k",
    "sc-adapt": "SC, доля p",
    "sc-pna": "SC-pNA",
    "sc-mk": "SC-MK (ядра)",
}


# --- Кэшированные функции для генерации данных ---
@st.cache_data
def method_grid(seed: int, n_segments: int, within: float, across: float,
                methods: Tuple[str, ...], num_speakers: Optional[int]) -> pd.DataFrame:
    """DER каждого метода на синтетических эмбеддингах двух дикторов с кэшированием"""
    spec = FixtureSpec(seed=seed, n_segments=n_segments, within_cosine=within, across_cosine=across)
    embeddings, labels = gen_embeddings(spec)
    reference = embeddings_reference(embeddings, labels)
    rows = []
    for method in methods:
        try:
            cfg = RunConfig(method=method, num_speakers=num_speakers, seed=seed)
            assignment = cluster_embeddings(embeddings, cfg)
            hypothesis = assignment_to_timeline(embeddings, assignment)
            rows.append([method, assignment.num_clusters, score_file(reference, hypothesis).der, ""])
        except DiarlabError as e:
            rows.append([method, np.nan, np.nan, str(e)])
    return pd.DataFrame(rows, columns=["method", "num_speakers", "der", "error"])


@st.cache_data
def cluster_uploaded(data: bytes, method: str, num_speakers: Optional[int]) -> bytes:
    """RTTM гипотез для всех записей загруженного CSV"""
    sets: Dict[str, EmbeddingSet] = parse_embeddings(data)
    cfg = RunConfig(method=method, num_speakers=num_speakers)
    return serialize_rttm([diarize(sets[rec], cfg) for rec in sorted(sets)])


@st.cache_data
def smoothing_demo(seed: int, duration: float, fragments: int, fragment_length: float,
                   windows: Tuple[int, ...]) -> Tuple[pd.DataFrame, Dict[str, np.ndarray]]:
    """Флипы и DER разговора с ложными вставками до и после медианного фильтра"""
    reference = gen_timeline(FixtureSpec(seed=seed, recording_id="demo", duration=duration))
    noisy = fragment_timeline(reference, fragments, fragment_length, seed)
    speakers = reference.speakers
    candidates = [("без сглаживания", noisy)] + [(f"окно {w}", smooth_timeline(noisy, w)) for w in windows]
    num_frames = rasterize(noisy, speakers=speakers).num_frames
    rows, rasters = [], {"эталон": rasterize(reference, speakers=speakers, num_frames=num_frames).activity}
    for name, timeline in candidates:
        activity = rasterize(timeline, speakers=speakers, num_frames=num_frames).activity
        rasters[name] = activity
        rows.append([name, int(flip_count(activity).sum()), len(timeline), score_file(reference, timeline).der])
    return pd.DataFrame(rows, columns=["variant", "flips", "turns", "der"]), rasters


def demo_corpus(count: int, duration: float, fragments: int, fragment_length: float,
                window: int) -> Tuple[Dict[str, Timeline], Dict[str, Timeline], Dict[str, Timeline]]:
    """Эталоны, гипотезы со вставками и их сглаженные версии для нескольких записей"""
    refs, hyps_a, hyps_b = {}, {}, {}
    for seed in range(count):
        rec = f"conv{seed:02d}"
        ref = gen_timeline(FixtureSpec(seed=seed, recording_id=rec, duration=duration))
        noisy = fragment_timeline(ref, fragments, fragment_length, seed)
        refs[rec], hyps_a[rec], hyps_b[rec] = ref, noisy, smooth_timeline(noisy, window)
    return refs, hyps_a, hyps_b


@st.cache_data
def corpus_features(count: int, duration: float, sp: float, ovp: float, stm: float, snr: float,
                    ci: str, with_audio: bool) -> Tuple[pd.DataFrame, pd.DataFrame]:
    """Признаки синтетических разговоров и их средние с 95% интервалами"""
    rows = []
    audio_spec = replace(DASHBOARD_AUDIO, snr_db=snr)
    for seed in range(count):
        spec = FixtureSpec(seed=seed, recording_id=f"conv{seed:02d}", duration=duration,
                           target_sp=sp, target_ovp=ovp, target_stm=stm, audio=audio_spec)
        if with_audio:
            timeline, samples = gen_conversation(spec)
            audio = (samples, audio_spec.rate)
        else:
            timeline, audio = gen_timeline(spec), None
        rows.append(recording_features(spec.recording_id, timeline, duration, audio))
    summary = summarize(rows, ci)
    return features_frame(rows), summary_frame(summary)


def score_uploaded(ref_data: bytes, hyp_data: Optional[bytes], collar: float,
                   score_overlap: bool) -> List[DerBreakdown]:
    refs = parse_rttm(ref_data)
    hyps = parse_rttm(hyp_data) if hyp_data is not None else {}
    cfg = ScoringConfig(collar=collar, score_overlap=score_overlap)
    return [score_pair(ref, hyp, cfg) for ref, hyp in pair_up(refs, hyps)]


def missing_recordings(refs: Dict[str, Timeline], hyps: Dict[str, Timeline], exclude=()) -> List[str]:
    """Записи эталона без гипотезы; при оценке они целиком идут в пропуски"""
    return [rec for rec in sorted(refs) if rec not in exclude and rec not in hyps]


def safe_compute(fn: Callable[..., T], *args, **kwargs) -> Optional[T]:
    """Вызов вычисления с выводом ошибки вместо падения вкладки"""
    try:
        return fn(*args, **kwargs)
    except DiarlabError as e:
        st.error(f"Ошибка в данных: {str(e)}")
    except Exception as e:
        st.error(f"Ошибка при вычислении: {str(e)}")
    return None


def mark_visited(name: str):
    if "visited_tabs" not in st.session_state:
        st.session_state.visited_tabs = set()
    st.session_state.visited_tabs.add(name)


def create_download_button(fig, filename: str, label: str = "📥 Скачать график (PNG)"):
    """Универсальная функция для создания кнопки скачивания графика"""
    buf = BytesIO()
    fig.savefig(buf, format="png", dpi=300, bbox_inches='tight')
    return st.download_button(label, buf.getvalue(), filename, "image/png", key=f"png_{filename}")


def create_csv_button(frame: pd.DataFrame, filename: str, label: str = "📥 Скачать таблицу (CSV)"):
    data = frame.to_csv(index=False, lineterminator="\n", float_format="%.6f").encode("utf-8")
    return st.download_button(label, data, filename, "text/csv", key=f"csv_{filename}")


def format_der_display(values: Sequence[Tuple[str, float]], title: str):
    """Форматированное отображение DER"""
    st.subheader(title)
    for name, value in values:
        if np.isfinite(value):
            st.write(f"{name}: {100 * value:.2f}%")
        else:
            st.write(f"{name}: невозможно вычислить")
