import streamlit as st

from diarlab.corpus_stats import FeatureStat, FeatureSummary
from diarlab.plots import FEATURE_TITLES, plot_feature_summary
from .utils import corpus_features, create_csv_button, create_download_button, mark_visited, safe_compute


def _summary_from_frame(frame) -> FeatureSummary:
    stats = {}
    for name, mean, half_width, count in zip(frame["feature"], frame["mean"], frame["ci95_halfwidth"], frame["count"]):
        stats[name] = FeatureStat(float(mean), float(half_width), int(count)) if count else None
    return FeatureSummary(stats)


def corpus_stats_tab():
    """Вкладка статистики корпуса"""
    mark_visited("Статистика корпуса")

    st.header("Признаки записей корпуса")
    st.markdown(
        """Каждая запись описывается шестью признаками: доля речи (SP) и наложений (OVP),
    разность медиан тона (ADP) и третьей форманты (ADF3) двух дикторов, отношение сигнал/шум (SNR)
    и число смен дикторов в минуту (STM). Ниже синтетические разговоры с заданными целями."""
    )

    col1, col2, col3 = st.columns(3)
    with col1:
        count = st.slider("Записей", 1, 8, 3)
        duration = st.slider("Длительность (с)", 30, 300, 30, step=10, key="stats_duration")
    with col2:
        sp = st.slider("SP (%)", 50.0, 100.0, 88.14)
        ovp = st.slider("OVP (%)", 0.0, 15.0, 4.08)
    with col3:
        stm = st.slider("STM (смен/мин)", 2.0, 30.0, 16.0)
        snr = st.slider("SNR (дБ)", 0.0, 40.0, 20.0)
    col1, col2 = st.columns(2)
    with col1:
        ci = st.radio("Интервал", ["normal", "t"], horizontal=True,
                      format_func={"normal": "нормальный (1.96)", "t": "Стьюдента"}.get)
    with col2:
        with_audio = st.checkbox("Синтезировать звук (ADP, ADF3, SNR)", value=True)

    result = safe_compute(corpus_features, count, float(duration), sp, ovp, stm, snr, ci, with_audio)
    if result is None:
        return
    features, summary = result

    fig = plot_feature_summary(_summary_from_frame(summary))
    st.pyplot(fig, use_container_width=True)
    create_download_button(fig, "corpus_features.png")

    st.subheader("Сводка")
    st.dataframe(summary.assign(feature=summary["feature"].map(FEATURE_TITLES)), use_container_width=True)
    create_csv_button(summary, "corpus_summary.csv")
    st.subheader("По записям")
    st.dataframe(features, use_container_width=True)
    create_csv_button(features, "corpus_features.csv")

    if count == 1:
        st.info("По одной записи ширина интервала равна нулю.")
