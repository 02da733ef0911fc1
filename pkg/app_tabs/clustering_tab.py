import streamlit as st
import numpy as np
import matplotlib.pyplot as plt
import seaborn as sns

from diarlab.config import METHODS
from .utils import (METHOD_TITLES, cluster_uploaded, create_csv_button, create_download_button, mark_visited,
                    method_grid, safe_compute)


def clustering_tab():
    """Вкладка сравнения методов кластеризации"""
    mark_visited("Кластеризация")

    st.header("Кластеризация эмбеддингов дикторов")
    st.markdown(
        """Каждый сегмент записи описан эмбеддингом. Методы группируют сегменты по дикторам:
    AHC и k-means работают с векторами напрямую, спектральные методы (SC) строят граф сходства,
    оставляют в нём только сильные рёбра и разбивают его по собственным векторам лапласиана."""
    )

    source = st.radio("Источник эмбеддингов", ["Синтетические", "Загрузить CSV"], horizontal=True)
    speakers_choice = st.selectbox("Число дикторов", ["2", "auto"], key="cluster_speakers")
    num_speakers = None if speakers_choice == "auto" else int(speakers_choice)

    if source == "Загрузить CSV":
        uploaded = st.file_uploader("CSV: recording_id,onset,offset,e0,e1,...", type=["csv"])
        method = st.selectbox("Метод", METHODS, format_func=METHOD_TITLES.get, index=METHODS.index("sc-pna"))
        if uploaded is None:
            st.info("Загрузите файл эмбеддингов, чтобы получить гипотезу RTTM.")
            return
        rttm = safe_compute(cluster_uploaded, uploaded.getvalue(), method, num_speakers)
        if rttm is not None:
            st.code(rttm.decode("utf-8")[:3000], language="text")
            st.download_button("📥 Скачать гипотезу (RTTM)", rttm, "hypothesis.rttm", "text/plain")
        return

    col1, col2, col3, col4 = st.columns(4)
    with col1:
        seed = st.number_input("Зерно", 0, 10_000, 0, key="cluster_seed")
    with col2:
        n_segments = st.slider("Сегментов", 10, 200, 40, step=2)
    with col3:
        within = st.slider("Косинус внутри диктора", 0.5, 0.99, 0.9)
    with col4:
        across = st.slider("Косинус между дикторами", -0.5, 0.45, 0.1)
    methods = st.multiselect("Методы", METHODS, default=list(METHODS), format_func=METHOD_TITLES.get)
    if not methods:
        st.warning("Выберите хотя бы один метод.")
        return

    table = safe_compute(method_grid, int(seed), n_segments, within, across, tuple(methods), num_speakers)
    if table is None:
        return

    fig, ax = plt.subplots(figsize=(12, 5))
    titles = [METHOD_TITLES[m] for m in table["method"]]
    ax.bar(titles, 100 * table["der"].fillna(0), color=sns.color_palette("deep", len(titles)), alpha=0.8)
    ax.set_title(f"DER методов на {n_segments} сегментах (зерно {seed})", fontsize=14)
    ax.set_ylabel("DER (%)")
    ax.set_xlabel("")
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    st.pyplot(fig, use_container_width=True)

    create_download_button(fig, "clustering_der.png")
    st.dataframe(table, use_container_width=True)
    create_csv_button(table, "clustering_der.csv")

    failed = table[table["error"] != ""]
    for method, message in zip(failed["method"], failed["error"]):
        st.warning(f"{METHOD_TITLES[method]}: {message}")

    best = table.loc[table["der"].idxmin()] if table["der"].notna().any() else None
    if best is not None and np.isfinite(best["der"]):
        st.success(f"Лучший метод: **{METHOD_TITLES[best['method']]}**, DER {100 * best['der']:.2f}%")

    st.markdown(
        """**Параметры по умолчанию**
    - SC с фиксированным k: 10 соседей в строке графа
    - SC с долей p: 1% строки, но не меньше 2 соседей
    - SC-pNA: строка делится на две группы, сохраняется доля τ = 0.20 группы «тот же диктор»
    - SC-MK: 15 соседей, среднее шести ядер (косинус, полиномы степеней 2–4, arc-cos 0 и 1)
    """
    )
