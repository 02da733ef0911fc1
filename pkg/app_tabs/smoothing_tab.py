import streamlit as st
import numpy as np
import matplotlib.pyplot as plt

from .utils import create_csv_button, create_download_button, mark_visited, safe_compute, smoothing_demo


def smoothing_tab():
    """Вкладка медианного сглаживания"""
    mark_visited("Сглаживание")

    st.header("Временное медианное сглаживание")
    st.markdown(
        """Разметка переводится в кадры по 10 мс, и каждое значение активности диктора заменяется медианой
    окна нечётной длины. Короткие ложные вставки, не длиннее половины окна, исчезают;
    длинные реплики остаются на месте."""
    )

    col1, col2, col3 = st.columns(3)
    with col1:
        seed = st.number_input("Зерно", 0, 10_000, 0, key="smooth_seed")
        duration = st.slider("Длительность разговора (с)", 30, 300, 60, step=10, key="smooth_duration")
    with col2:
        fragments = st.slider("Ложных вставок", 0, 100, 20)
        fragment_length = st.slider("Длина вставки (с)", 0.02, 0.3, 0.1, step=0.01)
    with col3:
        windows = st.multiselect("Окна (кадры)", [3, 5, 11, 21, 29, 51], default=[11, 29])
        view = st.slider("Показать первые N секунд", 5, 60, 20)

    result = safe_compute(smoothing_demo, int(seed), float(duration), fragments, fragment_length,
                          tuple(sorted(windows)))
    if result is None:
        return
    table, rasters = result

    frames = int(view / 0.01)
    fig, axes = plt.subplots(len(rasters), 1, figsize=(12, 1.2 * len(rasters) + 1), sharex=True)
    for ax, (name, activity) in zip(np.atleast_1d(axes), rasters.items()):
        ax.imshow(activity[:, :frames], aspect="auto", interpolation="nearest", cmap="Greys",
                  extent=(0, min(frames, activity.shape[1]) * 0.01, activity.shape[0] - 0.5, -0.5))
        ax.set_yticks(range(activity.shape[0]))
        ax.set_yticklabels([f"spk{i:02d}" for i in range(activity.shape[0])], fontsize=8)
        ax.set_ylabel(name, rotation=0, ha="right", va="center")
    np.atleast_1d(axes)[-1].set_xlabel("Время (с)")
    fig.suptitle("Активность дикторов по кадрам", fontsize=14)
    fig.tight_layout()
    st.pyplot(fig, use_container_width=True)

    create_download_button(fig, "smoothing.png")
    st.dataframe(table, use_container_width=True)
    create_csv_button(table, "smoothing.csv")

    st.markdown(
        """**Пояснение**
    - Серия активных кадров исчезает, если она не длиннее (w − 1) / 2 кадров: для окна 11 это 50 мс,
      для окна 29 это 140 мс
    - Число переключений 0↔1 после фильтра не растёт
    - Сглаживание полезно, когда кластеризация даёт дробные реплики на стыках сегментов
    """
    )
