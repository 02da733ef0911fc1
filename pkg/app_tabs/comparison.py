import streamlit as st
import matplotlib.pyplot as plt

from diarlab.plots import plot_delta, plot_der_comparison
from diarlab.rttm import parse_rttm
from diarlab.scoring import ScoringConfig, aggregate, delta_report, relative_improvement, score_pair
from .utils import (create_csv_button, create_download_button, demo_corpus, mark_visited, missing_recordings,
                    safe_compute)


def _score_systems(refs, hyps_a, hyps_b, exclude):
    cfg = ScoringConfig()
    ids = [rec for rec in sorted(refs) if rec not in exclude]
    per_a = [score_pair(refs[rec], hyps_a.get(rec), cfg) for rec in ids]
    per_b = [score_pair(refs[rec], hyps_b.get(rec), cfg) for rec in ids]
    return per_a, per_b, delta_report(per_a, per_b)


def comparison_tab():
    """Вкладка сравнения двух систем"""
    mark_visited("Сравнение систем")

    st.header("Сравнение двух систем по файлам")
    st.markdown(
        """Для каждой записи считается ΔDER = DER(a) − DER(b). Положительная разность означает,
    что система b ошиблась меньше. Файлы упорядочены по убыванию разности."""
    )

    demo = st.checkbox("Пример: гипотеза со вставками (a) против сглаженной (b)", value=True)
    if demo:
        col1, col2 = st.columns(2)
        with col1:
            count = st.slider("Записей", 2, 12, 6)
        with col2:
            window = st.select_slider("Окно сглаживания системы b", [3, 5, 11, 21, 29], value=29)
        refs, hyps_a, hyps_b = demo_corpus(count, 60.0, 25, 0.1, window)
    else:
        ref_file = st.file_uploader("Эталон (RTTM)", type=["rttm", "txt"], key="cmp_ref")
        a_file = st.file_uploader("Система a (RTTM)", type=["rttm", "txt"], key="cmp_a")
        b_file = st.file_uploader("Система b (RTTM)", type=["rttm", "txt"], key="cmp_b")
        if ref_file is None or a_file is None or b_file is None:
            st.info("Загрузите эталон и гипотезы обеих систем.")
            return
        parsed = safe_compute(lambda: [parse_rttm(f.getvalue()) for f in (ref_file, a_file, b_file)])
        if parsed is None:
            return
        refs, hyps_a, hyps_b = parsed

    exclude = st.multiselect("Исключить записи", sorted(refs))
    for name, hyps in (("a", hyps_a), ("b", hyps_b)):
        missing = missing_recordings(refs, hyps, set(exclude))
        if missing:
            st.warning(f"Система {name}: нет гипотез для {', '.join(missing)}; они считаются полностью пропущенными.")
    result = safe_compute(_score_systems, refs, hyps_a, hyps_b, set(exclude))
    if result is None:
        return
    per_a, per_b, delta = result
    if delta.empty:
        st.warning("Не осталось записей для сравнения.")
        return

    total_a, total_b = aggregate(per_a), aggregate(per_b)
    col1, col2, col3 = st.columns(3)
    col1.metric("DER a", f"{100 * total_a.der:.2f}%")
    col2.metric("DER b", f"{100 * total_b.der:.2f}%")
    if total_a.der > 0:
        col3.metric("Относительное улучшение b", f"{100 * relative_improvement(total_a.der, total_b.der):.2f}%")

    fig = plot_der_comparison(per_a, per_b, ("a", "b"))
    st.pyplot(fig, use_container_width=True)
    create_download_button(fig, "der_by_file.png")

    fig = plot_delta(delta, ("a", "b"))
    st.pyplot(fig, use_container_width=True)
    create_download_button(fig, "delta_der.png")
    plt.close("all")

    st.dataframe(delta, use_container_width=True)
    create_csv_button(delta, "delta_der.csv")
