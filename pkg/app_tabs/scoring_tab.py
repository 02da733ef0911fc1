import streamlit as st

from diarlab.rttm import serialize_rttm
from diarlab.scoring import aggregate, report_frame
from .utils import create_csv_button, demo_corpus, format_der_display, mark_visited, safe_compute, score_uploaded


def scoring_tab():
    """Вкладка оценки DER"""
    mark_visited("Оценка DER")

    st.header("Оценка гипотезы: DER")
    st.markdown(
        """DER складывается из пропущенной речи, ложной тревоги и путаницы дикторов,
    делённых на длительность речи эталона. Дикторы гипотезы сопоставляются с дикторами эталона
    один к одному так, чтобы совпадение было максимальным."""
    )

    col1, col2 = st.columns(2)
    with col1:
        collar = st.number_input("Воротник (с)", 0.0, 1.0, 0.0, step=0.05)
    with col2:
        skip_overlap = st.checkbox("Не оценивать участки наложений")

    demo = st.checkbox("Пример на синтетических данных", value=True)
    if demo:
        refs, hyps, _ = demo_corpus(3, 60.0, 20, 0.1, 11)
        ref_data = serialize_rttm([refs[rec] for rec in sorted(refs)])
        hyp_data = serialize_rttm([hyps[rec] for rec in sorted(hyps)])
    else:
        ref_file = st.file_uploader("Эталон (RTTM)", type=["rttm", "txt"], key="score_ref")
        hyp_file = st.file_uploader("Гипотеза (RTTM)", type=["rttm", "txt"], key="score_hyp")
        if ref_file is None:
            st.info("Загрузите эталонную разметку.")
            return
        ref_data = ref_file.getvalue()
        hyp_data = hyp_file.getvalue() if hyp_file is not None else None
        if hyp_data is None:
            st.warning("Гипотеза не загружена: вся речь эталона будет считаться пропущенной.")

    per_file = safe_compute(score_uploaded, ref_data, hyp_data, collar, not skip_overlap)
    if not per_file:
        if per_file is not None:
            st.warning("В эталоне нет ни одной реплики.")
        return
    total = aggregate(per_file)
    table = report_frame(per_file, total)

    col1, col2, col3, col4 = st.columns(4)
    col1.metric("DER", f"{100 * total.der:.2f}%")
    col2.metric("Пропуск", f"{total.missed:.2f} с")
    col3.metric("Ложная тревога", f"{total.false_alarm:.2f} с")
    col4.metric("Путаница", f"{total.confusion:.2f} с")

    st.dataframe(table, use_container_width=True)
    create_csv_button(table, "der_report.csv")
    format_der_display([(d.recording_id, d.der) for d in per_file], "DER по файлам")
