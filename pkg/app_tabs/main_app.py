import streamlit as st
import seaborn as sns
import matplotlib.pyplot as plt

from .clustering_tab import clustering_tab
from .smoothing_tab import smoothing_tab
from .scoring_tab import scoring_tab
from .comparison import comparison_tab
from .corpus_stats_tab import corpus_stats_tab

sns.set_theme(style="whitegrid")

TAB_NAMES = ["Кластеризация", "Сглаживание", "Оценка DER", "Сравнение систем", "Статистика корпуса"]


def main():
    setup_sidebar()
    st.title("🎙️ Диаризация дикторов: кластеризация и оценка")
    tabs = st.tabs(TAB_NAMES)
    with tabs[0]:
        clustering_tab()
    with tabs[1]:
        smoothing_tab()
    with tabs[2]:
        scoring_tab()
    with tabs[3]:
        comparison_tab()
    with tabs[4]:
        corpus_stats_tab()
    setup_footer()


def setup_sidebar():
    with st.sidebar:
        st.header("📖 Методы и параметры")
        descriptions = {
            "AHC": "Агломеративная кластеризация по косинусному расстоянию, средняя связь",
            "k-means": "Центры выбираются по дальним точкам, 10 перезапусков, лучший по инерции",
            "SC, фиксированное k": "В каждой строке графа остаются k = 10 сильнейших рёбер",
            "SC, доля p": "Остаётся доля p = 0.01 строки, но не меньше 2 рёбер",
            "SC-pNA": "Строка делится на «тот же диктор» и «другой»; остаётся τ = 20% первой группы",
            "SC-MK": "Среднее шести ядер после приведения к [0, 1], затем k = 15 соседей",
        }
        for name, text in descriptions.items():
            st.markdown(f"**{name}**\n{text}")
        st.markdown("### 🔢 Число дикторов")
        st.markdown("Задаётся явно (по умолчанию 2) или оценивается по наибольшему разрыву "
                    "собственных значений нормированного лапласиана.")
        with st.expander("💡 Советы"):
            st.markdown(
                """**Советы по использованию:**
                * Начните с вкладки «Кластеризация» и сравните методы на синтетических эмбеддингах
                * Уменьшите разницу косинусов внутри и между дикторами, чтобы усложнить задачу
                * На вкладке «Сглаживание» сравните окна 11 и 29 кадров
                * Свои RTTM и CSV можно загрузить на вкладках оценки и кластеризации
                При медленной работе приложения попробуйте:
                * Уменьшить число сегментов или длительность записей
                * Отключить синтез звука на вкладке статистики"""
            )


def setup_footer():
    try:
        plt.close('all')
    except Exception as e:
        st.error(f"Ошибка при обработке графиков: {str(e)}")
    if "page_views" not in st.session_state:
        st.session_state.page_views = 0
    st.session_state.page_views += 1
    st.markdown("---")
    col1, col2 = st.columns(2)
    with col1:
        st.markdown("### ℹ️ О проекте")
        st.markdown(
            """**Интерактивная витрина библиотеки diarlab.**

🎯 **Цель:** сравнить способы кластеризации эмбеддингов дикторов и оценить их по DER

🔧 **Технологии:** Python, Streamlit, NumPy, SciPy, scikit-learn, Matplotlib"""
        )
    with col2:
        st.markdown("### 📊 Статистика использования")
        st.metric("Просмотров сессии", st.session_state.page_views)
        if "visited_tabs" not in st.session_state:
            st.session_state.visited_tabs = set()
        visited_count = len(st.session_state.visited_tabs)
        st.metric("Изучено разделов", f"{visited_count}/{len(TAB_NAMES)}")
        st.progress(min(visited_count / len(TAB_NAMES), 1.0))
    st.markdown("---")
    st.markdown(
        """<div style='text-align: center; color: #666666; font-size: 12px;'>
🎙️ Кластеризация | 🧹 Сглаживание | 📏 DER | 📊 Статистика корпуса
</div>""",
        unsafe_allow_html=True,
    )
