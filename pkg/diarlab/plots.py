"""Графики: признаки корпуса с доверительными интервалами, пофайловый DER и ΔDER"""
import logging
from pathlib import Path
from typing import Sequence, Tuple, Union

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd
import seaborn as sns
from matplotlib.figure import Figure

from .corpus_stats import FeatureSummary
from .scoring import DerBreakdown

logger = logging.getLogger(__name__)

FEATURE_TITLES = {
    "sp": "SP (%)",
    "ovp": "OVP (%)",
    "adp": "ADP (Гц)",
    "adf3": "ADF3 (Гц)",
    "snr": "SNR (дБ)",
    "stm": "STM (смен/мин)",
}


def plot_feature_summary(summary: FeatureSummary) -> Figure:
    """Столбец на признак с 95% интервалом и средним в правом верхнем углу"""
    fig, axes = plt.subplots(1, len(FEATURE_TITLES), figsize=(18, 4))
    palette = sns.color_palette("deep", len(FEATURE_TITLES))
    for ax, (name, title), color in zip(axes, FEATURE_TITLES.items(), palette):
        stat = summary[name] if name in summary.stats else None
        ax.set_title(title)
        ax.set_xticks([])
        if stat is None:
            ax.text(0.5, 0.5, "нет данных", ha="center", va="center", transform=ax.transAxes, color="gray")
            continue
        ax.bar([0], [stat.mean], yerr=[stat.half_width], color=color, alpha=0.8, capsize=8, width=0.5)
        ax.set_xlim(-1, 1)
        ax.text(0.95, 0.95, f"{stat.mean:.2f}", ha="right", va="top", transform=ax.transAxes,
                fontsize=11, bbox=dict(boxstyle="round", facecolor="white", alpha=0.8))
        ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    return fig


def plot_der_comparison(per_file_a: Sequence[DerBreakdown], per_file_b: Sequence[DerBreakdown],
                        names: Tuple[str, str] = ("A", "B")) -> Figure:
    """Сгруппированные столбцы DER (%) по файлам для двух систем"""
    der_b = {d.recording_id: d.der for d in per_file_b}
    ids = [d.recording_id for d in per_file_a]
    table = pd.DataFrame({
        "recording_id": ids * 2,
        "der": [100 * d.der for d in per_file_a] + [100 * der_b.get(rec, np.nan) for rec in ids],
        "system": [names[0]] * len(ids) + [names[1]] * len(ids),
    })
    fig, ax = plt.subplots(figsize=(max(8, 0.3 * len(ids) + 4), 5))
    sns.barplot(data=table, x="recording_id", y="der", hue="system", ax=ax)
    ax.set_xlabel("Запись")
    ax.set_ylabel("DER (%)")
    ax.set_title(f"DER по файлам: {names[0]} и {names[1]}")
    ax.tick_params(axis="x", rotation=90)
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    return fig


def plot_delta(delta: pd.DataFrame, names: Tuple[str, str] = ("A", "B")) -> Figure:
    """ΔDER = DER_a − DER_b по убыванию; положительные значения означают улучшение системы b"""
    values = 100 * delta["delta"].to_numpy()
    colors = np.where(values > 0, "tab:green", "tab:red")
    fig, ax = plt.subplots(figsize=(max(8, 0.3 * len(values) + 4), 5))
    ax.bar(np.arange(len(values)), values, color=colors)
    ax.axhline(0, color="black", linewidth=0.8)
    ax.set_xticks(np.arange(len(values)))
    ax.set_xticklabels(delta["recording_id"], rotation=90)
    ax.set_ylabel(f"ΔDER = DER({names[0]}) − DER({names[1]}), п.п.")
    ax.set_title(f"Положительные значения: улучшение {names[1]} относительно {names[0]}")
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    return fig


def save_figure(fig: Figure, path: Union[str, Path]) -> None:
    """PNG 300 dpi с плотной рамкой"""
    fig.savefig(path, format="png", dpi=300, bbox_inches="tight")
    plt.close(fig)
    logger.info("График сохранён: %s", path)
