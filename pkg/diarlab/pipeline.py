"""Сборка этапов: эмбеддинги → кластеры → таймлайн гипотезы"""
import logging

from .affinity import cosine_affinity, multi_kernel_affinity
from .assignment import ClusterAssignment
from .classic import AhcConfig, ahc_cluster, kmeans_cluster
from .config import RunConfig
from .embeddings import EmbeddingSet, unit_normalize
from .errors import ValidationError
from .pruning import PruningSpec, prune
from .rttm import Timeline, Turn
from .smoothing import smooth_timeline
from .spectral import SpectralConfig, spectral_cluster

logger = logging.getLogger(__name__)


def speaker_label(index: int) -> str:
    return f"spk{index:02d}"


def _pruning_spec(cfg: RunConfig) -> PruningSpec:
    if cfg.method in ("sc-fixed", "sc-mk"):
        return PruningSpec("fixed_k", k=cfg.k, symmetrize=cfg.symmetrize)
    if cfg.method == "sc-adapt":
        return PruningSpec("top_p", p=cfg.p, min_keep=cfg.min_keep, symmetrize=cfg.symmetrize)
    return PruningSpec("pna", tau=cfg.tau, min_keep=cfg.min_keep, symmetrize=cfg.symmetrize)


def cluster_embeddings(embeddings: EmbeddingSet, cfg: RunConfig) -> ClusterAssignment:
    """Кластеризация сегментов одной записи выбранным методом"""
    cfg = cfg.with_defaults()
    normalized = unit_normalize(embeddings)

    if cfg.method == "ahc":
        if cfg.threshold is not None:
            ahc = AhcConfig(cfg.linkage, threshold=cfg.threshold)
        elif cfg.target_k is not None or cfg.num_speakers is not None:
            ahc = AhcConfig(cfg.linkage, target_k=cfg.target_k or cfg.num_speakers)
        else:
            raise ValidationError("для AHC без числа дикторов нужен порог threshold")
        return ahc_cluster(normalized, ahc)

    if cfg.method == "kmeans":
        if cfg.num_speakers is None:
            raise ValidationError("k-means требует заданного числа дикторов")
        return kmeans_cluster(normalized, cfg.num_speakers, cfg.restarts, cfg.seed)

    if cfg.method == "sc-mk":
        affinity = multi_kernel_affinity(normalized, cfg.kernels, cfg.kernel_weights)
    else:
        affinity = cosine_affinity(normalized)
    graph = prune(affinity, _pruning_spec(cfg))
    spectral = SpectralConfig(
        num_speakers=cfg.num_speakers,
        max_speakers=max(cfg.max_speakers, cfg.num_speakers or 1),
        kmeans_restarts=cfg.restarts,
        seed=cfg.seed,
    )
    return spectral_cluster(graph, spectral)


def assignment_to_timeline(embeddings: EmbeddingSet, assignment: ClusterAssignment) -> Timeline:
    """Каждый сегмент становится репликой диктора своего кластера"""
    turns = [
        Turn(embeddings.recording_id, float(onset), float(offset - onset), speaker_label(label))
        for onset, offset, label in zip(embeddings.onsets, embeddings.offsets, assignment.labels)
    ]
    return Timeline(embeddings.recording_id, tuple(turns))


def diarize(embeddings: EmbeddingSet, cfg: RunConfig) -> Timeline:
    """Гипотеза для одной записи с необязательным медианным сглаживанием"""
    assignment = cluster_embeddings(embeddings, cfg)
    logger.info("%s: метод %s, %d сегментов, %d дикторов", embeddings.recording_id, cfg.method,
                len(embeddings), assignment.num_clusters)
    timeline = assignment_to_timeline(embeddings, assignment)
    if cfg.smooth_window is not None:
        timeline = smooth_timeline(timeline, cfg.smooth_window, cfg.hop)
    return timeline
