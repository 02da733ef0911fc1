"""diarlab: кластеризация эмбеддингов дикторов, сглаживание, DER и статистика корпуса"""
from .errors import DiarlabError, ParseError, ValidationError
from .rttm import IntervalSet, Timeline, Turn, parse_rttm, read_rttm, serialize_rttm
from .embeddings import EmbeddingSet, parse_embeddings, read_embeddings
from .config import RunConfig
from .pipeline import cluster_embeddings, diarize
from .scoring import DerBreakdown, ScoringConfig, score_file

__all__ = [
    "DiarlabError",
    "ParseError",
    "ValidationError",
    "IntervalSet",
    "Timeline",
    "Turn",
    "parse_rttm",
    "read_rttm",
    "serialize_rttm",
    "EmbeddingSet",
    "parse_embeddings",
    "read_embeddings",
    "RunConfig",
    "cluster_embeddings",
    "diarize",
    "DerBreakdown",
    "ScoringConfig",
    "score_file",
]
