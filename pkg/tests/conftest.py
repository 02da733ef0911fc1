import matplotlib

matplotlib.use("Agg")

import numpy as np
import pytest

from diarlab.embeddings import EmbeddingSet
from diarlab.rttm import Timeline, Turn


def make_timeline(recording_id, *spans):
    """Таймлайн из кортежей (начало, конец, диктор) в секундах"""
    return Timeline(recording_id, tuple(Turn(recording_id, s, round(e - s, 6), spk) for s, e, spk in spans))


def make_embeddings(vectors, recording_id="r"):
    vectors = np.asarray(vectors, dtype=float)
    onsets = np.arange(len(vectors), dtype=float)
    return EmbeddingSet(recording_id, onsets, onsets + 1.0, vectors)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
