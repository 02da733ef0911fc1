import numpy as np
import pytest

from diarlab.corpus_stats import timeline_features
from diarlab.errors import ValidationError
from diarlab.fixtures import (AudioSpec, FixtureSpec, embeddings_reference, fragment_timeline, gen_audio,
                              gen_conversation, gen_embeddings, gen_timeline)
from diarlab.rttm import overlap_regions, speech_union
from conftest import make_timeline


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_embedding_geometry(seed):
    spec = FixtureSpec(seed=seed)
    embeddings, labels = gen_embeddings(spec)
    v = embeddings.vectors
    np.testing.assert_allclose(np.linalg.norm(v, axis=1), 1.0)
    cos = v @ v.T
    same = labels[:, None] == labels[None, :]
    off = ~np.eye(len(v), dtype=bool)
    assert cos[same & off].min() >= spec.within_cosine - 1e-9
    assert cos[~same].max() <= spec.across_cosine + 1e-9
    assert np.bincount(labels).tolist() == [20, 20]
    assert labels[0] == 0


def test_embeddings_are_deterministic():
    a, la = gen_embeddings(FixtureSpec(seed=4))
    b, lb = gen_embeddings(FixtureSpec(seed=4))
    np.testing.assert_array_equal(a.vectors, b.vectors)
    np.testing.assert_array_equal(la, lb)


def test_embedding_targets_validated():
    with pytest.raises(ValidationError):
        gen_embeddings(FixtureSpec(within_cosine=0.2, across_cosine=0.3))
    with pytest.raises(ValidationError):
        gen_embeddings(FixtureSpec(n_segments=1))


def test_reference_follows_labels():
    embeddings, labels = gen_embeddings(FixtureSpec(n_segments=6))
    reference = embeddings_reference(embeddings, labels)
    assert [t.speaker for t in reference] == [f"spk{label:02d}" for label in labels]


def test_timeline_hits_targets():
    spec = FixtureSpec()
    sp, ovp, stm = timeline_features(gen_timeline(spec), spec.duration)
    assert sp == pytest.approx(88.14, rel=0.1)
    assert ovp == pytest.approx(4.08, rel=0.1)
    assert stm == pytest.approx(16.0, rel=0.1)


def test_timeline_without_overlap():
    timeline = gen_timeline(FixtureSpec(target_ovp=0.0))
    assert overlap_regions(timeline).intervals == ()


def test_timeline_without_silence():
    spec = FixtureSpec(target_sp=100.0)
    union = speech_union(gen_timeline(spec))
    assert len(union) == 1
    assert union.duration == pytest.approx(300.0, abs=0.01)


def test_timeline_targets_validated():
    with pytest.raises(ValidationError):
        gen_timeline(FixtureSpec(target_ovp=50.0, target_sp=40.0))
    with pytest.raises(ValidationError):
        gen_timeline(FixtureSpec(target_stm=0.0))


def test_silent_voice():
    timeline = make_timeline("r", (0, 1, "A"))
    samples = gen_audio(AudioSpec(amplitude=0.0, snr_db=None), timeline, 1.0)
    assert len(samples) == 16000
    assert not samples.any()


def test_audio_is_quiet_outside_speech():
    timeline = make_timeline("r", (0.5, 1.0, "A"))
    samples = gen_audio(AudioSpec(snr_db=None), timeline, 1.5)
    assert not samples[:8000].any()
    assert not samples[16000:].any()
    assert np.sqrt(np.mean(samples[8000:16000] ** 2)) == pytest.approx(0.1, rel=1e-6)


def test_conversation_length():
    spec = FixtureSpec(duration=20.0)
    timeline, samples = gen_conversation(spec)
    assert len(samples) == 20 * 16000
    assert timeline.extent <= 20.0 + 1e-3


def test_fragment_timeline():
    timeline = make_timeline("r", (0, 10, "A"), (10, 20, "B"))
    fragmented = fragment_timeline(timeline, 5, 0.1, seed=2)
    assert len(fragmented) == 7
    inserted = [t for t in fragmented if t.duration == pytest.approx(0.1)]
    assert len(inserted) == 5
    for turn in inserted:
        host = "A" if turn.onset < 10 else "B"
        assert turn.speaker != host
    assert fragment_timeline(timeline, 0) is timeline
    with pytest.raises(ValidationError):
        fragment_timeline(timeline, -1)
