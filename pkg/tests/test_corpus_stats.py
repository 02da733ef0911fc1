import numpy as np
import pytest

from diarlab.corpus_stats import (RecordingFeatures, features_frame, recording_features, signal_to_noise,
                                  summarize, summary_frame, timeline_features)
from diarlab.errors import ValidationError
from diarlab.fixtures import AudioSpec, FixtureSpec, gen_audio, gen_timeline
from conftest import make_timeline

RATE = 16000


@pytest.fixture
def two_speakers():
    return make_timeline("r", (0, 10, "A"), (5, 15, "B"))


def test_timeline_features(two_speakers):
    sp, ovp, stm = timeline_features(two_speakers, 100.0)
    assert sp == pytest.approx(15.0)
    assert ovp == pytest.approx(5.0)
    assert stm == pytest.approx(0.6)


def test_modes(two_speakers):
    _, ovp, stm = timeline_features(two_speakers, 100.0, stm_mode="turns", ovp_base="speech")
    assert ovp == pytest.approx(100 / 3)
    assert stm == pytest.approx(1.2)


def test_same_speaker_turns_are_not_changes():
    timeline = make_timeline("r", (0, 1, "A"), (2, 3, "A"), (4, 5, "B"))
    assert timeline_features(timeline, 60.0)[2] == pytest.approx(1.0)


def test_timeline_must_fit_duration(two_speakers):
    with pytest.raises(ValidationError):
        timeline_features(two_speakers, 10.0)
    with pytest.raises(ValidationError):
        timeline_features(two_speakers, 0.0)


def features(values, **extra):
    return [RecordingFeatures(f"r{i}", 60.0, sp=v, ovp=1.0, stm=10.0, **extra) for i, v in enumerate(values)]


def test_summary_normal_and_t():
    summary = summarize(features([0.0, 10.0]))
    assert summary["sp"].mean == pytest.approx(5.0)
    assert summary["sp"].half_width == pytest.approx(9.80, abs=0.005)
    assert summarize(features([0.0, 10.0]), ci="t")["sp"].half_width == pytest.approx(63.53, abs=0.01)


def test_summary_edge_cases():
    summary = summarize(features([7.0]))
    assert summary["sp"].half_width == 0.0
    assert summary["adp"] is None
    table = summary_frame(summary)
    assert list(table["feature"]) == ["sp", "ovp", "adp", "adf3", "snr", "stm"]
    assert table.loc[table["feature"] == "adp", "count"].item() == 0
    with pytest.raises(ValidationError):
        summarize([])
    with pytest.raises(ValidationError):
        summarize(features([1.0]), ci="bootstrap")


def test_missing_values_are_skipped():
    rows = features([1.0, 2.0]) + [RecordingFeatures("x", 60.0, 3.0, 1.0, 10.0, adp=40.0)]
    summary = summarize(rows)
    assert summary["adp"].count == 1
    assert summary["sp"].count == 3
    assert features_frame(rows)["adp"].isna().sum() == 2


def test_snr_of_square_wave():
    a = 0.2
    n = 4 * RATE
    noise = np.random.default_rng(3).normal(0, a / 10, n)
    t = np.arange(n) / RATE
    square = np.where(np.sin(2 * np.pi * 100 * t) >= 0, a, -a)
    square[:RATE] = 0
    square[3 * RATE:] = 0
    timeline = make_timeline("r", (1, 3, "A"))
    assert signal_to_noise(square + noise, RATE, timeline) == pytest.approx(20.04, abs=0.3)


def test_snr_undefined_without_noise():
    samples = np.zeros(2 * RATE)
    samples[:RATE] = 0.1
    assert signal_to_noise(samples, RATE, make_timeline("r", (0, 1, "A"))) is None
    assert signal_to_noise(samples, RATE, make_timeline("r", (0, 2, "A"))) is None


def test_audio_features_of_synthetic_conversation():
    spec = FixtureSpec(duration=60.0)
    timeline = gen_timeline(spec)
    audio = AudioSpec(f0s=(120.0, 210.0), snr_db=30.0)
    samples = gen_audio(audio, timeline, spec.duration, seed=1)
    result = recording_features("fixture", timeline, spec.duration, (samples, audio.rate))
    assert result.adp == pytest.approx(90.0, abs=6.0)
    assert result.snr == pytest.approx(30.0, abs=0.5)
    assert result.adf3 is not None


def test_single_speaker_has_no_differences():
    timeline = make_timeline("r", (0.5, 1.5, "A"))
    samples = gen_audio(AudioSpec(), timeline, 2.0)
    result = recording_features("r", timeline, 2.0, (samples, RATE))
    assert result.adp is None and result.adf3 is None
    assert result.snr is not None
