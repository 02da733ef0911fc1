import numpy as np
import pytest
import soundfile as sf

from diarlab.acoustics import (estimate_f3_track, estimate_pitch_track, frame_centers_ms, frame_energy, lpc_formants,
                               num_frames, read_audio)
from diarlab.errors import ValidationError
from diarlab.fixtures import AudioSpec, gen_audio
from conftest import make_timeline

RATE = 16000


def tone(freq, seconds=1.0, amplitude=0.5):
    t = np.arange(int(seconds * RATE)) / RATE
    return amplitude * np.sin(2 * np.pi * freq * t)


def test_sine_pitch():
    track = estimate_pitch_track(tone(200.0), RATE)
    assert len(track) == 100
    assert np.mean(~np.isnan(track)) > 0.9
    assert np.nanmedian(track) == pytest.approx(200.0, abs=2.0)


def test_low_pitch_in_range():
    assert np.nanmedian(estimate_pitch_track(tone(100.0), RATE)) == pytest.approx(100.0, abs=1.5)


def test_noise_is_unvoiced():
    noise = np.random.default_rng(0).standard_normal(RATE)
    assert np.mean(np.isnan(estimate_pitch_track(noise, RATE))) >= 0.9


def test_silence_and_short_signals():
    assert np.isnan(estimate_pitch_track(np.zeros(RATE), RATE)).all()
    assert estimate_pitch_track(np.zeros(300), RATE).size == 0


def test_low_rate_rejected():
    with pytest.raises(ValidationError):
        estimate_pitch_track(np.zeros(4000), 4000)


def test_frame_grid():
    assert num_frames(16000, RATE) == 100
    np.testing.assert_allclose(frame_centers_ms(3), [5.0, 15.0, 25.0])
    energy = frame_energy(np.full(1600, 0.5), RATE)
    np.testing.assert_allclose(energy, np.full(10, 0.25))


def test_third_formant_of_synthetic_voice():
    timeline = make_timeline("r", (0, 2, "A"))
    audio = AudioSpec(f0s=(120.0,), resonances=((500.0, 1500.0, 2500.0),), snr_db=None)
    samples = gen_audio(audio, timeline, 2.0)
    f3 = estimate_f3_track(samples, RATE)
    assert np.sum(~np.isnan(f3)) > 100
    assert np.nanmedian(f3) == pytest.approx(2500.0, abs=150.0)


def test_f3_needs_voicing():
    assert np.isnan(estimate_f3_track(np.zeros(RATE), RATE)).all()


def test_lpc_of_silence():
    assert lpc_formants(np.zeros(400), RATE, 18).size == 0


def test_read_audio_first_channel(tmp_path):
    stereo = np.stack([tone(200.0, 0.1), np.zeros(1600)], axis=1)
    sf.write(str(tmp_path / "x.wav"), stereo, RATE, subtype="FLOAT")
    samples, rate = read_audio(tmp_path / "x.wav")
    assert rate == RATE
    np.testing.assert_allclose(samples, stereo[:, 0], atol=1e-6)
