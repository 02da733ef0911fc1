import itertools

import numpy as np
import pytest

from diarlab.errors import ValidationError
from diarlab.rttm import Timeline, speaker_intervals
from diarlab.scoring import (DerBreakdown, ScoringConfig, aggregate, delta_report, optimal_speaker_map, pair_up,
                             relative_improvement, report_frame, score_corpus, score_file, score_pair)
from conftest import make_timeline


def test_missed_tail():
    d = score_file(make_timeline("r", (0, 10, "A")), make_timeline("r", (0, 8, "x")))
    assert d.ref_speech == pytest.approx(10)
    assert d.missed == pytest.approx(2)
    assert d.der == pytest.approx(0.2)


def test_collar_removes_boundary_zones():
    d = score_file(make_timeline("r", (0, 10, "A")), make_timeline("r", (0, 8, "x")), ScoringConfig(collar=0.5))
    assert d.ref_speech == pytest.approx(9)
    assert d.missed == pytest.approx(1.5)
    assert d.der == pytest.approx(1 / 6)


def test_overlap_can_be_skipped():
    ref = make_timeline("r", (0, 11, "A"), (5, 16, "B"))
    hyp = make_timeline("r", (0, 15, "A"))
    d = score_file(ref, hyp, ScoringConfig(score_overlap=False))
    assert d.ref_speech == pytest.approx(10)
    assert d.missed == pytest.approx(1)
    assert d.confusion == pytest.approx(4)
    assert d.false_alarm == 0
    assert d.der == pytest.approx(0.5)


def test_labels_are_matched_not_compared():
    ref = make_timeline("r", (0, 5, "A"), (5, 10, "B"))
    hyp = make_timeline("r", (0, 5, "spk01"), (5, 10, "spk00"))
    assert optimal_speaker_map(ref, hyp) == {"spk01": "A", "spk00": "B"}
    assert score_file(ref, hyp).der == 0


def test_false_alarm_counts_extra_speakers():
    ref = make_timeline("r", (0, 10, "A"))
    hyp = make_timeline("r", (0, 10, "x"), (2, 4, "y"))
    d = score_file(ref, hyp)
    assert d.false_alarm == pytest.approx(2)
    assert d.confusion == 0


def brute_force(ref, hyp, length):
    def grid(timeline):
        speakers = timeline.speakers
        mask = np.zeros((len(speakers), length), dtype=bool)
        for turn in timeline:
            mask[speakers.index(turn.speaker), turn.onset_ms:turn.offset_ms] = True
        return mask

    r, h = grid(ref), grid(hyp)
    rc, hc = r.sum(axis=0), h.sum(axis=0)
    overlap = r.astype(int) @ h.T.astype(int)
    size = max(overlap.shape)
    padded = np.zeros((size, size), dtype=int)
    padded[:overlap.shape[0], :overlap.shape[1]] = overlap
    best = max(sum(padded[i, p[i]] for i in range(size)) for p in itertools.permutations(range(size)))
    missed = np.maximum(rc - hc, 0).sum()
    false_alarm = np.maximum(hc - rc, 0).sum()
    confusion = np.minimum(rc, hc).sum() - best
    return rc.sum() / 1000, missed / 1000, false_alarm / 1000, confusion / 1000


def random_timeline(rng, speakers, turns):
    spans = []
    for _ in range(turns):
        start = int(rng.integers(0, 180)) * 10
        spans.append((start / 1000, (start + int(rng.integers(1, 40)) * 10) / 1000,
                      f"s{int(rng.integers(0, speakers))}"))
    return make_timeline("r", *spans)


def test_matches_exhaustive_mapping(rng):
    for _ in range(200):
        ref = random_timeline(rng, int(rng.integers(1, 5)), int(rng.integers(1, 11)))
        hyp = random_timeline(rng, int(rng.integers(1, 5)), int(rng.integers(1, 11)))
        d = score_file(ref, hyp)
        expected = brute_force(ref, hyp, 2200)
        assert (d.ref_speech, d.missed, d.false_alarm, d.confusion) == pytest.approx(expected, abs=1e-9)


def test_hypothesis_labels_do_not_matter(rng):
    for _ in range(50):
        ref = random_timeline(rng, 3, 8)
        hyp = random_timeline(rng, 4, 8)
        names = dict(zip(hyp.speakers, rng.permutation([f"z{i}" for i in range(len(hyp.speakers))])))
        renamed = make_timeline("r", *((t.onset, t.offset, str(names[t.speaker])) for t in hyp))
        assert score_file(ref, renamed).der == pytest.approx(score_file(ref, hyp).der, abs=1e-12)


def test_disjoint_hypothesis_is_all_missed_and_false_alarm(rng):
    for _ in range(20):
        ref = random_timeline(rng, 3, 6)
        hyp = random_timeline(rng, 3, 6)
        shifted = make_timeline("r", *((t.onset + 10, t.offset + 10, t.speaker) for t in hyp))
        d = score_file(ref, shifted)
        assert d.missed == pytest.approx(d.ref_speech)
        assert d.false_alarm == pytest.approx(sum(s.duration for s in speaker_intervals(shifted).values()))
        assert d.confusion == 0


def test_missing_hypothesis():
    d = score_pair(make_timeline("r", (0, 4, "A")), None)
    assert d.hypothesis_missing
    assert d.missed == pytest.approx(4)
    assert d.der == pytest.approx(1.0)


def test_empty_reference():
    assert score_file(Timeline("r"), Timeline("r")).der == 0.0
    assert score_file(Timeline("r"), make_timeline("r", (0, 1, "x"))).der == float("inf")


def test_recording_mismatch():
    with pytest.raises(ValidationError):
        score_file(make_timeline("a", (0, 1, "A")), make_timeline("b", (0, 1, "A")))


def test_aggregate_uses_sums():
    total = aggregate([DerBreakdown("a", 10, 1, 0, 0), DerBreakdown("b", 30, 0, 0.5, 0.5)])
    assert total.recording_id == "TOTAL"
    assert total.der == pytest.approx(0.05)


def test_score_corpus_and_report():
    refs = {"a": make_timeline("a", (0, 10, "A")), "b": make_timeline("b", (0, 10, "A"))}
    hyps = {"a": make_timeline("a", (0, 9, "x")), "c": make_timeline("c", (0, 1, "x"))}
    per_file, total = score_corpus(pair_up(refs, hyps))
    assert [d.recording_id for d in per_file] == ["a", "b"]
    assert per_file[1].hypothesis_missing
    assert total.der == pytest.approx(11 / 20)
    table = report_frame(per_file, total)
    assert list(table["recording_id"]) == ["a", "b", "TOTAL"]
    assert list(report_frame(per_file, total, per_file_rows=False)["recording_id"]) == ["TOTAL"]
    with pytest.raises(ValidationError):
        score_corpus([])


def test_delta_report_order():
    table = delta_report({"r1": 0.3, "r2": 0.1, "r3": 0.2}, {"r1": 0.1, "r2": 0.2, "r3": 0.2})
    assert list(table["recording_id"]) == ["r1", "r3", "r2"]
    assert list(table["delta"]) == pytest.approx([0.2, 0.0, -0.1])
    assert list(table.columns) == ["recording_id", "der_a", "der_b", "delta"]


def test_delta_report_exclude_and_mismatch():
    table = delta_report({"r1": 0.3, "r2": 0.1}, {"r1": 0.1, "r2": 0.2}, exclude=["r1"])
    assert list(table["recording_id"]) == ["r2"]
    with pytest.raises(ValidationError):
        delta_report({"r1": 0.3}, {"r2": 0.1})


def test_relative_improvement():
    assert relative_improvement(0.2, 0.15) == pytest.approx(0.25)
    with pytest.raises(ValidationError):
        relative_improvement(0.0, 0.1)


def test_negative_collar():
    with pytest.raises(ValidationError):
        ScoringConfig(collar=-0.1)
