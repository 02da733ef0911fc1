from streamlit.testing.v1 import AppTest

from app_tabs.utils import missing_recordings
from conftest import make_timeline


def test_dashboard_renders_all_tabs():
    at = AppTest.from_file("../streamlit_app.py", default_timeout=180)
    at.run()
    assert not at.exception
    assert len(at.tabs) == 5


def test_missing_recordings_are_listed():
    refs = {rec: make_timeline(rec, (0, 1, "A")) for rec in ("r1", "r2", "r3")}
    hyps = {"r2": make_timeline("r2", (0, 1, "x")), "other": make_timeline("other", (0, 1, "x"))}
    assert missing_recordings(refs, hyps) == ["r1", "r3"]
    assert missing_recordings(refs, hyps, {"r1"}) == ["r3"]
    assert missing_recordings(refs, refs) == []
