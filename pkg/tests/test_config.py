import pytest

from diarlab.config import RunConfig, load_config_file, run_config_from_mapping
from diarlab.errors import ValidationError


def test_method_defaults():
    assert run_config_from_mapping({"method": "sc-fixed"}).k == 10
    cfg = run_config_from_mapping({"method": "sc-adapt"})
    assert (cfg.p, cfg.min_keep) == (0.01, 2)
    assert run_config_from_mapping({"method": "sc-pna"}).tau == pytest.approx(0.2)
    mk = run_config_from_mapping({"method": "sc-mk"})
    assert mk.k == 15 and len(mk.kernels) == 6
    assert run_config_from_mapping({}).method == "ahc"


def test_explicit_values_win():
    cfg = run_config_from_mapping({"method": "sc-mk", "k": 7, "kernels": "poly1, arccos1", "kernel_weights": "1,3"})
    assert cfg.k == 7
    assert cfg.kernels == ("poly1", "arccos1")
    assert cfg.kernel_weights == (1.0, 3.0)


def test_auto_speakers():
    assert run_config_from_mapping({"method": "sc-fixed", "num_speakers": "auto"}).num_speakers is None


@pytest.mark.parametrize("values", [
    {"method": "dbscan"},
    {"method": "ahc", "k": 5},
    {"method": "kmeans", "tau": 0.3},
    {"method": "sc-fixed", "smooth_window": 10},
    {"method": "sc-mk", "kernels": ["poly1", "poly2"], "kernel_weights": [1.0]},
    {"unknown": 1},
])
def test_invalid_configs(values):
    with pytest.raises(ValidationError):
        run_config_from_mapping(values)


def test_unknown_kernel():
    with pytest.raises(ValueError):
        RunConfig(method="sc-mk", kernels=("cos",))


def test_yaml_file(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("method: sc-mk\nk: 15\nkernels: [poly1, poly3, arccos1]\nnum-speakers: auto\n", encoding="utf-8")
    values = load_config_file(path)
    assert values["num_speakers"] == "auto"
    cfg = run_config_from_mapping(values)
    assert cfg.kernels == ("poly1", "poly3", "arccos1")
    assert cfg.num_speakers is None


def test_yaml_must_be_mapping(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("- a\n- b\n", encoding="utf-8")
    with pytest.raises(ValidationError):
        load_config_file(path)
