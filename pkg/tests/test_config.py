"""Tests for experiment configuration loading."""
import json
from pathlib import Path

import pytest

from tembed.core.config import PIPELINES, ConfigManager, ExperimentConfig, to_complex
from tembed.core.errors import ConfigError

CONFIGS_DIR = Path(__file__).parent.parent / "configs"


def write_config(tmp_path, data) -> str:
    path = tmp_path / "config.json"
    path.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return str(path)


def test_defaults_without_a_file():
    config = ConfigManager().load()
    assert config.pipeline == "validate"
    assert config.seed == ConfigManager.DEFAULT_SEED
    assert config.out == ConfigManager.DEFAULT_OUT
    assert config.lattice.kind == "square"
    assert config.lattice.size == 8


def test_overrides_skip_none(tmp_path):
    path = write_config(tmp_path, {"seed": 5, "out": "runs/a", "lattice": {"kind": "honeycomb", "size": 4}})
    config = ConfigManager(path).load({
        ConfigManager.PIPELINE: "walk",
        ConfigManager.SEED: None,
        ConfigManager.OUT: "runs/b",
        ConfigManager.PARANOID: None,
    })
    assert config.pipeline == "walk"
    assert config.seed == 5
    assert config.out == "runs/b"
    assert config.paranoid is False
    assert config.lattice.kind == "honeycomb"


def test_missing_config(tmp_path):
    with pytest.raises(ConfigError) as exc:
        ConfigManager(str(tmp_path / "absent.json")).load()
    assert exc.value.error_type == "missing_config"


@pytest.mark.parametrize("text", ["{not json", "[1, 2, 3]"])
def test_bad_json(tmp_path, text):
    with pytest.raises(ConfigError) as exc:
        ConfigManager(write_config(tmp_path, text)).load()
    assert exc.value.error_type == "bad_json"


@pytest.mark.parametrize("data, location", [
    ({"pipeline": "simulate"}, "pipeline"),
    ({"lattice": {"size": 1}}, "lattice.size"),
    ({"lattice": {"kind": "kagome"}}, "lattice.kind"),
    ({"lattice": {"mode": "torus"}}, "lattice.mode"),
    ({"gff": {"n_points": 5}}, "gff.n_points"),
])
def test_invalid_config(tmp_path, data, location):
    with pytest.raises(ConfigError) as exc:
        ConfigManager(write_config(tmp_path, data)).load()
    assert exc.value.error_type == "invalid_config"
    assert exc.value.location == location


def test_to_complex():
    assert to_complex([0.5, -2.0]) == 0.5 - 2j
    assert to_complex(3.0) == 3 + 0j


def test_canonical_json_is_order_independent():
    a = ExperimentConfig.model_validate({"seed": 1, "lattice": {"size": 4, "kind": "honeycomb"}})
    b = ExperimentConfig.model_validate({"lattice": {"kind": "honeycomb", "size": 4}, "seed": 1})
    assert a.canonical_json() == b.canonical_json()
    data = json.loads(a.canonical_json())
    assert list(data) == sorted(data)


@pytest.mark.parametrize("path", sorted(CONFIGS_DIR.glob("*.json")), ids=lambda p: p.stem)
def test_bundled_configs_load(path):
    config = ConfigManager(str(path)).load()
    assert config.pipeline in PIPELINES
    assert config.name == path.stem
