import json
from fractions import Fraction

import pytest

from sadic_builder.config import ConfigLoader, SadicConfig


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for name in ("SADIC_CONFIG", "SADIC_SCAN_LIMIT", "SADIC_SEED", "SADIC_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)


def write_config(path, data):
    path.write_text(json.dumps(data))
    return str(path)


def test_defaults_when_file_is_missing(tmp_path):
    config = ConfigLoader.load_config(str(tmp_path / "missing.json"))
    assert config == SadicConfig()
    assert config.pipeline.depth == 4
    assert config.verification.hole_density == Fraction(1, 4)
    assert config.output.max_explicit_image == 4096


def test_values_from_file(tmp_path):
    path = write_config(
        tmp_path / "config.json",
        {
            "pipeline": {"scan_limit": 5000, "depth": 6},
            "verification": {"horizon": 300, "seed": 11, "max_hole_density": "1/8"},
            "output": {"max_explicit_image": 100},
            "log_level": "warning",
        },
    )
    config = ConfigLoader.load_config(path)
    assert config.pipeline.scan_limit == 5000
    assert config.pipeline.depth == 6
    assert config.pipeline.telescope_horizon == 64
    assert config.verification.horizon == 300
    assert config.verification.seed == 11
    assert config.verification.hole_density == Fraction(1, 8)
    assert config.output.max_explicit_image == 100
    assert config.log_level == "WARNING"


def test_invalid_entries_are_skipped(tmp_path, caplog):
    path = write_config(
        tmp_path / "config.json",
        {
            "pipeline": {"depth": 0, "scan_limit": "many", "colour": 3},
            "verification": {"max_hole_density": "3/2", "random_samples": 0},
            "output": [],
        },
    )
    with caplog.at_level("WARNING", logger="sadic-builder"):
        config = ConfigLoader.load_config(path)
    assert config.pipeline.depth == 4
    assert config.pipeline.scan_limit == 1_000_000
    assert config.verification.max_hole_density == "1/4"
    assert config.verification.random_samples == 0
    assert "Unknown config key 'pipeline.colour'" in caplog.text
    assert "must be an object" in caplog.text


def test_malformed_file_gives_defaults(tmp_path, caplog):
    path = tmp_path / "config.json"
    path.write_text("{not json")
    with caplog.at_level("ERROR", logger="sadic-builder"):
        assert ConfigLoader.load_config(str(path)) == SadicConfig()
    assert "Error loading config" in caplog.text
    assert ConfigLoader.load_config(write_config(path, [1, 2])) == SadicConfig()


def test_environment_overrides(tmp_path, monkeypatch):
    path = write_config(tmp_path / "config.json", {"pipeline": {"scan_limit": 5000}})
    monkeypatch.setenv("SADIC_SCAN_LIMIT", "700")
    monkeypatch.setenv("SADIC_SEED", "3")
    monkeypatch.setenv("SADIC_LOG_LEVEL", "debug")
    config = ConfigLoader.load_config(path)
    assert config.pipeline.scan_limit == 700
    assert config.verification.seed == 3
    assert config.log_level == "DEBUG"


def test_bad_environment_is_ignored(tmp_path, monkeypatch):
    monkeypatch.setenv("SADIC_SCAN_LIMIT", "lots")
    monkeypatch.setenv("SADIC_SEED", "-1")
    config = ConfigLoader.load_config(str(tmp_path / "missing.json"))
    assert config.pipeline.scan_limit == 1_000_000
    assert config.verification.seed == 0


def test_default_path(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert ConfigLoader.default_path() == str(tmp_path / "config.json")
    monkeypatch.setenv("SADIC_CONFIG", "/etc/sadic.json")
    assert ConfigLoader.default_path() == "/etc/sadic.json"


def test_save_and_reload(tmp_path):
    config = SadicConfig()
    config.pipeline.depth = 7
    config.verification.max_hole_density = "1/5"
    config.log_level = "INFO"
    path = str(tmp_path / "saved.json")
    assert ConfigLoader.save_config(config, path)
    assert ConfigLoader.load_config(path) == config


def test_save_failure(tmp_path):
    assert not ConfigLoader.save_config(SadicConfig(), str(tmp_path / "no" / "such" / "config.json"))
