"""
Unit tests for configuration loading and the engine registry.
"""

import json
from fractions import Fraction

import pytest

from core.config import apply_overrides, load_config, load_flat_config, parse_fraction
from core.container import Container, build_counter, build_oracle, create_container, fixed_thresholds
from core.errors import InvalidParam
from modules.engines.naive import NaiveCycleCounter
from modules.engines.warmup import WarmupLayeredCounter
from modules.graph.counter import FourCopyCounter, GeneralReductionCounter
from modules.oracle.replay import GeneralOracleCounter, LayeredOracleCounter


@pytest.fixture
def config(tmp_path):
    """Defaults only; the path does not exist."""
    return load_config(str(tmp_path / "missing.json"))


def test_defaults(config):
    """Test the default sections."""
    assert config["engine"]["engine"] == "main"
    assert config["engine"]["mode"] == "general"
    assert config["engine"]["strict_deadlines"] is True
    assert config["matmul"]["backend"] == "blocked"
    assert config["params"]["epsilon"] == "1/24"
    assert config["params"]["reference_edges"] is None
    assert config["output"]["metrics_path"] is None


def test_json_file_and_environment(tmp_path, monkeypatch):
    """Test file values and FOURCYCLE_* environment overrides."""
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"engine": {"engine": "naive"}, "matmul": {"block_size": 8}}))
    monkeypatch.setenv("FOURCYCLE_ENGINE_STRICT_DEADLINES", "false")
    monkeypatch.setenv("FOURCYCLE_WORKLOAD_SEED", "42")
    config = load_config(str(path))
    assert config["engine"]["engine"] == "naive"
    assert config["matmul"]["block_size"] == 8
    assert config["engine"]["strict_deadlines"] is False
    assert config["workload"]["seed"] == 42


def test_invalid_file_falls_back_to_defaults(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"engine": {"engine": "quantum"}}))
    assert load_config(str(path))["engine"]["engine"] == "main"


def test_flat_config(tmp_path, config):
    """Test section.key = value files with comments."""
    path = tmp_path / "run.cfg"
    path.write_text("# overrides\nengine.mode = layered\nparams.reference_edges = 4096  # pinned\n\n")
    updated = apply_overrides(config, load_flat_config(str(path)))
    assert updated["engine"]["mode"] == "layered"
    assert updated["params"]["reference_edges"] == 4096
    assert config["engine"]["mode"] == "general"

    path.write_text("mode = layered\n")
    with pytest.raises(ValueError):
        load_flat_config(str(path))


@pytest.mark.parametrize(
    "overrides",
    [
        {"nowhere": {"x": "1"}},
        {"engine": {"speed": "fast"}},
        {"engine": {"engine": "quantum"}},
        {"params": {"epsilon": "1/2"}},
        {"matmul": {"block_size": "0"}},
    ],
)
def test_bad_overrides(config, overrides):
    with pytest.raises(ValueError):
        apply_overrides(config, overrides)


def test_parse_fraction_is_exact():
    assert parse_fraction("1/24") == Fraction(1, 24)
    assert parse_fraction(0.1) == Fraction(1, 10)
    assert parse_fraction("0.0098109") == Fraction(98109, 10**7)


def test_registry_covers_every_engine_and_mode(config):
    """Test the counter built for each (engine, mode)."""
    expected = {
        ("naive", "general"): NaiveCycleCounter,
        ("naive", "layered"): FourCopyCounter,
        ("main", "general"): GeneralReductionCounter,
        ("main", "layered"): FourCopyCounter,
        ("oracle", "general"): GeneralOracleCounter,
        ("oracle", "layered"): LayeredOracleCounter,
        ("warmup", "layered"): WarmupLayeredCounter,
    }
    for (engine, mode), cls in expected.items():
        selected = apply_overrides(config, {"engine": {"engine": engine, "mode": mode}})
        assert isinstance(build_counter(selected), cls)
    assert isinstance(build_oracle(apply_overrides(config, {"engine": {"mode": "layered"}})), LayeredOracleCounter)


def test_warmup_rejects_general_streams(config):
    selected = apply_overrides(config, {"engine": {"engine": "warmup"}})
    assert not create_container().supports("warmup", "general")
    with pytest.raises(InvalidParam):
        build_counter(selected)


def test_empty_registry_rejects_everything(config):
    with pytest.raises(InvalidParam):
        Container().resolve(config)


def test_fixed_thresholds_follow_reference_edges(config):
    assert fixed_thresholds(config) is None
    pinned = apply_overrides(config, {"params": {"reference_edges": 2**24}})
    assert fixed_thresholds(pinned).high == 32768
