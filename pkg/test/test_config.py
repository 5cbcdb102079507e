"""
Configuration loading, environment overrides, the model registry and the run header
"""

import json

import pytest
import yaml

from src.factory.config_loader import DEFAULT_CONFIG, ConfigLoader, load_config, reset_config
from src.factory.model_manager import ModelManager, get_manager
from src.factory.strategy_factory import RunStrategyFactory
from src.model.errors import InvalidArgument, ModelLoadError
from src.model.run_config import RunConfig
from src.model.twist_model import TwistModel


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def test_defaults_without_file(workdir):
    config = load_config()
    assert config == DEFAULT_CONFIG
    assert config is not ConfigLoader.load()


def test_yaml_overrides_merge_with_defaults(workdir):
    (workdir / "amspec-config.yaml").write_text(
        "tolerances:\n  invariance: 1e-7\ndefaults:\n  modes: 64\nparallelism: 3\n", encoding="utf-8")
    config = load_config()
    assert config["tolerances"]["invariance"] == 1e-7
    assert config["tolerances"]["reduction"] == DEFAULT_CONFIG["tolerances"]["reduction"]
    assert config["defaults"]["modes"] == 64
    assert config["defaults"]["grid"] == DEFAULT_CONFIG["defaults"]["grid"]
    assert config["parallelism"] == 3


def test_json_fallback(workdir):
    (workdir / "amspec-config.json").write_text(json.dumps({"tolerances": {"dual": 1e-6}}), encoding="utf-8")
    assert load_config()["tolerances"]["dual"] == 1e-6


def test_config_file_from_environment(workdir, monkeypatch):
    path = workdir / "custom.yml"
    path.write_text(yaml.safe_dump({"defaults": {"phases": 4}}), encoding="utf-8")
    monkeypatch.setenv("AMSPEC_CONFIG_FILE", str(path))
    assert load_config()["defaults"]["phases"] == 4


@pytest.mark.parametrize("content", [
    "solver:\n  method: newton\n",
    "tolerances:\n  invariance: -1.0\n",
    "defaults:\n  modes: 0\n",
    "parallelism: 0\n",
    "- just\n- a list\n",
])
def test_invalid_files_are_rejected(workdir, content):
    (workdir / "amspec-config.yaml").write_text(content, encoding="utf-8")
    with pytest.raises(ValueError):
        load_config()


def test_environment_overrides(workdir, monkeypatch):
    monkeypatch.setenv("AMSPEC_TOL_INVARIANCE", "1e-6")
    monkeypatch.setenv("AMSPEC_WORKERS", "4")
    config = load_config()
    assert config["tolerances"]["invariance"] == 1e-6
    assert config["parallelism"] == 4


def test_bad_environment_values(workdir, monkeypatch):
    monkeypatch.setenv("AMSPEC_WORKERS", "many")
    with pytest.raises(ValueError):
        load_config()
    reset_config()
    monkeypatch.delenv("AMSPEC_WORKERS")
    monkeypatch.setenv("AMSPEC_TOL_DUAL", "tight")
    with pytest.raises(ValueError):
        load_config()


def test_config_is_cached_until_reset(workdir, monkeypatch):
    assert load_config()["parallelism"] == 1
    monkeypatch.setenv("AMSPEC_WORKERS", "2")
    assert load_config()["parallelism"] == 1
    reset_config()
    assert load_config()["parallelism"] == 2


# ------------------------------------------------------------------ model manager

def test_manager_tolerances(workdir):
    manager = get_manager()
    assert manager is get_manager()
    assert manager.tolerance("reduction") == 1e-8
    assert manager.default("modes") == 256
    with pytest.raises(InvalidArgument):
        manager.tolerance("speed")


def test_manager_rejects_bad_files(workdir):
    manager = get_manager()
    with pytest.raises(ModelLoadError):
        manager.load_model(str(workdir / "missing.json"))
    (workdir / "broken.json").write_text("{not json", encoding="utf-8")
    with pytest.raises(ModelLoadError):
        manager.load_model(str(workdir / "broken.json"))
    (workdir / "other.json").write_text(json.dumps({"kind": "something else"}), encoding="utf-8")
    with pytest.raises(ModelLoadError):
        manager.load_model(str(workdir / "other.json"))


def test_model_save_and_load(workdir, free_model):
    path = str(workdir / "free.json")
    digest = ModelManager.save_model(free_model, path)
    assert digest == ModelManager.file_hash(path)
    manager = get_manager()
    loaded = manager.load_model(path)
    assert isinstance(loaded, TwistModel)
    assert loaded.alpha == free_model.alpha
    assert loaded.n_modes == free_model.n_modes
    assert manager.load_model(path) is loaded


def test_model_cache_follows_file_content(workdir, free_model, golden_model):
    path = str(workdir / "model.json")
    ModelManager.save_model(free_model, path)
    manager = get_manager()
    first = manager.load_model(path)
    ModelManager.save_model(golden_model, path)
    second = manager.load_model(path)
    assert second is not first
    assert second.residuals["invariance"] == pytest.approx(golden_model.residuals["invariance"])


# -------------------------------------------------------------------- run config

def test_run_header_leaves_out_output_and_workers():
    run = RunConfig("sweep", model_path="m.json", tolerances={"b": 2.0, "a": 1.0}, output_path="out.csv",
                    parallelism=4, options={"points": 5})
    header = run.header()
    assert list(header) == ["command", "model_path", "tolerances", "options"]
    assert list(header["tolerances"]) == ["a", "b"]
    assert header == RunConfig("sweep", model_path="m.json", tolerances={"a": 1.0, "b": 2.0},
                               options={"points": 5}).header()


@pytest.mark.parametrize("kwargs", [
    {"command": "plot"},
    {"command": "verify", "tolerances": {"dual": 0.0}},
    {"command": "verify", "parallelism": 0},
])
def test_run_config_validation(kwargs):
    with pytest.raises(InvalidArgument):
        RunConfig(**kwargs)


def test_unknown_command():
    with pytest.raises(InvalidArgument):
        RunStrategyFactory.create_strategy("plot")
