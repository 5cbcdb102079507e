import json
import logging
import os
from copy import deepcopy
from typing import Any, Dict, Optional

import yaml

logger = logging.getLogger(__name__)

DEFAULT_CONFIG: Dict[str, Any] = {
    "tolerances": {
        "invariance": 1e-9,
        "mean_f": 1e-9,
        "g_consistency": 1e-9,
        "reduction": 1e-8,
        "z_form": 1e-10,
        "bloch": 1e-10,
        "potential": 1e-9,
        "dual": 1e-8,
        "nonpositivity": 1e-10,
        "residual": 1e-10,
    },
    "defaults": {
        "modes": 256,
        "grid": 2048,
        "iterations": 100000,
        "section_size": 2000,
        "phases": 8,
        "renormalization": 32,
        "uh_iterations": 1000,
        "epsilon": 0.01,
    },
    "parallelism": 1,
}

SECTIONS = ("tolerances", "defaults", "parallelism")


class ConfigLoader:
    """Configuration loader supporting yaml/json files with environment overrides"""

    # Class-level configuration cache
    _cached_config: Optional[Dict[str, Any]] = None

    @staticmethod
    def load() -> Dict[str, Any]:
        """
        Load configuration, priority:
        1. AMSPEC_CONFIG_FILE environment variable (default ./amspec-config.yaml) if the file exists
        2. ./amspec-config.json if it exists
        3. Built-in defaults
        AMSPEC_TOL_<NAME> and AMSPEC_WORKERS are applied on top of whichever source was used.
        """
        if ConfigLoader._cached_config is not None:
            return deepcopy(ConfigLoader._cached_config)

        config_file = os.getenv("AMSPEC_CONFIG_FILE", "./amspec-config.yaml")

        if os.path.exists(config_file):
            config = ConfigLoader._load_from_file(config_file)
        elif os.path.exists("./amspec-config.json"):
            config = ConfigLoader._load_from_file("./amspec-config.json")
        else:
            logger.info("[Config] No configuration file found, using built-in defaults")
            config = deepcopy(DEFAULT_CONFIG)

        ConfigLoader._apply_env(config)
        ConfigLoader._validate(config)
        ConfigLoader._cached_config = config
        return deepcopy(config)

    @staticmethod
    def _load_from_file(config_file: str) -> Dict[str, Any]:
        """Load from configuration file, filling unspecified keys from the defaults"""
        logger.info("[Config] Using configuration file: %s", config_file)

        with open(config_file, "r", encoding="utf-8") as f:
            if config_file.endswith(".yaml") or config_file.endswith(".yml"):
                loaded = yaml.safe_load(f) or {}
            elif config_file.endswith(".json"):
                loaded = json.load(f)
            else:
                raise ValueError(f"Unsupported configuration file format: {config_file}")

        if not isinstance(loaded, dict):
            raise ValueError(f"Configuration file {config_file} must contain a mapping")
        unknown = sorted(set(loaded) - set(SECTIONS))
        if unknown:
            raise ValueError(f"Unknown configuration section(s): {', '.join(unknown)}. Allowed: {', '.join(SECTIONS)}")

        config = deepcopy(DEFAULT_CONFIG)
        for section in ("tolerances", "defaults"):
            config[section].update(loaded.get(section) or {})
        if "parallelism" in loaded:
            config["parallelism"] = loaded["parallelism"]
        return config

    @staticmethod
    def _apply_env(config: Dict[str, Any]) -> None:
        """AMSPEC_TOL_<NAME>=<value> overrides a tolerance, AMSPEC_WORKERS the worker count"""
        for key, value in os.environ.items():
            if key.startswith("AMSPEC_TOL_"):
                name = key[len("AMSPEC_TOL_"):].lower()
                try:
                    config["tolerances"][name] = float(value)
                except ValueError:
                    raise ValueError(f"Environment variable {key} must be a number, got '{value}'")
        workers = os.getenv("AMSPEC_WORKERS")
        if workers:
            try:
                config["parallelism"] = int(workers)
            except ValueError:
                raise ValueError(f"AMSPEC_WORKERS must be an integer, got '{workers}'")

    @staticmethod
    def _validate(config: Dict[str, Any]) -> None:
        # PyYAML reads exponents without a dot (1e-9) as strings
        for name, value in list(config["tolerances"].items()):
            if isinstance(value, str):
                try:
                    config["tolerances"][name] = value = float(value)
                except ValueError:
                    pass
            if not isinstance(value, (int, float)) or not value > 0:
                raise ValueError(f"Tolerance '{name}' must be a positive number, got {value!r}")
        for name, value in config["defaults"].items():
            if not isinstance(value, (int, float)) or not value > 0:
                raise ValueError(f"Default '{name}' must be a positive number, got {value!r}")
        if not isinstance(config["parallelism"], int) or config["parallelism"] < 1:
            raise ValueError(f"'parallelism' must be a positive integer, got {config['parallelism']!r}")


def load_config() -> Dict[str, Any]:
    """Convenience function: load configuration"""
    return ConfigLoader.load()


def reset_config() -> None:
    """Drop the cached configuration (tests change the environment between loads)"""
    ConfigLoader._cached_config = None
