import hashlib
import json
import logging
import os
from typing import Any, Dict, Optional, Tuple

from src.factory.config_loader import load_config, reset_config
from src.model.errors import InvalidArgument, ModelLoadError
from src.model.twist_model import TwistModel

logger = logging.getLogger(__name__)


class ModelManager:
    """Registry of loaded models keyed by path, invalidated when the file content changes"""

    # Class-level configuration cache
    _cached_config: Optional[Dict[str, Any]] = None

    def __init__(self):
        self._models: Dict[str, Tuple[str, TwistModel]] = {}
        self._config: Dict[str, Any] = {}

        # Automatically load configuration
        self._load_config()

    def _load_config(self):
        """Load configuration once per process"""
        if ModelManager._cached_config is None:
            ModelManager._cached_config = load_config()
        self._config = ModelManager._cached_config

    @property
    def config(self) -> Dict[str, Any]:
        return self._config

    def tolerance(self, name: str) -> float:
        tolerances = self._config["tolerances"]
        if name not in tolerances:
            raise InvalidArgument(
                f"Tolerance '{name}' is not configured. Available tolerances: {', '.join(sorted(tolerances))}"
            )
        return float(tolerances[name])

    def default(self, name: str):
        return self._config["defaults"][name]

    @staticmethod
    def file_hash(path: str) -> str:
        """SHA-256 of the file bytes"""
        digest = hashlib.sha256()
        with open(path, "rb") as f:
            for chunk in iter(lambda: f.read(1 << 16), b""):
                digest.update(chunk)
        return digest.hexdigest()

    def load_model(self, path: str) -> TwistModel:
        """
        Load a model file, reusing the parsed model while the bytes are unchanged

        Raises:
            ModelLoadError: file missing, not JSON, or not a model
        """
        if not os.path.isfile(path):
            raise ModelLoadError(f"Model file '{path}' does not exist")
        digest = self.file_hash(path)
        cached = self._models.get(path)
        if cached and cached[0] == digest:
            return cached[1]
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
            model = TwistModel.from_dict(data)
        except json.JSONDecodeError as e:
            raise ModelLoadError(f"Model file '{path}' is not valid JSON: {e}")
        except InvalidArgument as e:
            raise ModelLoadError(f"Model file '{path}' is not a valid model: {e}")
        logger.info("[Model] Loaded %s (%d modes, sha256 %s)", path, model.n_modes, digest[:12])
        self._models[path] = (digest, model)
        return model

    @staticmethod
    def save_model(model: TwistModel, path: str) -> str:
        """Write the model as JSON and return its SHA-256"""
        with open(path, "w", encoding="utf-8") as f:
            json.dump(model.to_dict(), f, indent=1)
            f.write("\n")
        logger.info("[Model] Wrote %s", path)
        return ModelManager.file_hash(path)


# Global model manager instance
_manager_instance: Optional[ModelManager] = None


def get_manager() -> ModelManager:
    """Get global model manager instance"""
    global _manager_instance
    if _manager_instance is None:
        _manager_instance = ModelManager()
    return _manager_instance


def reset_manager():
    """Reset manager (mainly used for testing)"""
    global _manager_instance
    _manager_instance = None
    # Also clear configuration cache
    ModelManager._cached_config = None
    reset_config()
