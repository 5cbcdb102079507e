from .config_loader import ConfigLoader, load_config, reset_config
from .ids_factory import IdsStrategyFactory
from .model_manager import ModelManager, get_manager, reset_manager

__all__ = ["ConfigLoader", "load_config", "reset_config", "IdsStrategyFactory", "ModelManager", "get_manager",
           "reset_manager"]
