from .ids_strategy import CountingIdsStrategy, IdsStrategy, RotationIdsStrategy
from .run_strategy import RunStrategy

__all__ = ["RunStrategy", "IdsStrategy", "CountingIdsStrategy", "RotationIdsStrategy"]
