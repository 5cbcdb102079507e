from typing import Dict, Type

from src.model.errors import InvalidArgument
from src.strategy.ids_strategy import CountingIdsStrategy, IdsStrategy, RotationIdsStrategy


class IdsStrategyFactory:
    _strategies: Dict[str, Type[IdsStrategy]] = {
        "counting": CountingIdsStrategy,
        "rotation": RotationIdsStrategy,
    }

    @classmethod
    def methods(cls):
        return sorted(cls._strategies)

    @classmethod
    def create_strategy(cls, method: str, V, alpha: float, phi0: float = 0.0, **params) -> IdsStrategy:
        strategy_class = cls._strategies.get(method.lower())
        if not strategy_class:
            raise InvalidArgument(
                f"IDS method '{method}' not supported. Available methods: {', '.join(cls.methods())}"
            )

        return strategy_class(V, alpha, phi0, **params)
