import argparse
from typing import Dict, Optional, Type

from src.factory.model_manager import ModelManager
from src.model.errors import InvalidArgument
from src.strategy.cocycle_strategy import CocycleStrategy
from src.strategy.construct_strategy import ConstructStrategy
from src.strategy.minimize_strategy import MinimizeStrategy
from src.strategy.run_strategy import RunStrategy
from src.strategy.spectrum_strategy import SpectrumStrategy
from src.strategy.sweep_strategy import SweepStrategy
from src.strategy.verify_strategy import VerifyStrategy


class RunStrategyFactory:
    _strategies: Dict[str, Type[RunStrategy]] = {
        "construct": ConstructStrategy,
        "verify": VerifyStrategy,
        "minimize": MinimizeStrategy,
        "cocycle": CocycleStrategy,
        "spectrum": SpectrumStrategy,
        "sweep": SweepStrategy,
    }

    @classmethod
    def create_strategy(cls, command: str, manager: Optional[ModelManager] = None) -> RunStrategy:
        strategy_class = cls._strategies.get(command)
        if not strategy_class:
            raise InvalidArgument(
                f"Command '{command}' not supported. Available commands: {', '.join(cls._strategies)}"
            )

        return strategy_class(manager)

    @classmethod
    def build_parser(cls) -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(
            prog="amspec",
            description="Twist maps with analytic invariant curves and their quasi-periodic Schrödinger operators",
        )
        subparsers = parser.add_subparsers(dest="command", required=True)
        for command, strategy_class in cls._strategies.items():
            strategy_class.add_arguments(subparsers.add_parser(command, help=strategy_class.help))
        return parser
