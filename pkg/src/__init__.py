import logging
import os
import sys
from typing import List, Optional

from dotenv import load_dotenv

load_dotenv()


def main(argv: Optional[List[str]] = None) -> int:
    """amspec command-line entry point"""
    logging.basicConfig(
        level=os.getenv("AMSPEC_LOG_LEVEL", "INFO").upper(),
        stream=sys.stderr,
        format="%(levelname)s %(message)s",
    )
    from src.factory.strategy_factory import RunStrategyFactory

    args = RunStrategyFactory.build_parser().parse_args(argv)
    strategy = RunStrategyFactory.create_strategy(args.command)
    return strategy.execute(args)


if __name__ == "__main__":
    sys.exit(main())
