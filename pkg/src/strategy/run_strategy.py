import argparse
import csv
import io
import json
import logging
import math
import sys
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional, Sequence, Tuple

from src.factory.model_manager import ModelManager, get_manager
from src.model.errors import AmspecError, InvalidArgument
from src.model.run_config import RunConfig
from src.model.twist_model import TwistModel

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.15g"


class RunStrategy(ABC):
    """Command-line command strategy abstract base class"""

    command = ""
    action = ""
    help = ""

    def __init__(self, manager: Optional[ModelManager] = None):
        self.manager = manager or get_manager()

    @classmethod
    @abstractmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        """Register the command's flags on its subparser"""
        pass

    @abstractmethod
    def run(self, args: argparse.Namespace) -> int:
        """
        Run the command

        Returns:
            int: exit code, 0 on success and 1 when a verification fails

        Raises:
            AmspecError: mapped to its exit code by ``execute``
        """
        pass

    def execute(self, args: argparse.Namespace) -> int:
        """Run and translate errors into the exit-code contract"""
        try:
            return self.run(args)
        except AmspecError as e:
            print(f"Failed to {self.action}: {e}", file=sys.stderr)
            return e.exit_code
        except (OSError, ValueError) as e:
            print(f"Failed to {self.action}: {e}", file=sys.stderr)
            return 2

    # ----------------------------------------------------------------- helpers

    def load_model(self, args: argparse.Namespace) -> TwistModel:
        if not getattr(args, "model", None):
            raise InvalidArgument("A model file is required (--model)")
        return self.manager.load_model(args.model)

    def default(self, args: argparse.Namespace, name: str, key: str):
        value = getattr(args, name, None)
        return value if value is not None else self.manager.default(key)

    def run_config(self, args: argparse.Namespace, options: Dict[str, Any]) -> RunConfig:
        return RunConfig(
            command=self.command,
            model_path=getattr(args, "model", None),
            tolerances=dict(self.manager.config["tolerances"]),
            output_path=getattr(args, "output", None),
            parallelism=int(self.manager.config["parallelism"]),
            options=options,
        )

    def header_line(self, config: RunConfig) -> str:
        header: Dict[str, Any] = {"run": config.header()}
        if config.model_path:
            header["model_sha256"] = self.manager.file_hash(config.model_path)
        return "# " + json.dumps(header, sort_keys=True)

    @staticmethod
    def format_value(value: Any) -> str:
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, float):
            if math.isnan(value):
                return "nan"
            return FLOAT_FORMAT % value
        return str(value)

    @staticmethod
    def format_table(headers: List[str], rows: List[Tuple]) -> str:
        if not rows:
            return "No data found"

        col_widths = []
        for i, header in enumerate(headers):
            max_width = len(header)
            for row in rows:
                max_width = max(max_width, len(RunStrategy.format_value(row[i])))
            col_widths.append(max_width)

        result = [" | ".join(headers[i].ljust(col_widths[i]) for i in range(len(headers))),
                  " | ".join("-" * col_widths[i] for i in range(len(headers)))]
        for row in rows:
            result.append(" | ".join(RunStrategy.format_value(row[i]).ljust(col_widths[i]) for i in range(len(headers))))
        return "\n".join(result)

    def render_csv(self, config: RunConfig, columns: Sequence[str], rows: Sequence[Sequence[Any]],
                   truncated: bool = False) -> str:
        buffer = io.StringIO()
        buffer.write(self.header_line(config) + "\n")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([self.format_value(value) for value in row])
        if truncated:
            buffer.write("# truncated\n")
        return buffer.getvalue()

    def render_json(self, config: RunConfig, payload: Dict[str, Any]) -> str:
        header: Dict[str, Any] = {"run": config.header()}
        if config.model_path:
            header["model_sha256"] = self.manager.file_hash(config.model_path)
        return json.dumps({"header": header, "result": payload}, sort_keys=True, indent=1) + "\n"

    @staticmethod
    def emit(text: str, path: Optional[str]) -> None:
        """Write to the output file, or stdout when no file is given"""
        if path:
            with open(path, "w", encoding="utf-8", newline="") as f:
                f.write(text)
            logger.info("[Output] Wrote %s", path)
        else:
            sys.stdout.write(text)
