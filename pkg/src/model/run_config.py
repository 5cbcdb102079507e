from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from src.model.errors import InvalidArgument

COMMANDS = ("construct", "verify", "minimize", "cocycle", "spectrum", "sweep")


@dataclass
class RunConfig:
    """Everything that determines the output of one command-line run."""

    command: str
    model_path: Optional[str] = None
    tolerances: Dict[str, float] = field(default_factory=dict)
    output_path: Optional[str] = None
    parallelism: int = 1
    options: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InvalidArgument(f"Unknown command '{self.command}'. Available: {', '.join(COMMANDS)}")
        for name, value in self.tolerances.items():
            if not value > 0:
                raise InvalidArgument(f"Tolerance '{name}' must be positive, got {value}")
        if self.parallelism < 1:
            raise InvalidArgument(f"Parallelism must be at least 1, got {self.parallelism}")

    def header(self) -> Dict[str, Any]:
        """Reproducibility header; output path and parallelism are left out so output bytes do not depend on them."""
        return {
            "command": self.command,
            "model_path": self.model_path,
            "tolerances": dict(sorted(self.tolerances.items())),
            "options": dict(sorted(self.options.items())),
        }
