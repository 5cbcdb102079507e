import re
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, Union

import numpy as np

from src.model.errors import InvalidArgument
from src.model.fourier_series import FourierSeries

_HARMONIC = re.compile(r"^\s*([cs])(\d+)\s*=\s*([-+0-9.eE]+)\s*$")


@dataclass(frozen=True, eq=False)
class CircleDiffeo:
    """Circle map given by its lift x -> x + p(x), p 1-periodic.

    The lift commutes with integer translations by construction; orientation
    (1 + p' > 0) is checked by the tools that need it, not on construction,
    so that invalid maps can still be loaded and reported.
    """

    periodic_part: FourierSeries

    @classmethod
    def identity(cls, n_modes: int = 0) -> "CircleDiffeo":
        return cls(FourierSeries.zeros(n_modes))

    @classmethod
    def rotation(cls, alpha: float, n_modes: int = 0) -> "CircleDiffeo":
        return cls(FourierSeries.constant(alpha, n_modes))

    @classmethod
    def from_harmonics(cls, harmonics: Dict[str, float], n_modes: int = 256) -> "CircleDiffeo":
        """Build phi from derivative amplitudes.

        ``c<k>=a`` adds a*sin(2*pi*k*x)/(2*pi*k) to p, so phi' gains a*cos(2*pi*k*x);
        ``s<k>=b`` adds -b*cos(2*pi*k*x)/(2*pi*k), so phi' gains b*sin(2*pi*k*x).
        """
        modes: Dict[int, complex] = {}
        for key, amplitude in harmonics.items():
            kind, k = key[0], int(key[1:])
            if k < 1:
                raise InvalidArgument(f"Harmonic index must be positive, got '{key}'")
            scale = amplitude / (2.0 * np.pi * k)
            # sin -> -i/2 e^{ikx}; -cos -> -1/2 e^{ikx}
            contribution = -0.5j * scale if kind == "c" else -0.5 * scale
            modes[k] = modes.get(k, 0j) + contribution
        if modes and max(modes) > n_modes:
            raise InvalidArgument(f"Harmonic {max(modes)} exceeds the {n_modes} stored modes")
        return cls(FourierSeries.from_modes(modes, n_modes))

    @staticmethod
    def parse_harmonics(text: str) -> Dict[str, float]:
        """Parse a spec such as ``c1=0.3,s2=0.05`` (empty or ``id`` means identity)."""
        harmonics: Dict[str, float] = {}
        if text is None or text.strip() in ("", "id", "identity"):
            return harmonics
        for part in text.split(","):
            match = _HARMONIC.match(part)
            if not match:
                raise InvalidArgument(
                    f"Invalid harmonic '{part.strip()}': expected c<k>=<amplitude> or s<k>=<amplitude>"
                )
            kind, k, value = match.groups()
            try:
                harmonics[f"{kind}{int(k)}"] = float(value)
            except ValueError:
                raise InvalidArgument(f"Invalid amplitude in '{part.strip()}'")
        return harmonics

    @property
    def n_modes(self) -> int:
        return self.periodic_part.n_modes

    @cached_property
    def derivative_part(self) -> FourierSeries:
        return self.periodic_part.derivative()

    @cached_property
    def grid_samples(self) -> np.ndarray:
        m = 4 * max(self.n_modes, 256)
        return self.periodic_part(np.arange(m) / m)

    def __call__(self, x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        return x + self.periodic_part(x)

    def derivative(self, x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        return 1.0 + self.derivative_part(x)

    def min_derivative(self, grid: int = 0) -> float:
        m = grid or 4 * max(self.n_modes, 256)
        return float(np.min(self.derivative(np.arange(m) / m)))

    def trimmed(self, rel_floor: float = 1e-15) -> "CircleDiffeo":
        return CircleDiffeo(self.periodic_part.trimmed(rel_floor))

    def to_dict(self) -> Dict[str, Any]:
        return {"periodic_part": self.periodic_part.to_dict()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CircleDiffeo":
        if "periodic_part" not in data:
            raise InvalidArgument("Circle diffeomorphism entry must contain 'periodic_part'")
        return cls(FourierSeries.from_dict(data["periodic_part"]))
