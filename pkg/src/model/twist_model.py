import math
from dataclasses import dataclass, field
from typing import Any, Dict

import numpy as np

from src.model.circle_diffeo import CircleDiffeo
from src.model.errors import InvalidArgument
from src.model.fourier_series import FourierSeries, OffsetSeries
from src.model.frequency import Frequency


@dataclass(frozen=True)
class CylinderState:
    """Point (x, r) of the cylinder; x is a lift, the phase is x mod 1."""

    x: float
    r: float

    @property
    def phase(self) -> float:
        return self.x % 1.0


@dataclass(frozen=True, eq=False)
class Configuration:
    """Finite segment x_base, ..., x_{base+L-1} of a configuration."""

    points: np.ndarray
    base_index: int = 0

    def __post_init__(self):
        points = np.array(self.points, dtype=float)
        if points.ndim != 1:
            raise InvalidArgument(f"Configuration points must be one-dimensional, got shape {points.shape}")
        points.setflags(write=False)
        object.__setattr__(self, "points", points)

    def __len__(self) -> int:
        return self.points.size

    @property
    def momenta(self) -> np.ndarray:
        """r_n = x_n - x_{n-1} for n = 1..L-1"""
        return np.diff(self.points)

    def with_points(self, points: np.ndarray) -> "Configuration":
        return Configuration(points, self.base_index)

    def to_list(self) -> list:
        return [float(v) for v in self.points]


@dataclass(frozen=True)
class PeriodicOrbitSpec:
    """Rotation number p/q and drift a of a periodic configuration x_{n+q} = x_n + p."""

    p: int
    q: int
    a: float = 0.0

    def __post_init__(self):
        if self.q < 1:
            raise InvalidArgument(f"Period q must be positive, got {self.q}")
        if math.gcd(self.p, self.q) != 1:
            raise InvalidArgument(f"p and q must be coprime, got {self.p}/{self.q}")

    @property
    def rotation_number(self) -> float:
        return self.p / self.q


@dataclass(frozen=True, eq=False)
class TwistModel:
    """Twist map psi_f together with its certified invariant graph r = gamma(x).

    The curve carries the dynamics g = phi o r_alpha o phi^-1 and V = -f' o phi - 2
    is the potential of the associated Schrödinger operator.
    """

    frequency: Frequency
    phi: CircleDiffeo
    f: FourierSeries
    gamma: OffsetSeries
    V: OffsetSeries
    n_modes: int
    grid: int
    strip_h0: float
    residuals: Dict[str, float] = field(default_factory=dict)

    @property
    def alpha(self) -> float:
        return self.frequency.value

    def to_dict(self) -> Dict[str, Any]:
        return {
            "alpha": self.frequency.to_dict(),
            "phi": self.phi.to_dict(),
            "f": self.f.to_dict(),
            "gamma": self.gamma.to_dict(),
            "V": self.V.to_dict(),
            "meta": {
                "modes": self.n_modes,
                "grid": self.grid,
                "strip_h0": self.strip_h0,
                "residuals": {name: float(value) for name, value in self.residuals.items()},
            },
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TwistModel":
        missing = [key for key in ("alpha", "phi", "f", "gamma", "V", "meta") if key not in data]
        if missing:
            raise InvalidArgument(f"Model is missing required fields: {', '.join(missing)}")
        meta = data["meta"]
        try:
            return cls(
                frequency=Frequency.from_dict(data["alpha"]),
                phi=CircleDiffeo.from_dict(data["phi"]),
                f=FourierSeries.from_dict(data["f"]),
                gamma=OffsetSeries.from_dict(data["gamma"]),
                V=OffsetSeries.from_dict(data["V"]),
                n_modes=int(meta["modes"]),
                grid=int(meta["grid"]),
                strip_h0=float(meta.get("strip_h0", 1.0)),
                residuals=dict(meta.get("residuals", {})),
            )
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, InvalidArgument):
                raise
            raise InvalidArgument(f"Malformed model metadata: {e}")


@dataclass(frozen=True, eq=False)
class InducedCircleMap:
    """g built two ways: phi o r_alpha o phi^-1 and x + gamma(x) + f(x)."""

    conjugated: CircleDiffeo
    direct: CircleDiffeo
    disagreement: float
