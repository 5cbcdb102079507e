from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from src.model.errors import InvalidArgument


@dataclass(frozen=True)
class RotationEstimate:
    value: float
    error: float
    n_iter: int


@dataclass(frozen=True, eq=False)
class SpectralReport:
    """Dirichlet finite-section spectrum and the IDS sampled at its eigenvalues."""

    eigenvalues: np.ndarray
    ids_samples: List[Tuple[float, float]]
    top_eigenvalue: float
    section_size: int
    phase: float

    def __post_init__(self):
        if self.eigenvalues.size and np.any(np.diff(self.eigenvalues) < 0):
            raise InvalidArgument("Spectral report eigenvalues must be sorted ascending")

    def counting(self, energy: float) -> float:
        """Fraction of eigenvalues <= energy"""
        return float(np.searchsorted(self.eigenvalues, energy, side="right")) / self.section_size


@dataclass(frozen=True, eq=False)
class ResonanceReport:
    """Resonances n_j of a phase, ordered by strictly increasing |n_j|."""

    epsilon0: float
    resonances: np.ndarray
    phase: float
    K: int

    def __post_init__(self):
        if np.any(np.diff(np.abs(self.resonances)) <= 0):
            raise InvalidArgument("Resonances must have strictly increasing |n|")


@dataclass(frozen=True, eq=False)
class EdgeProbe:
    sizes: np.ndarray
    top_eigenvalues: np.ndarray
    rayleigh_bounds: np.ndarray
    # C in top_eigenvalue ~ -C/n^2
    fitted_constant: float


@dataclass(frozen=True)
class IdsCrossCheck:
    energy: float
    counting: float
    rotation: float
    disagreement: bool


@dataclass(frozen=True)
class DualCheck:
    residual: float
    relative_residual: float
    decay_rate: float
    potential_residual: float


@dataclass(frozen=True)
class HomogeneityProbe:
    # rows (E, epsilon, covered fraction)
    samples: List[Tuple[float, float, float]] = field(default_factory=list)
    kappa: float = 0.0
