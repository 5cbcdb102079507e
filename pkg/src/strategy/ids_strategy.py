from abc import ABC, abstractmethod
from functools import cached_property
from typing import Union

import numpy as np

from src.model.errors import InvalidArgument
from src.model.fourier_series import FourierSeries, OffsetSeries
from src.tools.aubry import TridiagonalOperator
from src.tools.cocycles import CocyclesTools

SeriesLike = Union[FourierSeries, OffsetSeries]


class IdsStrategy(ABC):
    """Integrated density of states N(E) of H_{V, alpha, phi0}"""

    method = ""

    def __init__(self, V: SeriesLike, alpha: float, phi0: float = 0.0):
        self.V = V
        self.alpha = alpha
        self.phi0 = phi0

    @abstractmethod
    def estimate(self, energy: float) -> float:
        """
        Estimate N(energy)

        Returns:
            float: value in [0, 1], non-decreasing in energy
        """
        pass


class CountingIdsStrategy(IdsStrategy):
    """Fraction of Dirichlet finite-section eigenvalues <= E"""

    method = "counting"

    def __init__(self, V: SeriesLike, alpha: float, phi0: float = 0.0, size: int = 2000):
        super().__init__(V, alpha, phi0)
        if size < 2:
            raise InvalidArgument(f"Finite section needs at least 2 sites, got {size}")
        self.size = size

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        sites = self.phi0 + np.arange(self.size) * self.alpha
        return TridiagonalOperator(self.V(sites)).eigenvalues()

    def estimate(self, energy: float) -> float:
        return float(np.searchsorted(self.eigenvalues, energy, side="right")) / self.size


class RotationIdsStrategy(IdsStrategy):
    """N(E) = 1 - 2 rho(E), rho the fibered rotation number of S_E^V"""

    method = "rotation"

    def __init__(self, V: SeriesLike, alpha: float, phi0: float = 0.0, iterations: int = 100000,
                 phases: int = 8):
        super().__init__(V, alpha, phi0)
        self.iterations = iterations
        self.phases = phases

    def estimate(self, energy: float) -> float:
        cocycle = CocyclesTools.schrodinger_cocycle(self.V, energy, self.alpha)
        rho = CocyclesTools.fibered_rotation_number(cocycle, self.iterations, phases=self.phases, phi0=self.phi0)
        return float(min(max(1.0 - 2.0 * rho, 0.0), 1.0))
