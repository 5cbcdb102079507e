from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from src.model.circle_diffeo import CircleDiffeo
from src.model.errors import InvalidArgument
from src.model.fourier_series import FourierSeries

SL2 = "SL2"
GL2 = "GL2"


@dataclass(frozen=True, eq=False)
class MatrixFunction:
    """Periodic 2x2 real matrix function, one Fourier series per entry (a, b, c, d)."""

    entries: Tuple[FourierSeries, FourierSeries, FourierSeries, FourierSeries]

    def __post_init__(self):
        if len(self.entries) != 4:
            raise InvalidArgument(f"A 2x2 matrix function needs 4 entries, got {len(self.entries)}")
        object.__setattr__(self, "entries", tuple(self.entries))

    @classmethod
    def constant(cls, matrix) -> "MatrixFunction":
        m = np.asarray(matrix, dtype=float)
        return cls(tuple(FourierSeries.constant(v) for v in m.ravel()))

    @classmethod
    def fit(cls, fn: Callable[[np.ndarray], np.ndarray], n_modes: int, grid: int = 0,
            force: bool = False, label: str = "matrix") -> "MatrixFunction":
        """Sample fn on a uniform grid (default 4*n_modes points) and fit each entry."""
        m = grid or max(4 * n_modes, 64)
        values = np.asarray(fn(np.arange(m) / m), dtype=float)
        names = ("a", "b", "c", "d")
        return cls(tuple(
            FourierSeries.fit(values[:, i // 2, i % 2], n_modes, force=force, label=f"{label}[{names[i]}]")
            for i in range(4)
        ))

    @property
    def n_modes(self) -> int:
        return max(entry.n_modes for entry in self.entries)

    def __call__(self, x, delta: float = 0.0) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if delta == 0.0:
            values = [entry(x) for entry in self.entries]
            out = np.empty(x.shape + (2, 2), dtype=float)
        else:
            values = [entry.evaluate(x, delta) for entry in self.entries]
            out = np.empty(x.shape + (2, 2), dtype=complex)
        out[..., 0, 0], out[..., 0, 1], out[..., 1, 0], out[..., 1, 1] = values
        return out

    def determinant(self, x) -> np.ndarray:
        m = self(x)
        return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]

    def trimmed(self, rel_floor: float = 1e-15) -> "MatrixFunction":
        return MatrixFunction(tuple(entry.trimmed(rel_floor) for entry in self.entries))

    def strip_trimmed(self) -> "MatrixFunction":
        """Entries cut at their round-off reach, measured against the largest entry"""
        scale = max(entry.l1_norm() for entry in self.entries)
        return MatrixFunction(tuple(entry.strip_trimmed(scale) for entry in self.entries))


@dataclass(frozen=True, eq=False)
class MatrixCocycle:
    """Cocycle (x, v) -> (T(x), A(x) v) over a rotation (alpha) or a circle map."""

    matrix_fn: MatrixFunction
    alpha: Optional[float] = None
    base_map: Optional[CircleDiffeo] = None
    group: str = SL2
    strip_h0: Optional[float] = None

    def __post_init__(self):
        if (self.alpha is None) == (self.base_map is None):
            raise InvalidArgument("A cocycle needs exactly one base: a frequency alpha or a circle map")
        if self.group not in (SL2, GL2):
            raise InvalidArgument(f"Unknown matrix group '{self.group}'")

    @property
    def over_rotation(self) -> bool:
        return self.alpha is not None

    def advance(self, x: np.ndarray) -> np.ndarray:
        if self.alpha is not None:
            return x + self.alpha
        return self.base_map(x)

    def __call__(self, x, delta: float = 0.0) -> np.ndarray:
        return self.matrix_fn(x, delta)


@dataclass(frozen=True, eq=False)
class IterateResult:
    """Products A_k(phi0), k = 1..n, and phase-grid sup of their norms."""

    products: np.ndarray
    sup_norms: np.ndarray
    truncated: bool = False


@dataclass(frozen=True, eq=False)
class ReductionResult:
    """Z(x+alpha)^-1 S_0^V(x) Z(x) = [[1, nu0], [0, 1]] up to ``residual``."""

    Z: MatrixFunction
    nu0: float
    residual: float
    mu: FourierSeries
    nu: FourierSeries
    z_form_residual: float = 0.0
    cohomological_residual: float = 0.0

    @property
    def B0(self) -> np.ndarray:
        return np.array([[1.0, self.nu0], [0.0, 1.0]])


@dataclass(frozen=True)
class DichotomyResult:
    hyperbolic: bool
    margin: float
    separation: float
    n: int


@dataclass(frozen=True, eq=False)
class PerturbationProfile:
    """First-order term P1 of the normalized cocycle at energy epsilon."""

    P1: MatrixFunction
    sup_norm: float
    strip_norm: float
    strip_width: float
