from typing import Tuple, Union

import numpy as np

from src.model.fourier_series import FourierSeries, OffsetSeries

SeriesLike = Union[FourierSeries, OffsetSeries]


class CommonTools:
    """Numerical helpers shared by the tool classes"""

    @staticmethod
    def uniform_grid(m: int, offset: float = 0.0) -> np.ndarray:
        """x_j = (j + offset)/m, j = 0..m-1"""
        return (np.arange(m) + offset) / m

    @staticmethod
    def as_series(obj: SeriesLike) -> FourierSeries:
        if isinstance(obj, OffsetSeries):
            return obj.as_series()
        return obj

    @staticmethod
    def operator_norm(matrices: np.ndarray) -> np.ndarray:
        """Spectral norm of a stack of 2x2 matrices (real or complex), closed form.

        Args:
            matrices: array of shape (..., 2, 2)

        Returns:
            Largest singular value of each matrix, shape (...)
        """
        frob2 = np.sum(np.abs(matrices) ** 2, axis=(-2, -1))
        det = matrices[..., 0, 0] * matrices[..., 1, 1] - matrices[..., 0, 1] * matrices[..., 1, 0]
        disc = np.sqrt(np.maximum(frob2 ** 2 - 4.0 * np.abs(det) ** 2, 0.0))
        return np.sqrt((frob2 + disc) / 2.0)

    @staticmethod
    def inverse_2x2(matrices: np.ndarray) -> np.ndarray:
        det = matrices[..., 0, 0] * matrices[..., 1, 1] - matrices[..., 0, 1] * matrices[..., 1, 0]
        inv = np.empty_like(matrices)
        inv[..., 0, 0] = matrices[..., 1, 1]
        inv[..., 0, 1] = -matrices[..., 0, 1]
        inv[..., 1, 0] = -matrices[..., 1, 0]
        inv[..., 1, 1] = matrices[..., 0, 0]
        return inv / det[..., None, None]

    @staticmethod
    def sup_distance(a: np.ndarray, b: np.ndarray) -> float:
        return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))

    @staticmethod
    def strip_norm(series: SeriesLike, h: float, grid: int = 1024) -> float:
        """Sup of |s| on the closed strip |Im z| <= h.

        By the maximum principle the sup sits on the boundary lines, so only
        Im z = +h and Im z = -h are sampled. Modes past the round-off reach are cut first.
        """
        s = CommonTools.as_series(series).strip_trimmed()
        x = CommonTools.uniform_grid(grid)
        return float(max(np.max(np.abs(s.evaluate(x, h))), np.max(np.abs(s.evaluate(x, -h)))))

    @staticmethod
    def log_linear_fit(k: np.ndarray, magnitudes: np.ndarray) -> Tuple[float, float]:
        """Least-squares fit log|c_k| = intercept + slope*k; returns (slope, intercept)."""
        slope, intercept = np.polyfit(np.asarray(k, dtype=float), np.log(magnitudes), 1)
        return float(slope), float(intercept)

    @staticmethod
    def decay_fit(series: SeriesLike, noise_floor: float = 1e-13, cap: float = 1.0) -> float:
        """Analyticity width h0 from |c_k| ~ C exp(-2*pi*h0*k).

        Only modes k >= 1 above noise_floor * max|c| enter the fit. A series
        with fewer than two such modes decays trivially and gets ``cap``.
        """
        s = CommonTools.as_series(series)
        n = s.n_modes
        magnitudes = np.abs(s.coeffs[n + 1:])
        k = np.arange(1, n + 1)
        peak = float(np.max(np.abs(s.coeffs))) if s.coeffs.size else 0.0
        keep = magnitudes > noise_floor * peak
        if np.count_nonzero(keep) < 2:
            return cap
        slope, _ = CommonTools.log_linear_fit(k[keep], magnitudes[keep])
        if slope >= 0.0:
            return 0.0
        return float(min(-slope / (2.0 * np.pi), cap))
