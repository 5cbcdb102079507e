import logging
from typing import Tuple

import numpy as np

from src.model.errors import InvalidArgument, OrbitOverflow
from src.model.fourier_series import FourierSeries
from src.model.twist_model import Configuration, CylinderState

logger = logging.getLogger(__name__)

MEAN_TOL = 1e-10

# |r| beyond which an orbit is considered to have diffused away
DIFFUSION_GUARD = 1e9


class TwistTools:
    """The twist map psi_f(x, r) = (x + r + f(x), r + f(x)) and its generating function"""

    @staticmethod
    def standard_map(lam: float, n_modes: int = 8) -> FourierSeries:
        """f(x) = lam*sin(2*pi*x)/(2*pi)"""
        return FourierSeries.sine(lam / (2.0 * np.pi), 1, n_modes)

    @staticmethod
    def check_mean(f: FourierSeries) -> bool:
        if abs(f.mean) > MEAN_TOL:
            logger.warning("[Twist] f has mean %.3e; twist maps expect a zero-mean forcing", f.mean)
            return False
        return True

    @staticmethod
    def twist_step(f: FourierSeries, s: CylinderState) -> CylinderState:
        TwistTools.check_mean(f)
        kick = f(s.x)
        return CylinderState(s.x + s.r + kick, s.r + kick)

    @staticmethod
    def inverse_step(f: FourierSeries, s: CylinderState) -> CylinderState:
        x = s.x - s.r
        return CylinderState(x, s.r - f(x))

    @staticmethod
    def orbit(f: FourierSeries, s: CylinderState, n: int, backward: bool = False) -> np.ndarray:
        """n images of s (forward, or backward through the explicit inverse).

        Returns:
            array of shape (n + 1, 2) with rows (x_k, r_k), row 0 being s

        Raises:
            OrbitOverflow: if |r| exceeds the diffusion guard
        """
        TwistTools.check_mean(f)
        fast = f.trimmed()
        out = np.empty((n + 1, 2))
        x, r = float(s.x), float(s.r)
        out[0] = x, r
        for k in range(1, n + 1):
            if backward:
                x = x - r
                r = r - fast(x)
            else:
                r = r + fast(x)
                x = x + r
            if not abs(r) <= DIFFUSION_GUARD:
                raise OrbitOverflow(f"Orbit diffused: |r| = {abs(r):.3e} exceeds {DIFFUSION_GUARD:.0e} at step {k}")
            out[k] = x, r
        return out

    @staticmethod
    def jacobian(f: FourierSeries, x) -> np.ndarray:
        """D psi at phase x: [[1 + f', 1], [f', 1]] (independent of r)"""
        slope = np.asarray(f.derivative()(x), dtype=float)
        out = np.empty(slope.shape + (2, 2))
        out[..., 0, 0] = 1.0 + slope
        out[..., 0, 1] = 1.0
        out[..., 1, 0] = slope
        out[..., 1, 1] = 1.0
        return out

    # -------------------------------------------------------- generating function

    @staticmethod
    def generating_function(f: FourierSeries, a: float, x0, x1):
        """h(x0, x1) = (x1 - x0 - a)^2/2 + F(x0), F the zero-mean antiderivative of f"""
        F = f.antiderivative()
        return 0.5 * (np.asarray(x1) - np.asarray(x0) - a) ** 2 + F(x0)

    @staticmethod
    def generating_momenta(f: FourierSeries, a: float, x0: float, x1: float) -> Tuple[float, float]:
        """(-d1 h, d2 h) = (r0 - a, r1 - a) for the orbit step x0 -> x1"""
        step = x1 - x0 - a
        return step - f(x0), step

    @staticmethod
    def _action_terms(F: FourierSeries, a: float, points: np.ndarray) -> np.ndarray:
        return 0.5 * (points[1:] - points[:-1] - a) ** 2 + F(points[:-1])

    @staticmethod
    def segment_action(f: FourierSeries, a: float, c: Configuration) -> float:
        """Sum of h(x_n, x_{n+1}) over consecutive pairs of the segment.

        Perturbations that keep the first and last points fixed change this sum
        by the windowed amount of ``action_difference``.
        """
        if len(c) < 2:
            return 0.0
        return float(np.sum(TwistTools._action_terms(f.antiderivative(), a, c.points)))

    @staticmethod
    def action_difference(f: FourierSeries, a: float, c1: Configuration, c2: Configuration) -> float:
        """A(c1) - A(c2) summed only over the terms touching the window where they differ"""
        if len(c1) != len(c2):
            raise InvalidArgument("Configurations must have the same length to be compared")
        differ = np.nonzero(c1.points != c2.points)[0]
        if differ.size == 0:
            return 0.0
        lo = max(int(differ[0]) - 1, 0)
        hi = min(int(differ[-1]) + 2, len(c1))
        F = f.antiderivative()
        window1 = TwistTools._action_terms(F, a, c1.points[lo:hi])
        window2 = TwistTools._action_terms(F, a, c2.points[lo:hi])
        return float(np.sum(window1) - np.sum(window2))

    @staticmethod
    def euler_lagrange_residual(f: FourierSeries, c: Configuration) -> np.ndarray:
        """x_{n+1} - 2x_n + x_{n-1} - f(x_n) on interior indices"""
        x = c.points
        if x.size < 3:
            raise InvalidArgument(f"Euler-Lagrange residual needs at least 3 points, got {x.size}")
        return x[2:] - 2.0 * x[1:-1] + x[:-2] - f(x[1:-1])

    @staticmethod
    def configuration_from_orbit(orbit: np.ndarray, base_index: int = 0) -> Configuration:
        return Configuration(orbit[:, 0], base_index)
