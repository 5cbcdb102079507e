import logging
import math
from fractions import Fraction
from typing import Callable, List, Optional, Union

import numpy as np
from mpmath import mp

from src.model.circle_diffeo import CircleDiffeo
from src.model.continued_fraction import BrjunoReport, ContinuedFraction
from src.model.errors import NoConvergence, NonInvertible, PrecisionExhausted, RationalFrequency
from src.model.fourier_series import FourierSeries
from src.model.frequency import Frequency
from src.model.reports import RotationEstimate
from src.tools.common_tools import CommonTools

logger = logging.getLogger(__name__)

# Largest denominator for which a frequency counts as rational.
RATIONAL_MAX_Q = 10 ** 6
RATIONAL_TOL = 1e-15


class HarmonicsTools:
    """Fourier series, circle diffeomorphisms, rotation numbers and continued fractions"""

    @staticmethod
    def series_eval(s: FourierSeries, x: Union[float, np.ndarray], derivative: int = 0):
        """Real value of sum_k c_k exp(2*pi*i*k*x); ``derivative`` applies the multiplier 2*pi*i*k."""
        for _ in range(derivative):
            s = s.derivative()
        return s(x)

    # ------------------------------------------------------------ diffeomorphisms

    @staticmethod
    def check_orientation(phi: CircleDiffeo, grid: int = 0) -> float:
        """Minimum of 1 + p' on a dense grid

        Raises:
            NonInvertible: if the minimum is not positive
        """
        lowest = phi.min_derivative(grid)
        if lowest <= 0.0:
            raise NonInvertible(
                f"Circle map is not an orientation-preserving diffeomorphism: min(1 + p') = {lowest:.6g}"
            )
        return lowest

    @staticmethod
    def invert_points(phi: CircleDiffeo, x: np.ndarray, tol: float = 1e-14, max_iter: int = 80) -> np.ndarray:
        """Solve phi(y) = x pointwise with Newton's method safeguarded by bisection.

        Args:
            phi: lift x -> x + p(x), assumed increasing
            x: target values
            tol: bound on |phi(y) - x|
            max_iter: iteration budget

        Returns:
            y with phi(y) = x up to tol

        Raises:
            NoConvergence: if the budget is exhausted
        """
        x = np.asarray(x, dtype=float)
        bound = phi.periodic_part.l1_norm() + 1e-12
        lo = x - bound
        hi = x + bound
        y = x - phi.periodic_part(x)
        y = np.clip(y, lo, hi)
        residual = phi(y) - x
        for _ in range(max_iter):
            if np.max(np.abs(residual)) < tol:
                return y
            lo = np.where(residual < 0.0, y, lo)
            hi = np.where(residual > 0.0, y, hi)
            slope = phi.derivative(y)
            with np.errstate(divide="ignore", invalid="ignore"):
                step = y - residual / slope
            bad = ~np.isfinite(step) | (slope <= 0.0) | (step <= lo) | (step >= hi)
            y = np.where(bad, 0.5 * (lo + hi), step)
            residual = phi(y) - x
        worst = float(np.max(np.abs(residual)))
        if worst < tol:
            return y
        raise NoConvergence(f"Pointwise inversion stalled at residual {worst:.3e} after {max_iter} iterations")

    @staticmethod
    def diffeo_invert(phi: CircleDiffeo, tol: float = 1e-12, n_modes: Optional[int] = None,
                      force: bool = False) -> CircleDiffeo:
        """phi^-1, computed pointwise on a 4N grid and refitted

        Raises:
            NonInvertible: 1 + p' <= 0 somewhere on the check grid
            NoConvergence: Newton stalls, or the refitted inverse misses tol
            TruncationOverflow: the refit needs more than N modes (unless forced)
        """
        HarmonicsTools.check_orientation(phi)
        n = n_modes if n_modes is not None else max(phi.n_modes, 1)
        m = max(4 * n, 64)
        x = CommonTools.uniform_grid(m)
        y = HarmonicsTools.invert_points(phi, x, tol=min(tol, 1e-14))
        inverse = CircleDiffeo(FourierSeries.fit(y - x, n, force=force, label="phi^-1"))
        if not force:
            check = CommonTools.uniform_grid(m, offset=0.5)
            error = CommonTools.sup_distance(phi(inverse(check)), check)
            if error >= tol:
                raise NoConvergence(
                    f"Inverse misses tolerance: max |phi(phi^-1(x)) - x| = {error:.3e} >= {tol:.1e} at {n} modes"
                )
        return inverse

    @staticmethod
    def diffeo_compose(phi1: CircleDiffeo, phi2: CircleDiffeo, n_modes: Optional[int] = None,
                       force: bool = False) -> CircleDiffeo:
        """phi1 o phi2, periodic part x -> p2(x) + p1(x + p2(x)) refitted (tail kept on the series)"""
        n = n_modes if n_modes is not None else max(phi1.n_modes, phi2.n_modes, 1)
        m = max(4 * n, 64)
        x = CommonTools.uniform_grid(m)
        p2 = phi2.periodic_part(x)
        samples = p2 + phi1.periodic_part(x + p2)
        return CircleDiffeo(FourierSeries.fit(samples, n, force=force, label="composition"))

    # ------------------------------------------------------------- rotation number

    @staticmethod
    def _weighted_average(increments: np.ndarray) -> float:
        n = increments.size
        t = (np.arange(n) + 0.5) / n
        weights = np.exp(-1.0 / (t * (1.0 - t)))
        return float(np.dot(weights, increments) / np.sum(weights))

    @staticmethod
    def rotation_number(lift: Callable[[float], float], n_iter: int, x0: float = 0.0) -> RotationEstimate:
        """Rotation number lim (G^n(x0) - x0)/n of a circle-homeomorphism lift.

        The displacements G(x_k) - x_k are averaged with a smooth bump weight,
        which converges faster than any power of n for smooth quasi-periodic
        orbits. The error estimate compares the full window with its first half.
        """
        increments = np.empty(n_iter)
        x = float(x0)
        for k in range(n_iter):
            nxt = float(lift(x))
            increments[k] = nxt - x
            # keep the lift near [0, 1) so phases stay accurate
            x = nxt - math.floor(nxt)
        value = HarmonicsTools._weighted_average(increments)
        error = 0.0
        if n_iter >= 4:
            error = abs(value - HarmonicsTools._weighted_average(increments[:n_iter // 2]))
        return RotationEstimate(value=value, error=error, n_iter=n_iter)

    # ------------------------------------------------------------ continued fractions

    @staticmethod
    def continued_fraction(alpha: Union[Frequency, float], depth: int, strict: bool = False) -> ContinuedFraction:
        """Partial quotients and convergents of alpha up to ``depth``.

        Tagged frequencies use their exact quotients. Decimal frequencies are
        expanded with mpmath; the expansion stops early, flagged, once q_k^2
        exceeds the precision the decimal carries.

        Raises:
            PrecisionExhausted: only when ``strict`` and the expansion was cut short
        """
        frequency = alpha if isinstance(alpha, Frequency) else Frequency.from_float(alpha)
        exact = frequency.exact_quotients(depth)
        exhausted = False
        terminated = False
        integer_part = 0
        if exact is not None:
            quotients = exact
        else:
            digits = frequency.significant_digits
            limit = 10 ** digits
            quotients = []
            with mp.workdps(max(2 * digits + 20, 40)):
                x = frequency.mp_value()
                integer_part = int(mp.floor(x))
                frac = x - integer_part
                q_prev, q_cur = 0, 1
                while len(quotients) < depth:
                    if frac == 0:
                        terminated = True
                        break
                    x = 1 / frac
                    a = int(mp.floor(x))
                    q_next = a * q_cur + q_prev
                    if q_next * q_next > limit:
                        exhausted = True
                        break
                    quotients.append(a)
                    q_prev, q_cur = q_cur, q_next
                    frac = x - a
            if exhausted:
                logger.warning(
                    "[Harmonics] Continued fraction of %s stopped at depth %d of %d: "
                    "precision of %d digits exhausted", frequency.digits, len(quotients), depth, digits
                )
                if strict:
                    raise PrecisionExhausted(
                        f"Continued fraction of {frequency.digits} supports only {len(quotients)} "
                        f"partial quotients at {digits} significant digits"
                    )

        p: List[int] = [integer_part]
        q: List[int] = [1]
        p_prev, q_prev = 1, 0
        for a in quotients:
            p_next = a * p[-1] + p_prev
            q_next = a * q[-1] + q_prev
            p_prev, q_prev = p[-1], q[-1]
            p.append(p_next)
            q.append(q_next)
        return ContinuedFraction(
            integer_part=integer_part,
            partial_quotients=list(quotients),
            p=p,
            q=q,
            precision_exhausted=exhausted,
            terminated=terminated,
        )

    @staticmethod
    def check_irrational(frequency: Frequency, max_q: int = RATIONAL_MAX_Q, tol: float = RATIONAL_TOL) -> None:
        """Reject frequencies reproduced by a convergent p/q with q <= max_q

        Raises:
            RationalFrequency
        """
        if frequency.is_exact:
            return
        best = Fraction(frequency.digits).limit_denominator(max_q)
        if abs(frequency.value - best.numerator / best.denominator) <= tol:
            raise RationalFrequency(frequency.value, best.numerator, best.denominator)

    @staticmethod
    def brjuno_sum(alpha: Union[Frequency, float], depth: int) -> BrjunoReport:
        """Partial Brjuno sum sum_{k<K} log(q_{k+1})/q_k and a beta estimate.

        beta_estimate is the largest term log(q_{k+1})/q_k over the last quarter
        of the window, a finite-depth proxy for limsup (1/q_k) log q_{k+1}.
        """
        frequency = alpha if isinstance(alpha, Frequency) else Frequency.from_float(alpha)
        expansion = HarmonicsTools.continued_fraction(frequency, depth + 1)
        q = expansion.q
        count = min(depth, len(q) - 1)
        terms = [math.log(q[k + 1]) / q[k] for k in range(count)]
        window = terms[-max(1, count // 4):] if terms else [0.0]
        regime = None
        if frequency.is_exact:
            # bounded partial quotients: Brjuno sum finite and beta = 0
            regime = "bounded-type"
        return BrjunoReport(
            partial_sum=float(math.fsum(terms)),
            beta_estimate=float(max(window)),
            terms=terms,
            depth=count,
            precision_exhausted=expansion.precision_exhausted,
            certified_regime=regime,
        )
