import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from src.model.errors import InvalidArgument, NoConvergence, SaddlePoint
from src.model.fourier_series import FourierSeries
from src.model.frequency import Frequency
from src.model.twist_model import Configuration, PeriodicOrbitSpec, TwistModel
from src.tools.harmonics import HarmonicsTools
from src.tools.twist import TwistTools

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-10
NONPOSITIVITY_SLACK = 1e-10


@dataclass(frozen=True, eq=False)
class TridiagonalOperator:
    """Symmetric tridiagonal (Hu)_n = u_{n+1} + u_{n-1} + diagonal_n u_n, Dirichlet boundary."""

    diagonal: np.ndarray

    def __post_init__(self):
        diagonal = np.array(self.diagonal, dtype=float)
        if diagonal.ndim != 1 or diagonal.size < 1:
            raise InvalidArgument("Tridiagonal operator needs a non-empty one-dimensional diagonal")
        diagonal.setflags(write=False)
        object.__setattr__(self, "diagonal", diagonal)

    @property
    def size(self) -> int:
        return self.diagonal.size

    @property
    def off_diagonal(self) -> np.ndarray:
        return np.ones(self.size - 1)

    def eigenvalues(self) -> np.ndarray:
        if self.size == 1:
            return self.diagonal.copy()
        return eigvalsh_tridiagonal(self.diagonal, self.off_diagonal)

    def top_eigenvalue(self) -> float:
        if self.size == 1:
            return float(self.diagonal[0])
        return float(eigvalsh_tridiagonal(self.diagonal, self.off_diagonal,
                                          select="i", select_range=(self.size - 1, self.size - 1))[0])

    def matvec(self, u: np.ndarray) -> np.ndarray:
        out = self.diagonal * u
        out[1:] += u[:-1]
        out[:-1] += u[1:]
        return out

    def quadratic_form(self, u: np.ndarray) -> float:
        return float(np.dot(u, self.matvec(u)))

    def dense(self) -> np.ndarray:
        return np.diag(self.diagonal) + np.diag(self.off_diagonal, 1) + np.diag(self.off_diagonal, -1)


class AubryTools:
    """Periodic action minimizers and the Hessian / Schrödinger operator correspondence"""

    # ------------------------------------------------------------ periodic problem

    @staticmethod
    def periodic_residual(f: FourierSeries, x: np.ndarray, p: int) -> np.ndarray:
        """x_{n+1} - 2x_n + x_{n-1} - f(x_n) for one period, x_{n+q} = x_n + p"""
        nxt = np.roll(x, -1)
        nxt[-1] += p
        prev = np.roll(x, 1)
        prev[0] -= p
        return nxt - 2.0 * x + prev - f(x)

    @staticmethod
    def _periodic_jacobian(fprime: FourierSeries, x: np.ndarray) -> np.ndarray:
        """Cyclic tridiagonal matrix with diagonal -2 - f'(x_n) and unit neighbours"""
        q = x.size
        jac = np.diag(-2.0 - fprime(x))
        for n in range(q):
            jac[n, (n + 1) % q] += 1.0
            jac[n, (n - 1) % q] += 1.0
        return np.atleast_2d(jac)

    @staticmethod
    def periodic_action(f: FourierSeries, spec: PeriodicOrbitSpec, x: np.ndarray) -> float:
        """Action of one period, sum_{n<q} h(x_n, x_{n+1}) with x_q = x_0 + p"""
        closed = np.append(x, x[0] + spec.p)
        return TwistTools.segment_action(f, spec.a, Configuration(closed))

    @staticmethod
    def periodic_top_eigenvalue(f: FourierSeries, spec: PeriodicOrbitSpec, x: np.ndarray) -> float:
        jac = AubryTools._periodic_jacobian(f.derivative(), np.asarray(x, dtype=float))
        return float(np.max(np.linalg.eigvalsh(jac)))

    @staticmethod
    def _solve_from(f: FourierSeries, fprime: FourierSeries, spec: PeriodicOrbitSpec, x: np.ndarray,
                    tol: float, max_iter: int) -> Optional[np.ndarray]:
        """Damped Newton on the residual, gradient descent on the action when Newton stalls"""
        descent_step = 1.0 / (4.0 + fprime.sup_norm(grid=1024))
        residual = AubryTools.periodic_residual(f, x, spec.p)
        for _ in range(max_iter):
            size = float(np.max(np.abs(residual)))
            if size < tol:
                return x
            merit = float(np.dot(residual, residual))
            jac = AubryTools._periodic_jacobian(fprime, x)
            step = np.linalg.lstsq(jac, -residual, rcond=None)[0]
            t = 1.0
            accepted = False
            while t > 1e-8:
                trial = x + t * step
                trial_residual = AubryTools.periodic_residual(f, trial, spec.p)
                if np.dot(trial_residual, trial_residual) <= (1.0 - 1e-4 * t) * merit:
                    x, residual = trial, trial_residual
                    accepted = True
                    break
                t *= 0.5
            if not accepted:
                # the action gradient is -residual
                x = x + descent_step * residual
                residual = AubryTools.periodic_residual(f, x, spec.p)
        if float(np.max(np.abs(residual))) < tol:
            return x
        return None

    @staticmethod
    def starting_points(spec: PeriodicOrbitSpec) -> List[float]:
        return [j / (2.0 * spec.q) for j in range(2 * spec.q)]

    @staticmethod
    def minimize_periodic(f: FourierSeries, spec: PeriodicOrbitSpec, tol: float = RESIDUAL_TOL,
                          slack: float = NONPOSITIVITY_SLACK, max_iter: int = 200) -> Configuration:
        """Action-minimizing configuration with x_{n+q} = x_n + p.

        Starts x_n = x0 + n*p/q are tried in the fixed order of ``starting_points``;
        the first one converging to a point whose Hessian test passes wins.

        Returns:
            Configuration x_0..x_q (q + 1 points, x_q = x_0 + p)

        Raises:
            NoConvergence: no start reached the residual tolerance
            SaddlePoint: every converged start failed the Hessian test
        """
        fprime = f.derivative()
        base = np.arange(spec.q) * spec.p / spec.q
        saddles = 0
        for x0 in AubryTools.starting_points(spec):
            x = AubryTools._solve_from(f, fprime, spec, base + x0, tol, max_iter)
            if x is None:
                continue
            top = AubryTools.periodic_top_eigenvalue(f, spec, x)
            if top <= slack:
                logger.debug("[Aubry] %d/%d minimizer from x0=%.4f, top eigenvalue %.3e", spec.p, spec.q, x0, top)
                return Configuration(np.append(x, x[0] + spec.p))
            saddles += 1
            logger.debug("[Aubry] start x0=%.4f converged to a saddle (top eigenvalue %.3e)", x0, top)
        if saddles:
            raise SaddlePoint(
                f"All {saddles} converged starts for {spec.p}/{spec.q} are saddles: Hessian has positive eigenvalues"
            )
        raise NoConvergence(f"No start reached residual {tol:.1e} for rotation number {spec.p}/{spec.q}")

    @staticmethod
    def extend_periodic(c: Configuration, spec: PeriodicOrbitSpec, periods: int) -> Configuration:
        """Unfold a one-period configuration x_0..x_q over ``periods`` periods"""
        cell = c.points[:spec.q]
        blocks = [cell + j * spec.p for j in range(periods)]
        return Configuration(np.append(np.concatenate(blocks), cell[0] + periods * spec.p), c.base_index)

    @staticmethod
    def realized_rotation(c: Configuration) -> float:
        """Empirical mean of r_n"""
        return float(np.mean(c.momenta))

    @staticmethod
    def curve_distance(model: TwistModel, c: Configuration) -> float:
        """max_n |r_n - gamma(x_n)|, the vertical distance of (x_n mod 1, r_n) to the graph"""
        x = c.points[1:]
        return float(np.max(np.abs(c.momenta - model.gamma(x))))

    @staticmethod
    def convergent_minimizers(f: FourierSeries, frequency: Frequency, depth: int,
                              start: int = 1) -> List[Tuple[PeriodicOrbitSpec, Configuration]]:
        """Minimizers along the convergents p_k/q_k, k = start..depth"""
        expansion = HarmonicsTools.continued_fraction(frequency, depth)
        results = []
        for k in range(start, min(depth, expansion.depth) + 1):
            spec = PeriodicOrbitSpec(expansion.p[k], expansion.q[k], expansion.p[k] / expansion.q[k])
            results.append((spec, AubryTools.minimize_periodic(f, spec)))
        return results

    # ------------------------------------------------------------------ Hessian

    @staticmethod
    def build_schrodinger_sequence(f: FourierSeries, phases: np.ndarray) -> TridiagonalOperator:
        """Dirichlet operator with diagonal V0(phi_n) = -f'(phi_n) - 2"""
        phases = np.asarray(phases, dtype=float)
        return TridiagonalOperator(-f.derivative()(phases) - 2.0)

    @staticmethod
    def _local_action(F: FourierSeries, a: float, x: np.ndarray, indices) -> float:
        """Terms h(x_m, x_{m+1}) that involve any of ``indices``"""
        lo = max(min(indices) - 1, 0)
        hi = min(max(indices) + 2, x.size)
        window = x[lo:hi]
        return float(np.sum(0.5 * (window[1:] - window[:-1] - a) ** 2 + F(window[:-1])))

    @staticmethod
    def hessian_consistency_check(f: FourierSeries, c: Configuration, h: float = 1e-4,
                                  a: float = 0.0) -> Tuple[float, float]:
        """Compare central differences of the action with (-residual, -H).

        Gradient and Hessian are taken with respect to the interior points.
        Errors are max absolute deviations divided by max(1, max|reference|).

        Returns:
            (grad_err, hess_err)
        """
        x = np.array(c.points, dtype=float)
        if x.size < 3:
            raise InvalidArgument("Hessian check needs at least 3 points")
        F = f.antiderivative()
        interior = range(1, x.size - 1)

        def local(shifts):
            y = x.copy()
            for index, amount in shifts:
                y[index] += amount
            return AubryTools._local_action(F, a, y, [index for index, _ in shifts])

        grad_ref = -TwistTools.euler_lagrange_residual(f, c)
        grad_fd = np.array([(local([(n, h)]) - local([(n, -h)])) / (2.0 * h) for n in interior])
        grad_err = float(np.max(np.abs(grad_fd - grad_ref)) / max(1.0, float(np.max(np.abs(grad_ref)))))

        operator = AubryTools.build_schrodinger_sequence(f, x[1:-1])
        hess_ref = -operator.dense()
        size = len(interior)
        hess_fd = np.zeros((size, size))
        for i, n in enumerate(interior):
            centre = local([(n, 0.0)])
            hess_fd[i, i] = (local([(n, h)]) - 2.0 * centre + local([(n, -h)])) / h ** 2
            for j in range(i + 1, size):
                m = interior[j]
                value = (local([(n, h), (m, h)]) - local([(n, h), (m, -h)])
                         - local([(n, -h), (m, h)]) + local([(n, -h), (m, -h)])) / (4.0 * h ** 2)
                hess_fd[i, j] = hess_fd[j, i] = value
        hess_err = float(np.max(np.abs(hess_fd - hess_ref)) / max(1.0, float(np.max(np.abs(hess_ref)))))
        return grad_err, hess_err
