import logging
import math
from typing import Iterator, Optional, Tuple, Union

import numpy as np

from src.model.circle_diffeo import CircleDiffeo
from src.model.cocycle import (
    DichotomyResult, IterateResult, MatrixCocycle, MatrixFunction, PerturbationProfile, ReductionResult,
)
from src.model.errors import (
    InconclusiveDichotomy, InvalidArgument, PositiveNu0, ResidualTooLarge, SingularConjugator,
    SmallDivisorBreakdown, StripTooWide, WindingNonzero,
)
from src.model.fourier_series import FourierSeries, OffsetSeries
from src.model.twist_model import TwistModel
from src.tools.common_tools import CommonTools
from src.tools.twist import TwistTools

logger = logging.getLogger(__name__)

# Conjugates the derivative cocycle to the Schrödinger cocycle at E = 0 (det -1).
M = np.array([[1.0, 0.0], [1.0, -1.0]])
FREE_EDGE = np.array([[2.0, -1.0], [1.0, 0.0]])
RANK_ONE = np.array([[1.0, 0.0], [0.0, 0.0]])

OVERFLOW_GUARD = 1e150
SINGULAR_DET = 1e-12
BLOCK_STEPS = 2048

# uh_test decision thresholds on margin * n
HYPERBOLIC_SCORE = 10.0
ELLIPTIC_SCORE = 3.0
MIN_SEPARATION = 1e-6

SeriesLike = Union[FourierSeries, OffsetSeries]


def _stack(a, b, c, d) -> np.ndarray:
    a = np.asarray(a)
    out = np.empty(a.shape + (2, 2), dtype=np.result_type(a, b, c, d))
    out[..., 0, 0] = a
    out[..., 0, 1] = b
    out[..., 1, 0] = c
    out[..., 1, 1] = d
    return out


class CocyclesTools:
    """SL(2,R) cocycles: products, Lyapunov exponents, rotation numbers and parabolic reduction"""

    # ------------------------------------------------------------------ builders

    @staticmethod
    def derivative_cocycle(model: TwistModel) -> MatrixCocycle:
        """D psi = [[1 + f', 1], [f', 1]] over the circle map g restricted to the curve"""
        slope = model.f.derivative()
        one = FourierSeries.constant(1.0)
        g = CircleDiffeo(model.gamma.as_series() + model.f)
        return MatrixCocycle(MatrixFunction((slope + 1.0, one, slope, one)), base_map=g)

    @staticmethod
    def schrodinger_cocycle(V: SeriesLike, E: float, alpha: float,
                            strip_h0: Optional[float] = None) -> MatrixCocycle:
        """S_E^V = [[E - V, -1], [1, 0]] over the rotation by alpha"""
        series = CommonTools.as_series(V)
        entries = (float(E) - series, FourierSeries.constant(-1.0), FourierSeries.constant(1.0),
                   FourierSeries.constant(0.0))
        return MatrixCocycle(MatrixFunction(entries), alpha=alpha, strip_h0=strip_h0)

    @staticmethod
    def strip_width(c: MatrixCocycle) -> float:
        """Analyticity width of the entries: the stored h0, else the smallest fitted decay width"""
        if c.strip_h0 is not None:
            return c.strip_h0
        widths = [CommonTools.decay_fit(entry) for entry in c.matrix_fn.entries if entry.band > 0]
        return min(widths) if widths else 1.0

    # ----------------------------------------------------------------- products

    @staticmethod
    def _matrix_blocks(c: MatrixCocycle, start: np.ndarray, n: int, delta: float = 0.0,
                       block: int = BLOCK_STEPS) -> Iterator[np.ndarray]:
        """A along the orbits of ``start``, yielded as arrays (steps, phases, 2, 2)"""
        fn = c.matrix_fn.strip_trimmed() if delta != 0.0 else c.matrix_fn.trimmed()
        start = np.asarray(start, dtype=float)
        if c.over_rotation:
            for first in range(0, n, block):
                steps = np.arange(first, min(first + block, n))
                yield fn(np.mod(start[None, :] + steps[:, None] * c.alpha, 1.0), delta)
            return
        x = np.mod(start, 1.0)
        for first in range(0, n, block):
            count = min(block, n - first)
            points = np.empty((count,) + x.shape)
            for i in range(count):
                points[i] = x
                x = np.mod(c.advance(x), 1.0)
            yield fn(points, delta)

    @staticmethod
    def _matrices(c: MatrixCocycle, start: np.ndarray, n: int, delta: float = 0.0) -> Iterator[np.ndarray]:
        for block in CocyclesTools._matrix_blocks(c, start, n, delta):
            yield from block

    @staticmethod
    def cocycle_iterates(c: MatrixCocycle, n: int, phi0: float = 0.0, phases: int = 32) -> IterateResult:
        """A_k(phi0) for k = 1..n and the phase-grid sup of ||A_k||.

        Stops early, flagged as truncated, once a norm passes the overflow guard.
        """
        if n < 1:
            raise InvalidArgument(f"Iterate count must be at least 1, got {n}")
        start = np.concatenate([[phi0], CommonTools.uniform_grid(phases)])
        prod = np.broadcast_to(np.eye(2), (start.size, 2, 2)).copy()
        products = np.empty((n, 2, 2))
        sup_norms = np.empty(n)
        for k, A in enumerate(CocyclesTools._matrices(c, start, n)):
            prod = A @ prod
            norms = CommonTools.operator_norm(prod)
            if not np.all(norms <= OVERFLOW_GUARD):
                logger.warning("[Cocycles] Iterate norm passed %.0e at k=%d; products truncated", OVERFLOW_GUARD, k + 1)
                return IterateResult(products[:k], sup_norms[:k], truncated=True)
            products[k] = prod[0]
            sup_norms[k] = float(np.max(norms))
        return IterateResult(products, sup_norms)

    @staticmethod
    def sup_norm_growth_fit(result: IterateResult) -> float:
        """Smallest C with sup_k ||A_k|| <= C (1 + k) over the computed iterates"""
        if result.sup_norms.size == 0:
            return 0.0
        k = np.arange(1, result.sup_norms.size + 1)
        return float(np.max(result.sup_norms / (1.0 + k)))

    @staticmethod
    def lyapunov_exponent(c: MatrixCocycle, n: int, delta: float = 0.0, phases: int = 8,
                          renorm: int = 32, phi0: float = 0.0) -> float:
        """(1/n) * mean over phases of log ||A_n||, renormalized every ``renorm`` steps.

        For delta != 0 the entries are evaluated at phi + i*delta.

        Raises:
            StripTooWide: |delta| is not inside the fitted analyticity strip
        """
        if delta != 0.0:
            if not c.over_rotation:
                raise InvalidArgument("Complexified phases need a cocycle over a rotation")
            width = CocyclesTools.strip_width(c)
            if abs(delta) >= width:
                raise StripTooWide(f"Strip offset {delta:.4g} is not inside the analyticity width {width:.4g}")
        start = phi0 + CommonTools.uniform_grid(phases)
        dtype = complex if delta != 0.0 else float
        prod = np.broadcast_to(np.eye(2, dtype=dtype), (phases, 2, 2)).copy()
        logs = np.zeros(phases)
        for k, A in enumerate(CocyclesTools._matrices(c, start, n, delta), start=1):
            prod = A @ prod
            if k % renorm == 0:
                norms = CommonTools.operator_norm(prod)
                logs += np.log(norms)
                prod /= norms[:, None, None]
        logs += np.log(CommonTools.operator_norm(prod))
        return float(np.mean(logs)) / n

    # ----------------------------------------------------------------- rotation

    @staticmethod
    def check_winding(c: MatrixCocycle, grid: int = 1024) -> int:
        """Winding of the first column of A around the circle

        Raises:
            WindingNonzero: A is not homotopic to a constant
        """
        x = np.arange(grid + 1) / grid
        column = c.matrix_fn(x)[..., :, 0]
        angles = np.unwrap(np.arctan2(column[:, 1], column[:, 0]))
        winding = int(round((angles[-1] - angles[0]) / (2.0 * np.pi)))
        if winding != 0:
            raise WindingNonzero(f"First column of the cocycle winds {winding} times around the circle")
        return winding

    @staticmethod
    def fibered_rotation_number(c: MatrixCocycle, n: int = 100000, phases: int = 8, phi0: float = 0.0) -> float:
        """Mean angular increment of the projective action divided by 2*pi.

        Each step's increment is taken in (-pi/2, 3*pi/2], which is the
        continuous lift for matrices of the form [[t, -1], [1, 0]]; Schrödinger
        cocycles therefore land in [0, 1/2].
        """
        CocyclesTools.check_winding(c)
        start = phi0 + CommonTools.uniform_grid(phases)
        v0 = np.ones(phases)
        v1 = np.zeros(phases)
        total = np.zeros(phases)
        for A in CocyclesTools._matrices(c, start, n):
            w0 = A[:, 0, 0] * v0 + A[:, 0, 1] * v1
            w1 = A[:, 1, 0] * v0 + A[:, 1, 1] * v1
            step = np.arctan2(v0 * w1 - v1 * w0, v0 * w0 + v1 * w1)
            total += np.where(step < -0.5 * np.pi, step + 2.0 * np.pi, step)
            norm = np.hypot(w0, w1)
            v0, v1 = w0 / norm, w1 / norm
        return float(np.mean(total)) / (2.0 * np.pi * n)

    # ------------------------------------------------------------- conjugation

    @staticmethod
    def conjugate_cocycle(c: MatrixCocycle, B: MatrixFunction, n_modes: Optional[int] = None,
                          force: bool = False) -> MatrixCocycle:
        """B(T x)^-1 A(x) B(x), T the base dynamics, refitted entrywise

        Raises:
            SingularConjugator: |det B| < 1e-12 somewhere on the check grid
        """
        x = CommonTools.uniform_grid(1024)
        smallest = float(np.min(np.abs(B.determinant(x))))
        if smallest < SINGULAR_DET:
            raise SingularConjugator(f"Conjugator is singular: min |det B| = {smallest:.3e}")
        n = n_modes or max(c.matrix_fn.n_modes, B.n_modes, 1)

        def sample(points):
            return CommonTools.inverse_2x2(B(c.advance(points))) @ c(points) @ B(points)

        fn = MatrixFunction.fit(sample, n, force=force, label="conjugated cocycle")
        return MatrixCocycle(fn, alpha=c.alpha, base_map=c.base_map, group=c.group, strip_h0=c.strip_h0)

    # ------------------------------------------------------ cohomological equation

    @staticmethod
    def solve_cohomological(nu: FourierSeries, alpha: float, divisor_floor: Optional[float] = None) -> FourierSeries:
        """mu with mu(x + alpha) - mu(x) = nu(x) - mean(nu) and mean(mu) = 0.

        Modes whose divisor |exp(2*pi*i*k*alpha) - 1| falls below the floor are
        dropped with a warning when the coefficient is already below the fit
        tail, and are an error otherwise.

        Raises:
            SmallDivisorBreakdown: a resolvable coefficient meets an unresolvable divisor
        """
        floor = divisor_floor if divisor_floor is not None else 1e-12 * nu.l1_norm()
        k = nu.wavenumbers
        divisors = np.exp(2j * np.pi * k * alpha) - 1.0
        magnitudes = np.abs(nu.coeffs)
        small = (k != 0) & (np.abs(divisors) < floor)
        fatal = small & (magnitudes > nu.tail)
        if np.any(fatal):
            idx = int(np.nonzero(fatal & (k > 0))[0][0]) if np.any(fatal & (k > 0)) else int(np.nonzero(fatal)[0][0])
            raise SmallDivisorBreakdown(int(k[idx]), float(abs(divisors[idx])), float(magnitudes[idx]))
        if np.any(small):
            logger.warning("[Cocycles] Dropped %d modes below the divisor floor %.1e", int(np.count_nonzero(small)) // 2, floor)
        coeffs = np.zeros_like(nu.coeffs)
        solvable = (k != 0) & ~small
        coeffs[solvable] = nu.coeffs[solvable] / divisors[solvable]
        return FourierSeries(coeffs, tail=nu.tail)

    @staticmethod
    def cohomological_residual(mu: FourierSeries, nu: FourierSeries, alpha: float, grid: int = 1024) -> float:
        x = CommonTools.uniform_grid(grid)
        return CommonTools.sup_distance(mu(x + alpha) - mu(x), nu(x) - nu.mean)

    # ---------------------------------------------------------- parabolic reduction

    @staticmethod
    def _schrodinger_samples(V: SeriesLike, E: float, x: np.ndarray) -> np.ndarray:
        values = E - V(x)
        return _stack(values, -np.ones_like(values), np.ones_like(values), np.zeros_like(values))

    @staticmethod
    def reduction_chain(model: TwistModel, mu: FourierSeries, y: np.ndarray) -> np.ndarray:
        """Z sampled through Z1 -> M Z1 o phi -> . diag(phi', -1/phi') -> . [[1, mu], [0, 1]]"""
        slope = model.phi.derivative(y)
        Z1 = _stack(np.ones_like(y), np.zeros_like(y), model.gamma.derivative()(model.phi(y)), np.ones_like(y))
        Z2 = M @ Z1
        Z3 = Z2 @ _stack(slope, np.zeros_like(y), np.zeros_like(y), -1.0 / slope)
        return Z3 @ _stack(np.ones_like(y), mu(y), np.zeros_like(y), np.ones_like(y))

    @staticmethod
    def reduction_closed_form(model: TwistModel, mu: FourierSeries, y: np.ndarray) -> np.ndarray:
        """[[phi'(y), mu phi'(y)], [phi'(y - alpha), 1/phi'(y) + mu phi'(y - alpha)]]"""
        a = model.phi.derivative(y)
        b = model.phi.derivative(y - model.alpha)
        s = mu(y)
        return _stack(a, s * a, b, 1.0 / a + s * b)

    @staticmethod
    def parabolic_reduce(model: TwistModel, tol: float = 1e-8, n_modes: Optional[int] = None,
                         force: bool = False) -> ReductionResult:
        """Conjugate S_0^V to the constant parabolic B0 = [[1, nu0], [0, 1]].

        nu = -1/(phi' phi'(. + alpha)), nu0 its mean, and mu solves the
        cohomological equation for nu - nu0.

        Raises:
            SmallDivisorBreakdown: propagated from the cohomological solve
            ResidualTooLarge: sup ||Z(y + alpha)^-1 S_0^V(y) Z(y) - B0|| >= tol
        """
        alpha = model.alpha
        n = n_modes or model.n_modes
        m = max(4 * n, model.grid)
        y = CommonTools.uniform_grid(m)
        nu = FourierSeries.fit(-1.0 / (model.phi.derivative(y) * model.phi.derivative(y + alpha)), n,
                               force=force, label="nu")
        nu0 = nu.mean
        mu = CocyclesTools.solve_cohomological(nu, alpha)
        cohomological = CocyclesTools.cohomological_residual(mu, nu, alpha)
        Z = MatrixFunction.fit(lambda points: CocyclesTools.reduction_closed_form(model, mu, points), n,
                               grid=m, force=force, label="Z")

        check = CommonTools.uniform_grid(model.grid)
        z_form = CommonTools.sup_distance(CocyclesTools.reduction_chain(model, mu, check), Z(check))
        B0 = np.array([[1.0, nu0], [0.0, 1.0]])
        reduced = (CommonTools.inverse_2x2(Z(check + alpha)) @ CocyclesTools._schrodinger_samples(model.V, 0.0, check)
                   @ Z(check))
        residual = float(np.max(CommonTools.operator_norm(reduced - B0)))
        logger.info("[Cocycles] Parabolic reduction nu0=%.12g residual=%.2e z-form=%.2e", nu0, residual, z_form)
        if residual >= tol:
            raise ResidualTooLarge(f"Parabolic reduction residual {residual:.3e} exceeds tolerance {tol:.1e}")
        return ReductionResult(Z=Z, nu0=nu0, residual=residual, mu=mu, nu=nu, z_form_residual=z_form,
                               cohomological_residual=cohomological)

    @staticmethod
    def reduction_norm_bound(reduction: ReductionResult, k: int, grid: int = 1024) -> float:
        """||Z||_inf^2 (1 + k |nu0|), a bound for ||A_k|| that follows from the reduction"""
        z_sup = float(np.max(CommonTools.operator_norm(reduction.Z(CommonTools.uniform_grid(grid)))))
        return z_sup ** 2 * (1.0 + k * abs(reduction.nu0))

    @staticmethod
    def q0_normalize(nu0: float) -> Tuple[np.ndarray, float]:
        """Q0 with Q0^-1 B0 Q0 = [[2, -1], [1, 0]] and the sup-entry defect of that identity

        Raises:
            PositiveNu0: nu0 >= 0
        """
        if not nu0 < 0.0:
            raise PositiveNu0(f"Normalization needs nu0 < 0, got {nu0!r}")
        nu1 = math.sqrt(-nu0)
        Q0 = np.array([[-nu1 / 2.0, -nu1 / 2.0], [1.0 / nu1, -1.0 / nu1]])
        B0 = np.array([[1.0, nu0], [0.0, 1.0]])
        check = float(np.max(np.abs(np.linalg.inv(Q0) @ B0 @ Q0 - FREE_EDGE)))
        return Q0, check

    @staticmethod
    def perturbation_profile(model: TwistModel, reduction: Optional[ReductionResult] = None,
                             h: Optional[float] = None, force: bool = False) -> PerturbationProfile:
        """First-order term P1 = Z0(y + alpha)^-1 [[1, 0], [0, 0]] Z0(y), Z0 = Z Q0.

        S_eps^V - S_0^V = eps [[1, 0], [0, 0]], so P1 is the eps-derivative of the
        normalized cocycle Z0(. + alpha)^-1 S_eps^V Z0 at eps = 0.
        """
        reduction = reduction or CocyclesTools.parabolic_reduce(model, tol=np.inf, force=force)
        Q0, _ = CocyclesTools.q0_normalize(reduction.nu0)
        alpha = model.alpha
        Z = reduction.Z

        def sample(points):
            Z0 = Z(points) @ Q0
            Z0_next = Z(points + alpha) @ Q0
            return CommonTools.inverse_2x2(Z0_next) @ RANK_ONE @ Z0

        P1 = MatrixFunction.fit(sample, Z.n_modes, force=True, label="P1").strip_trimmed()
        width = h if h is not None else model.strip_h0 / 2.0
        x = CommonTools.uniform_grid(1024)
        sup_norm = float(np.max(CommonTools.operator_norm(P1(x))))
        strip = max(float(np.max(CommonTools.operator_norm(P1(x, width)))),
                    float(np.max(CommonTools.operator_norm(P1(x, -width)))))
        return PerturbationProfile(P1=P1, sup_norm=sup_norm, strip_norm=strip, strip_width=width)

    # ----------------------------------------------------------- identity checks

    @staticmethod
    def bloch_section_check(model: TwistModel) -> float:
        """sup ||S_0^V(y) U(y) - U(y + alpha)||, U(y) = (phi'(y), phi'(y - alpha))"""
        y = CommonTools.uniform_grid(model.grid)
        alpha = model.alpha
        slope = model.phi.derivative
        U = np.stack([slope(y), slope(y - alpha)], axis=-1)
        image = np.einsum("nij,nj->ni", CocyclesTools._schrodinger_samples(model.V, 0.0, y), U)
        target = np.stack([slope(y + alpha), slope(y)], axis=-1)
        return CommonTools.sup_distance(image, target)

    @staticmethod
    def potential_identity_residual(model: TwistModel) -> float:
        """max |V(y) phi'(y) + phi'(y + alpha) + phi'(y - alpha)| / phi'(y)"""
        y = CommonTools.uniform_grid(model.grid)
        slope = model.phi.derivative
        return CommonTools.sup_distance(model.V(y), -(slope(y + model.alpha) + slope(y - model.alpha)) / slope(y))

    @staticmethod
    def jacobi_section_residual(model: TwistModel) -> float:
        """max |D psi(x) (1, gamma'(x)) - g'(x) (1, gamma'(g(x)))|"""
        x = CommonTools.uniform_grid(model.grid)
        gamma_prime = model.gamma.derivative()
        slope = model.f.derivative()(x)
        g = x + model.gamma(x) + model.f(x)
        g_prime = 1.0 + gamma_prime(x) + slope
        section = np.stack([np.ones_like(x), gamma_prime(x)], axis=-1)
        image = np.einsum("nij,nj->ni", TwistTools.jacobian(model.f, x), section)
        target = g_prime[:, None] * np.stack([np.ones_like(x), gamma_prime(g)], axis=-1)
        return CommonTools.sup_distance(image, target)

    @staticmethod
    def m_conjugacy_residual(model: TwistModel) -> float:
        """max |M D psi(x) M - S_0^{V0}(x)|, V0 = -f' - 2"""
        x = CommonTools.uniform_grid(model.grid)
        V0 = -model.f.derivative()(x) - 2.0
        target = _stack(-V0, -np.ones_like(x), np.ones_like(x), np.zeros_like(x))
        return CommonTools.sup_distance(M @ TwistTools.jacobian(model.f, x) @ M, target)

    # ------------------------------------------------------------------ dichotomy

    @staticmethod
    def uh_test(c: MatrixCocycle, n: int = 1000, phases: int = 16, renorm: int = 32) -> DichotomyResult:
        """Exponential-dichotomy test on a phase grid.

        From theta - n*alpha the cocycle is iterated 3n steps. The first n
        steps give the unstable direction at theta (most expanded image of
        A_n(theta - n*alpha)); the rest give A_n(theta) and A_2n(theta), whose
        most contracted input is the stable direction. The margin is
        min over phases of (log||A_2n(theta)|| - log||A_n(theta)||)/n.

        Raises:
            InconclusiveDichotomy: margin * n between the elliptic and hyperbolic thresholds,
                or no separation between the two directions
        """
        if not c.over_rotation:
            raise InvalidArgument("Dichotomy test needs a cocycle over a rotation")
        if n < 1:
            raise InvalidArgument(f"Dichotomy test needs n >= 1, got {n}")
        theta = CommonTools.uniform_grid(phases)
        prod = np.broadcast_to(np.eye(2), (phases, 2, 2)).copy()
        scale = np.zeros(phases)
        past = middle = None
        log_n = None
        for k, A in enumerate(CocyclesTools._matrices(c, theta - n * c.alpha, 3 * n), start=1):
            prod = A @ prod
            if k % renorm == 0:
                norms = CommonTools.operator_norm(prod)
                scale += np.log(norms)
                prod /= norms[:, None, None]
            if k == n:
                past = prod.copy()
                prod = np.broadcast_to(np.eye(2), (phases, 2, 2)).copy()
                scale = np.zeros(phases)
            elif k == 2 * n:
                middle = prod.copy()
                log_n = scale + np.log(CommonTools.operator_norm(prod))
        log_2n = scale + np.log(CommonTools.operator_norm(prod))
        margin = float(np.min(log_2n - log_n)) / n

        unstable = np.linalg.svd(past)[0][:, :, 0]
        stable = np.linalg.svd(middle)[2][:, 1, :]
        separation = float(np.min(np.abs(unstable[:, 0] * stable[:, 1] - unstable[:, 1] * stable[:, 0])))
        score = margin * n
        logger.debug("[Cocycles] Dichotomy score %.3f separation %.3e", score, separation)
        if score > HYPERBOLIC_SCORE and separation > MIN_SEPARATION:
            return DichotomyResult(hyperbolic=True, margin=margin, separation=separation, n=n)
        if score < ELLIPTIC_SCORE:
            return DichotomyResult(hyperbolic=False, margin=margin, separation=separation, n=n)
        raise InconclusiveDichotomy(margin, n)
