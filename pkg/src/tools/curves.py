import logging
from typing import Dict, Optional, Tuple

import numpy as np

from src.model.circle_diffeo import CircleDiffeo
from src.model.errors import ConsistencyFailure, InvalidArgument, InvarianceCertificationFailed
from src.model.fourier_series import FourierSeries, OffsetSeries
from src.model.frequency import Frequency
from src.model.twist_model import InducedCircleMap, TwistModel
from src.tools.common_tools import CommonTools
from src.tools.harmonics import HarmonicsTools

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCES = {
    "invariance": 1e-9,
    "mean_f": 1e-9,
    "g_consistency": 1e-9,
}


class CurvesTools:
    """Twist maps with an exact analytic invariant graph, built forward from a conjugacy"""

    @staticmethod
    def construct_from_conjugacy(frequency: Frequency, phi: CircleDiffeo, n_modes: int = 256,
                                 grid: int = 2048, certify: bool = True, force: bool = False,
                                 tolerances: Optional[Dict[str, float]] = None) -> TwistModel:
        """Build f, gamma and V from phi so that the graph of gamma is invariant.

        With y = phi^-1(x) on the lift:
            f(x)     = p(y + alpha) - 2 p(y) + p(y - alpha)
            gamma(x) = alpha + p(y) - p(y - alpha)
        and V = -f' o phi - 2 sampled at the grid points y.

        Args:
            frequency: irrational rotation frequency
            phi: orientation-preserving diffeomorphism
            n_modes: modes kept in every fitted series
            grid: certification grid, at least 4 * n_modes points
            certify: raise when a certified invariant fails
            force: keep fits with large truncation tails
            tolerances: overrides for invariance, mean_f, g_consistency

        Raises:
            InvarianceCertificationFailed: residual above threshold (typically too few modes)
            NonInvertible, NoConvergence: propagated from the inversion of phi
        """
        if grid < 4 * n_modes:
            raise InvalidArgument(f"Certification grid {grid} must be at least 4x the {n_modes} modes")
        tol = dict(DEFAULT_TOLERANCES)
        tol.update(tolerances or {})
        HarmonicsTools.check_irrational(frequency)
        HarmonicsTools.check_orientation(phi)
        alpha = frequency.value
        p = phi.periodic_part

        x = CommonTools.uniform_grid(grid)
        y = HarmonicsTools.invert_points(phi, x)
        f_samples = p(y + alpha) - 2.0 * p(y) + p(y - alpha)
        gamma_samples = alpha + p(y) - p(y - alpha)
        f = FourierSeries.fit(f_samples, n_modes, force=force, label="f")
        gamma = OffsetSeries.split(FourierSeries.fit(gamma_samples, n_modes, force=force, label="gamma"))

        # V on the uniform grid of the rotation coordinate
        V_samples = -f.derivative()(phi(x)) - 2.0
        V = OffsetSeries.split(FourierSeries.fit(V_samples, n_modes, force=force, label="V"))

        residuals = {
            "invariance": CurvesTools.invariance_residual(f, gamma.mean, gamma.series, grid),
            "mean_f": abs(f.mean),
            "derivative_identity": CurvesTools._derivative_identity(f, gamma, grid),
            "min_g_prime": CurvesTools._min_g_prime(f, gamma, grid),
            "f_tail": f.tail,
        }
        model = TwistModel(
            frequency=frequency, phi=phi, f=f, gamma=gamma, V=V, n_modes=n_modes, grid=grid,
            strip_h0=CommonTools.decay_fit(V), residuals=residuals,
        )
        try:
            induced = CurvesTools.induced_circle_map(model, tol=np.inf, force=force)
            residuals["g_consistency"] = induced.disagreement
        except Exception as e:
            if certify:
                raise
            logger.warning("[Curves] g-consistency not computed: %s", e)

        logger.info(
            "[Curves] Constructed model alpha=%s modes=%d grid=%d invariance=%.2e mean_f=%.2e h0=%.3f",
            frequency.tag or frequency.digits, n_modes, grid, residuals["invariance"], residuals["mean_f"],
            model.strip_h0,
        )
        if certify:
            failures = []
            for name in ("invariance", "mean_f", "g_consistency"):
                if residuals.get(name, np.inf) >= tol[name]:
                    failures.append(f"{name}={residuals.get(name, np.inf):.3e} (limit {tol[name]:.1e})")
            if residuals["min_g_prime"] <= 0.0:
                failures.append(f"min g'={residuals['min_g_prime']:.3e} is not positive")
            if failures:
                raise InvarianceCertificationFailed(
                    f"Model certification failed at {n_modes} modes: {'; '.join(failures)}"
                )
        return model

    @staticmethod
    def invariance_residual(f: FourierSeries, gamma_mean: float, gamma0: FourierSeries, grid: int = 2048) -> float:
        """max over the grid of |gamma(x) + f(x) - gamma(g(x))|, g(x) = x + gamma(x) + f(x)"""
        gamma = OffsetSeries(gamma_mean, gamma0)
        x = CommonTools.uniform_grid(grid)
        momentum = gamma(x) + f(x)
        return CommonTools.sup_distance(momentum, gamma(x + momentum))

    @staticmethod
    def _derivative_identity(f: FourierSeries, gamma: OffsetSeries, grid: int) -> float:
        x = CommonTools.uniform_grid(grid)
        gamma_prime = gamma.derivative()
        g_prime = 1.0 + gamma_prime(x) + f.derivative()(x)
        g = x + gamma(x) + f(x)
        return float(np.max(np.abs(g_prime * (1.0 - gamma_prime(g)) - 1.0)))

    @staticmethod
    def derivative_identity_residual(model: TwistModel) -> float:
        """max |g'(x) (1 - gamma'(g(x))) - 1|"""
        return CurvesTools._derivative_identity(model.f, model.gamma, model.grid)

    @staticmethod
    def _min_g_prime(f: FourierSeries, gamma: OffsetSeries, grid: int) -> float:
        x = CommonTools.uniform_grid(grid)
        return float(np.min(1.0 + gamma.derivative()(x) + f.derivative()(x)))

    @staticmethod
    def ordering_check(model: TwistModel) -> float:
        """min g' on the grid; the curve dynamics preserves the circular order

        Raises:
            ConsistencyFailure: g' is not positive somewhere
        """
        lowest = CurvesTools._min_g_prime(model.f, model.gamma, model.grid)
        if lowest <= 0.0:
            raise ConsistencyFailure(f"Induced circle map reverses order: min g' = {lowest:.3e}")
        return lowest

    @staticmethod
    def induced_circle_map(model: TwistModel, tol: float = 1e-9, force: bool = False) -> InducedCircleMap:
        """g as phi o r_alpha o phi^-1 and as x + gamma(x) + f(x)

        Raises:
            ConsistencyFailure: the two constructions differ by tol or more
        """
        n = model.n_modes
        inverse = HarmonicsTools.diffeo_invert(model.phi, n_modes=n, force=force)
        rotated = HarmonicsTools.diffeo_compose(CircleDiffeo.rotation(model.alpha, n), inverse, n, force=force)
        conjugated = HarmonicsTools.diffeo_compose(model.phi, rotated, n, force=force)
        direct = CircleDiffeo(model.gamma.as_series() + model.f)
        x = CommonTools.uniform_grid(model.grid)
        disagreement = CommonTools.sup_distance(conjugated(x), direct(x))
        if disagreement >= tol:
            raise ConsistencyFailure(
                f"The two constructions of g disagree by {disagreement:.3e} (tolerance {tol:.1e})"
            )
        return InducedCircleMap(conjugated=conjugated, direct=direct, disagreement=disagreement)

    @staticmethod
    def gamma_from_g(g: CircleDiffeo, n_modes: Optional[int] = None, force: bool = False) -> OffsetSeries:
        """gamma = I - g^-1, so that g(x) = x + gamma(g(x))"""
        inverse = HarmonicsTools.diffeo_invert(g, n_modes=n_modes, force=force)
        return OffsetSeries.split(-inverse.periodic_part)

    @staticmethod
    def gamma_identity_residual(g: CircleDiffeo, gamma: OffsetSeries, grid: int = 2048) -> float:
        """max |g(x) - x - gamma(g(x))|"""
        x = CommonTools.uniform_grid(grid)
        gx = g(x)
        return float(np.max(np.abs(gx - x - gamma(gx))))

    @staticmethod
    def perturb_gamma(model: TwistModel, amplitude: float, k: int = 1) -> TwistModel:
        """Copy of the model with amplitude*cos(2*pi*k*x) added to gamma (not recertified)"""
        bump = FourierSeries.cosine(amplitude, k, model.gamma.n_modes)
        return TwistModel(
            frequency=model.frequency, phi=model.phi, f=model.f,
            gamma=OffsetSeries(model.gamma.mean, model.gamma.series + bump), V=model.V,
            n_modes=model.n_modes, grid=model.grid, strip_h0=model.strip_h0, residuals=dict(model.residuals),
        )

    @staticmethod
    def coefficient_decay(series: FourierSeries) -> Tuple[float, float]:
        """(h0, C) with |c_k| <= C exp(-2*pi*h0*|k|) over the stored modes"""
        h0 = CommonTools.decay_fit(series)
        k = np.abs(series.wavenumbers)
        bound = float(np.max(np.abs(series.coeffs) * np.exp(2.0 * np.pi * h0 * k)))
        return h0, bound
