import logging
import math
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.factory.ids_factory import IdsStrategyFactory
from src.model.cocycle import MatrixCocycle
from src.model.errors import InvalidArgument, IterateOverflow, WindowTooSmall
from src.model.fourier_series import FourierSeries, OffsetSeries
from src.model.reports import DualCheck, EdgeProbe, HomogeneityProbe, IdsCrossCheck, ResonanceReport, SpectralReport
from src.model.twist_model import TwistModel
from src.strategy.ids_strategy import CountingIdsStrategy
from src.tools.aubry import TridiagonalOperator
from src.tools.cocycles import CocyclesTools
from src.tools.common_tools import CommonTools

logger = logging.getLogger(__name__)

SeriesLike = Union[FourierSeries, OffsetSeries]

# |counting - rotation| above which the two IDS estimates are flagged
METHOD_DISAGREEMENT = 0.02


class SpectralTools:
    """Finite sections, integrated density of states, the dual operator and resonances"""

    @staticmethod
    def section_operator(V: SeriesLike, alpha: float, phi0: float, n: int) -> TridiagonalOperator:
        if n < 2:
            raise InvalidArgument(f"Finite section needs at least 2 sites, got {n}")
        return TridiagonalOperator(V(phi0 + np.arange(n) * alpha))

    @staticmethod
    def finite_section_eigs(V: SeriesLike, alpha: float, phi0: float, n: int) -> SpectralReport:
        """Dirichlet section on sites 0..n-1 with diagonal V(phi0 + k*alpha)"""
        eigenvalues = SpectralTools.section_operator(V, alpha, phi0, n).eigenvalues()
        samples = [(float(E), (j + 1) / n) for j, E in enumerate(eigenvalues)]
        return SpectralReport(eigenvalues=eigenvalues, ids_samples=samples, top_eigenvalue=float(eigenvalues[-1]),
                              section_size=n, phase=phi0)

    @staticmethod
    def bloch_rayleigh_bound(model: TwistModel, n: int, phi0: float = 0.0) -> float:
        """<u, H u>/<u, u> for u_k = phi'(phi0 + k*alpha) sin^2(pi (k + 1)/(n + 1))"""
        operator = SpectralTools.section_operator(model.V, model.alpha, phi0, n)
        k = np.arange(n)
        u = model.phi.derivative(phi0 + k * model.alpha) * np.sin(np.pi * (k + 1) / (n + 1)) ** 2
        return operator.quadratic_form(u) / float(np.dot(u, u))

    @staticmethod
    def edge_probe(model: TwistModel, sizes: Sequence[int], phi0: float = 0.0) -> EdgeProbe:
        """Top section eigenvalue per size, with the windowed Bloch-wave lower bound"""
        sizes = np.asarray(sorted(int(n) for n in sizes))
        tops = np.array([
            SpectralTools.section_operator(model.V, model.alpha, phi0, n).top_eigenvalue() for n in sizes
        ])
        bounds = np.array([SpectralTools.bloch_rayleigh_bound(model, n, phi0) for n in sizes])
        fitted = float(np.max(-tops * sizes.astype(float) ** 2))
        logger.info("[Spectral] Edge probe sizes=%s fitted C=%.4g", sizes.tolist(), fitted)
        return EdgeProbe(sizes=sizes, top_eigenvalues=tops, rayleigh_bounds=bounds, fitted_constant=fitted)

    # ---------------------------------------------------------------------- IDS

    @staticmethod
    def ids_estimate(V: SeriesLike, alpha: float, phi0: float, E: float, method: str = "counting",
                     **params) -> float:
        """N(E) by finite-section counting or as 1 - 2*rho(E)"""
        return IdsStrategyFactory.create_strategy(method, V, alpha, phi0, **params).estimate(E)

    @staticmethod
    def ids_cross_check(V: SeriesLike, alpha: float, phi0: float, E: float, size: int = 2000,
                        iterations: int = 100000, counting: Optional[CountingIdsStrategy] = None) -> IdsCrossCheck:
        """Both IDS estimates at E; disagreement beyond 0.02 is flagged, not raised"""
        counter = counting or IdsStrategyFactory.create_strategy("counting", V, alpha, phi0, size=size)
        by_count = counter.estimate(E)
        by_rotation = IdsStrategyFactory.create_strategy("rotation", V, alpha, phi0, iterations=iterations).estimate(E)
        disagree = abs(by_count - by_rotation) > METHOD_DISAGREEMENT
        if disagree:
            logger.warning("[Spectral] IDS methods disagree at E=%.6g: counting=%.4f rotation=%.4f",
                           E, by_count, by_rotation)
        return IdsCrossCheck(energy=float(E), counting=by_count, rotation=by_rotation, disagreement=disagree)

    # -------------------------------------------------------------------- duality

    @staticmethod
    def dual_apply(V: SeriesLike, alpha: float, phi0: float, u_hat: np.ndarray) -> np.ndarray:
        """(H^ u)_n = sum_k v_{n-k} u_k + 2 cos(2*pi*(phi0 + n*alpha)) u_n for n, k in -K..K

        Raises:
            WindowTooSmall: the sum needs v_j with |j| = 2K beyond the stored modes of V
        """
        u_hat = np.asarray(u_hat, dtype=complex)
        if u_hat.ndim != 1 or u_hat.size % 2 == 0:
            raise InvalidArgument(f"Dual vector must be indexed -K..K (odd length), got shape {u_hat.shape}")
        K = (u_hat.size - 1) // 2
        v = CommonTools.as_series(V)
        N = v.n_modes
        if 2 * K > N:
            raise WindowTooSmall(f"Dual window {K} needs V modes up to {2 * K}, only {N} are stored")
        full = np.convolve(v.coeffs, u_hat)
        n = np.arange(-K, K + 1)
        return full[N:N + 2 * K + 1] + 2.0 * np.cos(2.0 * np.pi * (phi0 + n * alpha)) * u_hat

    @staticmethod
    def dual_eigencheck(model: TwistModel) -> DualCheck:
        """Residual of H^ on the coefficients of phi' and their exponential decay rate"""
        slope = (model.phi.derivative_part + 1.0).trimmed()
        window = model.V.n_modes // 2
        if slope.n_modes > window:
            raise WindowTooSmall(f"phi' carries {slope.n_modes} modes, more than half the {model.V.n_modes} of V")
        u_hat = slope.resized(window).coeffs
        image = SpectralTools.dual_apply(model.V, model.alpha, 0.0, u_hat)
        residual = float(np.linalg.norm(image))
        relative = residual / float(np.linalg.norm(u_hat))

        magnitudes = np.abs(u_hat[window:])
        k = np.arange(window + 1)
        keep = magnitudes > 1e-13 * float(np.max(magnitudes))
        if np.count_nonzero(keep) < 2:
            rate = -math.inf
        else:
            rate, _ = CommonTools.log_linear_fit(k[keep], magnitudes[keep])
        return DualCheck(residual=residual, relative_residual=relative, decay_rate=rate,
                         potential_residual=CocyclesTools.potential_identity_residual(model))

    # ---------------------------------------------------------------- resonances

    @staticmethod
    def torus_distance(x: np.ndarray) -> np.ndarray:
        return np.abs(x - np.round(x))

    @staticmethod
    def resonance_scan(phi0: float, alpha: float, epsilon0: float, K: int) -> ResonanceReport:
        """k with |2 phi0 - k alpha|_T <= exp(-epsilon0 |k|), minimal among all |l| <= |k|"""
        if K < 1:
            raise InvalidArgument(f"Resonance scan bound must be at least 1, got {K}")
        k = np.arange(-K, K + 1)
        distance = SpectralTools.torus_distance(2.0 * phi0 - k * alpha)
        per_level = np.minimum(distance[K:], distance[K::-1])
        best = np.minimum.accumulate(per_level)
        level = np.abs(k)
        mask = (distance <= best[level]) & (distance <= np.exp(-epsilon0 * level))
        hits = k[mask]
        # k and -k tie when 2*phi0 is 0 or 1/2 mod 1; the positive one is kept
        hits = hits[np.lexsort((-hits, np.abs(hits)))]
        _, first = np.unique(np.abs(hits), return_index=True)
        return ResonanceReport(epsilon0=epsilon0, resonances=hits[first], phase=phi0, K=K)

    # ------------------------------------------------------------ spectral measure

    @staticmethod
    def measure_factor(c: MatrixCocycle, eps: float, phases: int = 32) -> float:
        """eps * sup_{0 <= k <= ceil(1/eps)} ||A_k||_T^2 over a phase grid

        Raises:
            IterateOverflow: the products passed the overflow guard
        """
        if not eps > 0.0:
            raise InvalidArgument(f"Radius must be positive, got {eps!r}")
        K = math.ceil(1.0 / eps)
        iterates = CocyclesTools.cocycle_iterates(c, K, phases=phases)
        if iterates.truncated:
            raise IterateOverflow(f"Iterates overflowed before k = {K}")
        return eps * max(1.0, float(np.max(iterates.sup_norms))) ** 2

    @staticmethod
    def spectral_measure_bound(model: TwistModel, E: float, eps: float, phases: int = 32) -> float:
        """The constant-free factor of mu(E - eps, E + eps) <= C eps sup_k ||A_k||^2"""
        cocycle = CocyclesTools.schrodinger_cocycle(model.V, E, model.alpha, strip_h0=model.strip_h0)
        return SpectralTools.measure_factor(cocycle, eps, phases)

    # -------------------------------------------------------------------- probes

    @staticmethod
    def homogeneity_probe(report: SpectralReport, epsilon0: float = 0.05,
                          radii: Iterable[float] = (0.001, 0.003, 0.01), energies: int = 10,
                          net: int = 21) -> HomogeneityProbe:
        """Share of an eps-net around spectral points E in (-epsilon0, 0) lying within 2/n of an eigenvalue.

        kappa is the smallest share seen; it is an empirical curve, not a gate.
        """
        eigenvalues = report.eigenvalues
        near_edge = eigenvalues[(eigenvalues > -epsilon0) & (eigenvalues < 0.0)]
        if near_edge.size == 0:
            return HomogeneityProbe()
        picks = near_edge[np.unique(np.linspace(0, near_edge.size - 1, min(energies, near_edge.size)).astype(int))]
        reach = 2.0 / report.section_size
        samples: List[Tuple[float, float, float]] = []
        for E in picks:
            for eps in radii:
                if not eps < abs(E):
                    continue
                points = np.linspace(E - eps, E + eps, net)
                idx = np.clip(np.searchsorted(eigenvalues, points), 1, eigenvalues.size - 1)
                nearest = np.minimum(np.abs(points - eigenvalues[idx - 1]), np.abs(points - eigenvalues[idx]))
                samples.append((float(E), float(eps), float(np.mean(nearest <= reach))))
        kappa = min((share for _, _, share in samples), default=0.0)
        return HomogeneityProbe(samples=samples, kappa=kappa)

    @staticmethod
    def subcriticality_profile(model: TwistModel, deltas: Optional[Sequence[float]] = None, n: int = 100000,
                               E: float = 0.0, phases: int = 8) -> List[Tuple[float, float]]:
        """LE(E, delta) on a delta-grid inside the fitted strip"""
        h0 = model.strip_h0
        grid = deltas if deltas is not None else [h0 * t for t in (0.0, 0.25, 0.5, 0.75)]
        cocycle = CocyclesTools.schrodinger_cocycle(model.V, E, model.alpha, strip_h0=h0)
        profile = []
        for delta in grid:
            if abs(delta) >= h0:
                logger.warning("[Spectral] Skipping delta=%.4g outside the strip h0=%.4g", delta, h0)
                continue
            profile.append((float(delta), CocyclesTools.lyapunov_exponent(cocycle, n, delta=delta, phases=phases)))
        return profile
