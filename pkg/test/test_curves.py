"""
Forward construction of twist maps with an invariant graph, and its certified identities
"""

import numpy as np
import pytest

from src.model.circle_diffeo import CircleDiffeo
from src.model.errors import InvalidArgument, InvarianceCertificationFailed, NonInvertible, RationalFrequency
from src.model.fourier_series import FourierSeries
from src.model.frequency import Frequency
from src.tools.common_tools import CommonTools
from src.tools.curves import CurvesTools
from src.tools.harmonics import HarmonicsTools


def test_identity_gives_rigid_rotation(free_model):
    x = CommonTools.uniform_grid(256)
    np.testing.assert_allclose(free_model.gamma(x), free_model.alpha, atol=1e-15)
    assert free_model.f.sup_norm() < 1e-15
    np.testing.assert_allclose(free_model.V(x), -2.0, atol=1e-14)
    assert free_model.residuals["invariance"] < 1e-15


def test_golden_model_is_certified(golden_model):
    residuals = golden_model.residuals
    assert residuals["invariance"] < 1e-10
    assert residuals["mean_f"] < 1e-12
    assert residuals["g_consistency"] < 1e-10
    assert residuals["derivative_identity"] < 1e-9
    assert residuals["min_g_prime"] > 0.0
    assert golden_model.strip_h0 > 0.0


def test_construct_rejects_bad_input():
    phi = CircleDiffeo.from_harmonics({"c1": 0.3}, n_modes=64)
    with pytest.raises(InvalidArgument):
        CurvesTools.construct_from_conjugacy(Frequency.golden(), phi, n_modes=64, grid=128)
    with pytest.raises(RationalFrequency):
        CurvesTools.construct_from_conjugacy(Frequency.parse("0.5"), phi, n_modes=64, grid=512)
    with pytest.raises(NonInvertible):
        CurvesTools.construct_from_conjugacy(Frequency.golden(), CircleDiffeo.from_harmonics({"c1": 1.2}, n_modes=64),
                                             n_modes=64, grid=512)


def test_too_few_modes_fail_certification():
    phi = CircleDiffeo.from_harmonics({"c1": 0.3}, n_modes=8)
    with pytest.raises(InvarianceCertificationFailed):
        CurvesTools.construct_from_conjugacy(Frequency.golden(), phi, n_modes=8, grid=2048, force=True)


def test_residuals_shrink_with_modes():
    """Truncation dominates at 16 modes; doubling them drops the residuals by orders of magnitude"""
    residuals = {}
    for n in (16, 32):
        phi = CircleDiffeo.from_harmonics({"c1": 0.3}, n_modes=n)
        model = CurvesTools.construct_from_conjugacy(Frequency.golden(), phi, n_modes=n, grid=2048,
                                                     certify=False, force=True)
        residuals[n] = model.residuals
    assert residuals[32]["invariance"] < residuals[16]["invariance"] / 10.0
    assert residuals[32]["g_consistency"] < residuals[16]["g_consistency"] / 10.0


def test_induced_map_of_free_model(free_model):
    induced = CurvesTools.induced_circle_map(free_model)
    x = CommonTools.uniform_grid(128)
    np.testing.assert_allclose(induced.conjugated(x), x + free_model.alpha, atol=1e-12)


def test_induced_map_two_constructions_agree(golden_model):
    induced = CurvesTools.induced_circle_map(golden_model)
    assert induced.disagreement < 1e-10
    estimate = HarmonicsTools.rotation_number(induced.direct.trimmed(), 20000)
    assert abs(estimate.value - golden_model.alpha) < 1e-6


def test_invariance_residual():
    alpha = Frequency.golden().value
    zero = FourierSeries.zeros(4)
    assert CurvesTools.invariance_residual(zero, alpha, zero) == 0.0


def test_perturbed_gamma_breaks_invariance(golden_model):
    perturbed = CurvesTools.perturb_gamma(golden_model, 0.01)
    residual = CurvesTools.invariance_residual(perturbed.f, perturbed.gamma.mean, perturbed.gamma.series,
                                               perturbed.grid)
    assert 1e-3 <= residual <= 1e-1


def test_gamma_from_rotation():
    alpha = Frequency.golden().value
    gamma = CurvesTools.gamma_from_g(CircleDiffeo.rotation(alpha, 8))
    assert gamma.mean == pytest.approx(alpha, abs=1e-15)
    assert gamma.series.sup_norm() < 1e-14


def test_gamma_round_trip(golden_model):
    induced = CurvesTools.induced_circle_map(golden_model)
    gamma = CurvesTools.gamma_from_g(induced.conjugated, n_modes=golden_model.n_modes)
    x = CommonTools.uniform_grid(1024)
    assert CommonTools.sup_distance(gamma(x), golden_model.gamma(x)) < 1e-9
    assert CurvesTools.gamma_identity_residual(induced.direct, golden_model.gamma) < 1e-10


def test_derivative_identity(golden_model):
    assert CurvesTools.derivative_identity_residual(golden_model) < 1e-9


def test_ordering(golden_model, free_model):
    assert CurvesTools.ordering_check(golden_model) > 0.0
    assert CurvesTools.ordering_check(free_model) == pytest.approx(1.0)


def test_coefficient_decay(golden_model):
    h0, bound = CurvesTools.coefficient_decay(golden_model.f)
    assert 0.05 < h0 < 0.5
    k = np.abs(golden_model.f.wavenumbers)
    significant = np.abs(golden_model.f.coeffs) > 1e-14
    envelope = bound * np.exp(-2.0 * np.pi * h0 * k)
    assert np.all(np.abs(golden_model.f.coeffs)[significant] <= envelope[significant] * (1.0 + 1e-12))
