"""
Shared fixtures: the free model, the golden c = 0.3 model and a clean configuration state
"""

import os

import pytest

from src.factory.model_manager import reset_manager
from src.model.circle_diffeo import CircleDiffeo
from src.model.frequency import Frequency
from src.tools.curves import CurvesTools

GOLDEN_MODES = 256
GOLDEN_GRID = 2048


@pytest.fixture(scope="session")
def free_model():
    """phi = identity: f = 0, gamma = alpha, V = -2"""
    return CurvesTools.construct_from_conjugacy(Frequency.golden(), CircleDiffeo.identity(GOLDEN_MODES),
                                                n_modes=GOLDEN_MODES, grid=GOLDEN_GRID)


@pytest.fixture(scope="session")
def golden_model():
    """Golden frequency, phi' = 1 + 0.3 cos(2 pi x)"""
    phi = CircleDiffeo.from_harmonics({"c1": 0.3}, n_modes=GOLDEN_MODES)
    return CurvesTools.construct_from_conjugacy(Frequency.golden(), phi, n_modes=GOLDEN_MODES, grid=GOLDEN_GRID)


@pytest.fixture(autouse=True)
def clean_config(monkeypatch):
    """No AMSPEC_* variables leak in, and every test starts with fresh caches"""
    for key in list(os.environ):
        if key.startswith("AMSPEC_"):
            monkeypatch.delenv(key)
    reset_manager()
    yield
    reset_manager()
