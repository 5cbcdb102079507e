from .circle_diffeo import CircleDiffeo
from .cocycle import MatrixCocycle, MatrixFunction, ReductionResult
from .continued_fraction import BrjunoReport, ContinuedFraction
from .fourier_series import FourierSeries, OffsetSeries
from .frequency import Frequency
from .reports import ResonanceReport, RotationEstimate, SpectralReport
from .run_config import RunConfig
from .twist_model import Configuration, CylinderState, PeriodicOrbitSpec, TwistModel

__all__ = [
    "BrjunoReport", "CircleDiffeo", "Configuration", "ContinuedFraction", "CylinderState",
    "FourierSeries", "Frequency", "MatrixCocycle", "MatrixFunction", "OffsetSeries",
    "PeriodicOrbitSpec", "ReductionResult", "ResonanceReport", "RotationEstimate", "RunConfig",
    "SpectralReport", "TwistModel",
]
