from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, Optional, Union

import numpy as np
from scipy import fft

from src.model.errors import InvalidArgument, TruncationOverflow

# Rows evaluated per block; keeps the (points x modes) phase matrix small.
_CHUNK = 2048

# Relative tail (l1) above which a fit is refused unless forced.
TAIL_RATIO_LIMIT = 1e-6


@dataclass(frozen=True, eq=False)
class FourierSeries:
    """Real 1-periodic function stored as truncated complex coefficients.

    ``coeffs[j]`` holds the coefficient of ``exp(2*pi*i*k*x)`` for
    ``k = j - n_modes``, i.e. the index order is k = -N..N. Hermitian
    symmetry ``c(-k) = conj(c(k))`` makes the function real on the real line.
    ``tail`` is the l1 norm of the discarded modes when the series was fitted
    from samples (0 for series built from exact coefficients).
    """

    coeffs: np.ndarray
    tail: float = 0.0

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=complex)
        if coeffs.ndim != 1 or coeffs.size % 2 == 0:
            raise InvalidArgument(
                f"Fourier coefficients must be a 1-d array of odd length, got shape {coeffs.shape}"
            )
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    # ------------------------------------------------------------------ builders

    @classmethod
    def zeros(cls, n_modes: int = 0) -> "FourierSeries":
        return cls(np.zeros(2 * n_modes + 1, dtype=complex))

    @classmethod
    def constant(cls, value: float, n_modes: int = 0) -> "FourierSeries":
        coeffs = np.zeros(2 * n_modes + 1, dtype=complex)
        coeffs[n_modes] = value
        return cls(coeffs)

    @classmethod
    def from_modes(cls, modes: Dict[int, complex], n_modes: int) -> "FourierSeries":
        """Build from positive-k coefficients; negative modes follow by symmetry."""
        coeffs = np.zeros(2 * n_modes + 1, dtype=complex)
        for k, value in modes.items():
            if abs(k) > n_modes:
                raise TruncationOverflow(f"Mode {k} exceeds capacity of {n_modes} modes")
            if k == 0:
                coeffs[n_modes] = complex(value).real
            else:
                coeffs[n_modes + k] = value
                coeffs[n_modes - k] = np.conj(value)
        return cls(coeffs)

    @classmethod
    def cosine(cls, amplitude: float, k: int, n_modes: int) -> "FourierSeries":
        """amplitude * cos(2*pi*k*x)"""
        return cls.from_modes({k: amplitude / 2.0}, n_modes)

    @classmethod
    def sine(cls, amplitude: float, k: int, n_modes: int) -> "FourierSeries":
        """amplitude * sin(2*pi*k*x)"""
        return cls.from_modes({k: -0.5j * amplitude}, n_modes)

    @classmethod
    def fit(cls, samples: np.ndarray, n_modes: int, force: bool = False,
            label: str = "series") -> "FourierSeries":
        """Fit a real series to samples on the uniform grid x_j = j/m.

        Args:
            samples: real values at x_j = j/m, j = 0..m-1
            n_modes: number of modes N to keep
            force: keep the fit even if the discarded tail is large
            label: name used in error messages

        Returns:
            Series with ``tail`` set to the l1 norm of the discarded modes

        Raises:
            TruncationOverflow: N does not fit the grid, or tail/total > 1e-6
        """
        samples = np.asarray(samples, dtype=float)
        m = samples.size
        if 2 * n_modes >= m:
            raise TruncationOverflow(
                f"Cannot fit {n_modes} modes of {label} from {m} samples (need more than {2 * n_modes})"
            )
        spectrum = fft.rfft(samples) / m
        magnitudes = np.abs(spectrum)
        weights = np.full(magnitudes.size, 2.0)
        weights[0] = 1.0
        if m % 2 == 0:
            weights[-1] = 1.0
        total = float(np.dot(weights, magnitudes))
        tail = float(np.dot(weights[n_modes + 1:], magnitudes[n_modes + 1:]))
        if not force and total > 0.0 and tail / total > TAIL_RATIO_LIMIT:
            raise TruncationOverflow(
                f"Fourier tail of {label} is {tail / total:.2e} of its l1 norm at {n_modes} modes; "
                f"increase the mode count or force the fit"
            )

        coeffs = np.zeros(2 * n_modes + 1, dtype=complex)
        coeffs[n_modes:] = spectrum[:n_modes + 1]
        coeffs[:n_modes] = np.conj(spectrum[1:n_modes + 1])[::-1]
        coeffs[n_modes] = coeffs[n_modes].real
        return cls(coeffs, tail=tail)

    # ---------------------------------------------------------------- accessors

    @property
    def n_modes(self) -> int:
        return (self.coeffs.size - 1) // 2

    @property
    def wavenumbers(self) -> np.ndarray:
        return np.arange(-self.n_modes, self.n_modes + 1)

    @property
    def mean(self) -> float:
        return float(self.coeffs[self.n_modes].real)

    def coeff(self, k: int) -> complex:
        if abs(k) > self.n_modes:
            return 0j
        return complex(self.coeffs[self.n_modes + k])

    @cached_property
    def band(self) -> int:
        """Largest |k| carrying a nonzero coefficient"""
        nonzero = np.nonzero(self.coeffs)[0]
        if nonzero.size == 0:
            return 0
        return int(np.max(np.abs(nonzero - self.n_modes)))

    def l1_norm(self) -> float:
        return float(np.sum(np.abs(self.coeffs)))

    def hermitian_defect(self) -> float:
        """Relative violation of c(-k) = conj(c(k))"""
        scale = max(self.l1_norm(), np.finfo(float).tiny)
        return float(np.max(np.abs(self.coeffs - np.conj(self.coeffs[::-1]))) / scale)

    # --------------------------------------------------------------- evaluation

    def evaluate(self, x: Union[float, np.ndarray], delta: float = 0.0) -> np.ndarray:
        """Complex values at x + i*delta"""
        x = np.asarray(x, dtype=float)
        flat = np.mod(x.ravel(), 1.0)
        band = self.band
        k = np.arange(-band, band + 1)
        c = self.coeffs[self.n_modes - band:self.n_modes + band + 1]
        z = flat + 1j * delta
        out = np.empty(flat.size, dtype=complex)
        for start in range(0, flat.size, _CHUNK):
            block = z[start:start + _CHUNK]
            out[start:start + _CHUNK] = np.exp(2j * np.pi * np.outer(block, k)) @ c
        return out.reshape(x.shape)

    def __call__(self, x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        values = self.evaluate(x).real
        if values.ndim == 0:
            return float(values)
        return values

    def sup_norm(self, grid: int = 4096, delta: float = 0.0) -> float:
        x = np.arange(grid) / grid
        return float(np.max(np.abs(self.evaluate(x, delta))))

    # --------------------------------------------------------------- operations

    def derivative(self) -> "FourierSeries":
        return FourierSeries(self.coeffs * (2j * np.pi * self.wavenumbers))

    def antiderivative(self) -> "FourierSeries":
        """Zero-mean antiderivative; the mean of ``self`` is ignored."""
        k = self.wavenumbers
        coeffs = np.zeros_like(self.coeffs)
        nonzero = k != 0
        coeffs[nonzero] = self.coeffs[nonzero] / (2j * np.pi * k[nonzero])
        return FourierSeries(coeffs)

    def shifted(self, t: float) -> "FourierSeries":
        """The series of x -> s(x + t)"""
        return FourierSeries(self.coeffs * np.exp(2j * np.pi * self.wavenumbers * t), tail=self.tail)

    def zero_mean(self) -> "FourierSeries":
        coeffs = np.array(self.coeffs)
        coeffs[self.n_modes] = 0.0
        return FourierSeries(coeffs, tail=self.tail)

    def resized(self, n_modes: int) -> "FourierSeries":
        coeffs = np.zeros(2 * n_modes + 1, dtype=complex)
        keep = min(n_modes, self.n_modes)
        coeffs[n_modes - keep:n_modes + keep + 1] = self.coeffs[self.n_modes - keep:self.n_modes + keep + 1]
        dropped = float(np.sum(np.abs(self.coeffs))) - float(np.sum(np.abs(coeffs)))
        return FourierSeries(coeffs, tail=self.tail + max(dropped, 0.0))

    def trimmed(self, rel_floor: float = 1e-15) -> "FourierSeries":
        """Drop modes below rel_floor * max|c|; needed before evaluating off the real axis."""
        magnitudes = np.abs(self.coeffs)
        peak = float(np.max(magnitudes)) if magnitudes.size else 0.0
        coeffs = np.where(magnitudes >= rel_floor * peak, self.coeffs, 0.0)
        trimmed = FourierSeries(coeffs, tail=self.tail)
        return trimmed.resized(trimmed.band)

    def strip_trimmed(self, scale: Optional[float] = None, noise_floor: float = 1e-13,
                      roundoff: float = 1e-16) -> "FourierSeries":
        """Cut the series where its fitted decay envelope C*exp(-2*pi*h*k) meets round-off.

        Use before evaluating at x + i*delta: modes past the cut are FFT noise and
        grow like exp(2*pi*|k|*delta) off the real axis. ``scale`` defaults to the
        l1 norm; matrix entries share the scale of the largest entry. The cut never
        falls below the last mode above noise_floor * scale.
        """
        scale = self.l1_norm() if scale is None else float(scale)
        n = self.n_modes
        if n == 0 or scale <= 0.0:
            return self.resized(0)
        envelope = np.maximum(np.abs(self.coeffs[n + 1:]), np.abs(self.coeffs[n - 1::-1]))
        k = np.arange(1, n + 1)
        keep = envelope > noise_floor * scale
        if not keep.any():
            return self.resized(0)
        last = int(k[keep][-1])
        cut = last
        if np.count_nonzero(keep) >= 2:
            slope, intercept = np.polyfit(k[keep].astype(float), np.log(envelope[keep]), 1)
            if slope < 0.0:
                reach = (np.log(roundoff * scale) - intercept) / slope
                cut = int(min(max(np.floor(reach), last), n))
        return self.resized(cut)

    def __add__(self, other: Union["FourierSeries", float]) -> "FourierSeries":
        if isinstance(other, FourierSeries):
            n = max(self.n_modes, other.n_modes)
            return FourierSeries(self.resized(n).coeffs + other.resized(n).coeffs,
                                 tail=self.tail + other.tail)
        coeffs = np.array(self.coeffs)
        coeffs[self.n_modes] += float(other)
        return FourierSeries(coeffs, tail=self.tail)

    __radd__ = __add__

    def __neg__(self) -> "FourierSeries":
        return FourierSeries(-self.coeffs, tail=self.tail)

    def __sub__(self, other: Union["FourierSeries", float]) -> "FourierSeries":
        return self + (-other)

    def __rsub__(self, other: float) -> "FourierSeries":
        return (-self) + other

    def __mul__(self, scalar: float) -> "FourierSeries":
        return FourierSeries(self.coeffs * float(scalar), tail=self.tail * abs(float(scalar)))

    __rmul__ = __mul__

    # -------------------------------------------------------------------- JSON

    def to_dict(self) -> Dict[str, Any]:
        return {
            "re": [float(v) for v in self.coeffs.real],
            "im": [float(v) for v in self.coeffs.imag],
            "n_modes": self.n_modes,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FourierSeries":
        try:
            re = np.asarray(data["re"], dtype=float)
            im = np.asarray(data["im"], dtype=float)
            n_modes = int(data["n_modes"])
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidArgument(f"Malformed Fourier series: {e}")
        if re.size != 2 * n_modes + 1 or im.size != re.size:
            raise InvalidArgument(
                f"Fourier series declares {n_modes} modes but stores {re.size} real and {im.size} imaginary parts"
            )
        series = cls(re + 1j * im)
        if series.hermitian_defect() > 1e-14:
            raise InvalidArgument(
                f"Fourier series is not Hermitian (defect {series.hermitian_defect():.2e}); it must describe a real function"
            )
        return series


@dataclass(frozen=True, eq=False)
class OffsetSeries:
    """A mean plus a zero-mean series (used for gamma and the potential V)."""

    mean: float
    series: FourierSeries

    def __post_init__(self):
        if self.series.mean != 0.0:
            object.__setattr__(self, "mean", self.mean + self.series.mean)
            object.__setattr__(self, "series", self.series.zero_mean())

    @classmethod
    def split(cls, series: FourierSeries) -> "OffsetSeries":
        return cls(series.mean, series.zero_mean())

    @property
    def n_modes(self) -> int:
        return self.series.n_modes

    def evaluate(self, x, delta: float = 0.0) -> np.ndarray:
        return self.mean + self.series.evaluate(x, delta)

    def __call__(self, x):
        return self.mean + self.series(x)

    def derivative(self) -> FourierSeries:
        return self.series.derivative()

    def as_series(self) -> FourierSeries:
        return self.series + self.mean

    def to_dict(self) -> Dict[str, Any]:
        return {"mean": float(self.mean), "series": self.series.to_dict()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "OffsetSeries":
        try:
            return cls(float(data["mean"]), FourierSeries.from_dict(data["series"]))
        except (KeyError, TypeError) as e:
            raise InvalidArgument(f"Malformed mean-plus-series entry: {e}")
