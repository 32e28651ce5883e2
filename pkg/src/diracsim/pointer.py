"""One-dimensional Gaussian measurement pointer on a uniform grid.

Units: hbar = 1 throughout.  The initial wavefunction exp(-x^2 / 4 sigma^2)
has position variance sigma^2 and momentum variance 1/(4 sigma^2).  Momentum
operations are spectral (FFT), so displacements are exactly unitary on the
grid and the momentum quadrature needs no finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidDimensionError, NotNormalizedError

NORM_ATOL = 1e-10
MIN_EXTENT_SIGMAS = 10.0


@dataclass(frozen=True, eq=False)
class PointerState:
    """Discretized pointer wavefunction with its grid geometry."""

    amplitudes: np.ndarray
    grid_spacing: float
    sigma: float

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 1 or amps.size < 8:
            raise InvalidDimensionError("pointer needs a 1-d grid of at least 8 points")
        if self.grid_spacing <= 0 or self.sigma <= 0:
            raise ValueError("grid_spacing and sigma must be positive")
        norm = float(np.sum(np.abs(amps) ** 2) * self.grid_spacing)
        if abs(norm - 1.0) > NORM_ATOL:
            raise NotNormalizedError(
                f"pointer norm {norm!r} must be 1 within {NORM_ATOL}"
            )
        m = amps.shape[0]
        extent = (m // 2) * self.grid_spacing
        if extent < MIN_EXTENT_SIGMAS * self.sigma:
            raise ValueError(
                f"grid extent {extent:.3g} below {MIN_EXTENT_SIGMAS} sigma; "
                "truncated tail mass would corrupt moments"
            )
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def grid_points(self) -> int:
        return self.amplitudes.shape[0]

    def positions(self) -> np.ndarray:
        m = self.grid_points
        return (np.arange(m) - m // 2) * self.grid_spacing

    def momenta(self) -> np.ndarray:
        """Angular momentum grid in FFT ordering."""
        return 2.0 * np.pi * np.fft.fftfreq(self.grid_points, d=self.grid_spacing)


def gaussian_pointer(
    sigma: float = 1.0, grid_points: int = 512, extent_sigmas: float = 12.0
) -> PointerState:
    """Initial Gaussian pointer, grid-normalized, spanning +-extent_sigmas."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if extent_sigmas < MIN_EXTENT_SIGMAS:
        raise ValueError(f"extent must be at least {MIN_EXTENT_SIGMAS} sigma")
    dx = 2.0 * extent_sigmas * sigma / grid_points
    x = (np.arange(grid_points) - grid_points // 2) * dx
    amps = np.exp(-(x**2) / (4.0 * sigma**2)).astype(np.complex128)
    amps /= np.sqrt(np.sum(np.abs(amps) ** 2) * dx)
    return PointerState(amps, dx, sigma)


def displace(amplitudes: np.ndarray, grid_spacing: float, shift: float) -> np.ndarray:
    """Translate a grid wavefunction by ``shift`` via its momentum spectrum."""
    m = amplitudes.shape[0]
    p = 2.0 * np.pi * np.fft.fftfreq(m, d=grid_spacing)
    return np.fft.ifft(np.fft.fft(amplitudes) * np.exp(-1j * p * shift))


def position_density(amplitudes: np.ndarray, grid_spacing: float) -> np.ndarray:
    """Probability mass on each grid point (sums to the state norm)."""
    return np.abs(amplitudes) ** 2 * grid_spacing


def momentum_density(amplitudes: np.ndarray, grid_spacing: float) -> np.ndarray:
    """Probability mass on each momentum grid point, FFT ordering."""
    m = amplitudes.shape[0]
    return np.abs(np.fft.fft(amplitudes)) ** 2 * grid_spacing / m


def pointer_moments(pointer: PointerState) -> tuple[float, float]:
    """(<x>, <p>) of a pointer state."""
    x = pointer.positions()
    p = pointer.momenta()
    px = position_density(pointer.amplitudes, pointer.grid_spacing)
    pp = momentum_density(pointer.amplitudes, pointer.grid_spacing)
    return float(np.sum(x * px)), float(np.sum(p * pp))
