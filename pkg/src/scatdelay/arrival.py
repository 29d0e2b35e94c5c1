"""Occurrence-time statistics of wave packets at a thin detector.

The central object is a packet specified by its energy-representation
amplitudes psi(E).  The arrival-time density is the squared modulus of the
Fourier transform of psi, and expectation values of occurrence-time
observables reduce to one-dimensional quadratures over the energy grid, with
kernels t_P(E) supplied by the scattering modules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .kinematics import Kinematics

ENDPOINT_FRACTION = 1e-12
NORMALIZATION_TOL = 1e-6
HERMITICITY_TOL = 1e-6
COVERAGE_THRESHOLD = 0.999

# time-kernel matrices for ~4k x 4k grids are built in blocks of this many
# time points to cap the working set
_TIME_BLOCK = 256


class HermiticityError(ArithmeticError):
    """A formally real expectation value came out with a large imaginary part."""


@dataclass(frozen=True)
class SpectralPacket:
    """Wave packet given by complex amplitudes on a strictly increasing E-grid.

    The amplitudes must be unit-normalized under the trapezoid rule and must
    have decayed to at most 1e-12 of their peak magnitude at both grid ends,
    so that the packet is fully contained in the sampled window.
    """

    energy_grid: np.ndarray
    psi: np.ndarray

    def __init__(self, energy_grid, psi) -> None:
        grid = np.asarray(energy_grid, dtype=float)
        amps = np.asarray(psi, dtype=complex)
        if grid.ndim != 1 or grid.size < 8:
            raise ValueError("energy grid must be 1-D with at least 8 points")
        if amps.shape != grid.shape:
            raise ValueError("psi must have the same shape as the energy grid")
        if not np.all(np.diff(grid) > 0.0):
            raise ValueError("energy grid must be strictly increasing")
        norm = np.trapezoid(np.abs(amps) ** 2, grid)
        if abs(norm - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"packet norm deviates from 1 by {norm - 1.0:.3e}")
        peak = float(np.max(np.abs(amps)))
        edge = max(abs(amps[0]), abs(amps[-1]))
        if edge > ENDPOINT_FRACTION * peak:
            raise ValueError(
                "amplitudes must vanish at the grid ends "
                f"(edge/peak = {edge / peak:.3e})"
            )
        object.__setattr__(self, "energy_grid", grid)
        object.__setattr__(self, "psi", amps)

    def __len__(self) -> int:
        return self.energy_grid.size

    @property
    def weight(self) -> np.ndarray:
        """|psi|^2, the spectral probability density."""
        return np.abs(self.psi) ** 2


@dataclass(frozen=True)
class ArrivalDistribution:
    """Arrival-time density on a time grid, with its first two moments.

    `coverage_warning` is set when the grid captures less than 99.9% of the
    probability mass; the moments are then normalized to the captured mass
    but should be treated as approximate.
    """

    t_grid: np.ndarray
    density: np.ndarray
    mean: float
    variance: float
    mass: float
    coverage_warning: bool = field(default=False)

    def __len__(self) -> int:
        return self.t_grid.size


def kijowski_density(packet: SpectralPacket, t_grid) -> ArrivalDistribution:
    """Arrival-time density (1/2pi)|integral psi(E) e^{-iEt} dE|^2.

    The oscillatory E-integral is evaluated by the trapezoid rule per time
    point; moments are trapezoidal over the time grid and normalized to the
    captured mass.
    """
    times = np.asarray(t_grid, dtype=float)
    if times.ndim != 1 or times.size < 2:
        raise ValueError("t_grid must be 1-D with at least 2 points")
    if not np.all(np.diff(times) > 0.0):
        raise ValueError("t_grid must be strictly increasing")

    grid = packet.energy_grid
    # trapezoid weights: half at the ends, uniform step assumed not required
    dgrid = np.diff(grid)
    w = np.zeros_like(grid)
    w[:-1] += 0.5 * dgrid
    w[1:] += 0.5 * dgrid
    weighted = packet.psi * w

    density = np.empty_like(times)
    for start in range(0, times.size, _TIME_BLOCK):
        block = times[start : start + _TIME_BLOCK]
        phases = np.exp(-1j * np.outer(block, grid))
        amp = phases @ weighted
        density[start : start + block.size] = np.abs(amp) ** 2
    density /= 2.0 * math.pi
    density = np.maximum(density, 0.0)

    mass = float(np.trapezoid(density, times))
    warn = mass < COVERAGE_THRESHOLD
    if mass > 0.0:
        mean = float(np.trapezoid(times * density, times) / mass)
        variance = float(np.trapezoid((times - mean) ** 2 * density, times) / mass)
    else:
        mean = math.nan
        variance = math.nan
    return ArrivalDistribution(
        t_grid=times,
        density=density,
        mean=mean,
        variance=variance,
        mass=mass,
        coverage_warning=warn,
    )


def gaussian_packet(
    E0: float,
    sigma_E: float,
    mass: float = 1.0,
    detector_distance: float = 0.0,
    n_points: int = 4096,
) -> SpectralPacket:
    """Gaussian spectral packet, optionally carrying a detector phase.

    |psi(E)|^2 is a normal density with mean E0 and standard deviation
    sigma_E, sampled on [E0 - 12 sigma, E0 + 12 sigma] so the end values sit
    below the packet's endpoint tolerance.  A detector at distance D from the
    source contributes the phase e^{i k(E) D}, which moves the arrival mean
    to the free flight time m D / k0.
    """
    if sigma_E <= 0.0:
        raise ValueError(f"sigma_E must be > 0, got {sigma_E}")
    if E0 - 12.0 * sigma_E <= 0.0:
        raise ValueError(
            "packet window extends to E <= 0; need E0 > 12 sigma_E "
            f"(got E0 = {E0}, sigma_E = {sigma_E})"
        )
    if n_points < 64:
        raise ValueError("n_points must be at least 64")
    grid = np.linspace(E0 - 12.0 * sigma_E, E0 + 12.0 * sigma_E, int(n_points))
    amp = np.exp(-((grid - E0) ** 2) / (4.0 * sigma_E**2)).astype(complex)
    if detector_distance != 0.0:
        k = np.sqrt(2.0 * mass * grid)
        amp = amp * np.exp(1j * k * detector_distance)
    amp /= math.sqrt(np.trapezoid(np.abs(amp) ** 2, grid))
    return SpectralPacket(grid, amp)


def _kernel_on_grid(tP, grid: np.ndarray) -> np.ndarray:
    try:
        values = np.asarray(tP(grid), dtype=float)
        if values.shape == grid.shape:
            return values
    except (TypeError, ValueError):
        pass
    return np.array([float(tP(e)) for e in grid])


def occurrence_mean_with_kernel(packet: SpectralPacket, tP) -> float:
    """Mean occurrence time for a detector with energy kernel tP(E).

    Evaluates the phase-gradient term integral conj(psi) (-i dpsi/dE) dE by
    centered differencing plus the kernel quadrature integral |psi|^2 tP dE.
    The result is formally real; a residual imaginary part above tolerance
    signals a packet too coarse for the differencing and raises.
    """
    grid = packet.energy_grid
    dpsi = np.gradient(packet.psi, grid, edge_order=2)
    gradient_term = np.trapezoid(np.conj(packet.psi) * (-1j) * dpsi, grid)
    kernel_term = np.trapezoid(packet.weight * _kernel_on_grid(tP, grid), grid)
    total = gradient_term + kernel_term
    if abs(total.imag) > HERMITICITY_TOL:
        raise HermiticityError(
            f"occurrence mean has imaginary part {total.imag:.3e}"
        )
    return float(total.real)


def delay_between_dynamics(packet: SpectralPacket, tP_with, tP_free) -> float:
    """Mean time delay between two dynamics probed with the same packet.

    The phase-gradient terms of the two occurrence means cancel identically
    for a shared packet, leaving the spectral average of the kernel
    difference.
    """
    grid = packet.energy_grid
    diff = _kernel_on_grid(tP_with, grid) - _kernel_on_grid(tP_free, grid)
    return float(np.trapezoid(packet.weight * diff, grid))


def free_flight_kernel(kin_mass: float, detector_distance: float):
    """Kernel t_P(E) = m D / k(E) of free flight to a detector at distance D."""

    def kernel(E):
        e = np.asarray(E, dtype=float)
        return kin_mass * detector_distance / np.sqrt(2.0 * kin_mass * e)

    return kernel
