"""Kinematic conversions and numerical-derivative helpers.

Natural units with hbar = 1 throughout: E = k^2/(2m), velocities k/m, times in
units of mass * length^2.  Everything here is a pure function of its inputs
and safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "Kinematics",
    "UnitSystem",
    "energy_from_k",
    "k_from_energy",
    "default_step",
    "central_derivative",
    "unwrap_phase",
]


@dataclass(frozen=True)
class Kinematics:
    """Mass and asymptotic wavenumber of the scattered particle.

    Parameters
    ----------
    mass : float
        Particle mass, > 0.
    k : float
        Asymptotic wavenumber, > 0.  The kinetic energy is ``k**2 / (2*mass)``.
    """

    mass: float
    k: float

    def __post_init__(self) -> None:
        if not np.isfinite(self.mass) or self.mass <= 0.0:
            raise ValueError(f"mass must be positive and finite, got {self.mass}")
        if not np.isfinite(self.k) or self.k <= 0.0:
            raise ValueError(f"wavenumber must be positive and finite, got {self.k}")

    @property
    def energy(self) -> float:
        return self.k * self.k / (2.0 * self.mass)

    @property
    def velocity(self) -> float:
        return self.k / self.mass

    @classmethod
    def from_energy(cls, mass: float, energy: float) -> "Kinematics":
        if not np.isfinite(energy) or energy <= 0.0:
            raise ValueError(f"energy must be positive and finite, got {energy}")
        return cls(mass=mass, k=float(np.sqrt(2.0 * mass * energy)))

    def with_energy(self, energy: float) -> "Kinematics":
        """Same particle at a different kinetic energy."""
        return Kinematics.from_energy(self.mass, energy)


@dataclass(frozen=True)
class UnitSystem:
    """Unit convention stamp carried into CLI output headers.

    mass_unit and length_unit are the values of m and R that fix the scales;
    the default (1, 1) quotes times in m*R^2 and lengths in R.
    """

    mass_unit: float = 1.0
    length_unit: float = 1.0

    def describe(self) -> str:
        return (
            f"hbar=1, m={self.mass_unit:g}, R={self.length_unit:g}; "
            "lengths in R, times in m*R^2, energies in 1/(m*R^2)"
        )


def energy_from_k(k: float, mass: float) -> float:
    """Kinetic energy k^2/(2m) of a free particle."""
    if mass <= 0.0:
        raise ValueError(f"mass must be positive, got {mass}")
    if k < 0.0:
        raise ValueError(f"wavenumber must be non-negative, got {k}")
    return k * k / (2.0 * mass)


def k_from_energy(energy: float, mass: float) -> float:
    """Inverse of :func:`energy_from_k`."""
    if mass <= 0.0:
        raise ValueError(f"mass must be positive, got {mass}")
    if energy < 0.0:
        raise ValueError(f"energy must be non-negative, got {energy}")
    return float(np.sqrt(2.0 * mass * energy))


def default_step(x: float) -> float:
    """Finite-difference step 1e-5 * max(1, |x|), balancing truncation and roundoff."""
    return 1e-5 * max(1.0, abs(x))


def central_derivative(f: Callable[[float], float], x: float, h: float | None = None) -> float:
    """Fourth-order central difference of a scalar function.

    Uses the five-point stencil (-f(x+2h) + 8 f(x+h) - 8 f(x-h) + f(x-2h)) / (12 h);
    the O(h^4) truncation error pairs well with the default step from
    :func:`default_step`.
    """
    if h is None:
        h = default_step(x)
    if h <= 0.0:
        raise ValueError(f"step must be positive, got {h}")
    return (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)


def unwrap_phase(phases: np.ndarray) -> np.ndarray:
    """Continue a sampled phase across branch cuts.

    Adds multiples of 2*pi so that successive differences stay within
    (-pi, pi].  The input must be sampled densely enough that the true phase
    changes by less than pi between neighbours.
    """
    phases = np.asarray(phases, dtype=float)
    if phases.ndim != 1:
        raise ValueError("expected a 1-D sequence of phases")
    return np.unwrap(phases)
