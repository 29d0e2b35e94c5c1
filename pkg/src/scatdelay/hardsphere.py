"""Hard-sphere phase shifts, classical references, and the point-scatterer limit.

The phase shift of an impenetrable sphere of radius R is
arctan(j_l(kR) / n_l(kR)) on the branch that is continuous in kR and starts
at zero, which reproduces the exact s-wave value delta_0 = -kR.  Its energy
derivative follows from the Wronskian of the Bessel pair and needs no
differencing:  d(delta)/dx = -1 / (x^2 (j_l^2 + n_l^2)).

The continuous branch is fixed by walking x upward in steps small enough
(<= 0.9 rad) that consecutive principal values can only be reconciled one
way, since |d(delta)/dx| <= 1 keeps any step change below pi/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from scatdelay.kinematics import Kinematics
from scatdelay.partialwave import PhaseShiftModel
from scatdelay.specfun import bessel_table

__all__ = [
    "HardSphere",
    "PointScatterer",
    "hs_delta",
    "hs_ddelta_dE",
    "classical_delay",
    "classical_space_shift",
    "classical_deflection",
    "continuous_delta_table",
    "slope_table",
]

_WALK_STEP = 0.9  # < pi/2, so the branch reconciliation below is unique
_WALK_ANCHOR = 0.5


def _principal(j: np.ndarray, n: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.arctan(j / n)


def _walk_grid(x_targets: np.ndarray) -> np.ndarray:
    """Strictly increasing grid from the small-x anchor through every target,
    with consecutive gaps <= _WALK_STEP."""
    pts = [min(_WALK_ANCHOR, x_targets[0])]
    for xt in x_targets:
        gap = xt - pts[-1]
        if gap > _WALK_STEP:
            extra = int(math.ceil(gap / _WALK_STEP))
            pts.extend(np.linspace(pts[-1], xt, extra + 1)[1:])
        elif gap > 0:
            pts.append(xt)
    return np.asarray(pts, dtype=float)


def continuous_delta_table(ellmax: int, x) -> np.ndarray:
    """Continuous-branch phase shifts for l = 0..ellmax over increasing x = kR.

    Shape (ellmax + 1, len(x)).  Saturated entries are exactly zero.
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if xs.size == 0:
        return np.empty((ellmax + 1, 0))
    if np.any(xs <= 0.0) or not np.all(np.isfinite(xs)):
        raise ValueError("x must be positive and finite")
    if xs.size > 1 and np.any(np.diff(xs) <= 0.0):
        raise ValueError("x must be strictly increasing")

    grid = _walk_grid(xs)
    tab = bessel_table(ellmax, grid)
    principal = _principal(tab.j, tab.n)
    # the anchor point is below pi/2 in magnitude, so its principal value is
    # already on the continuous branch; unwrap mod pi column to column
    branch = np.unwrap(principal, axis=1, period=math.pi)
    take = np.searchsorted(grid, xs)
    return branch[:, take]


@lru_cache(maxsize=128)
def _cached_delta_column(x: float, ellmax: int) -> tuple:
    return tuple(continuous_delta_table(ellmax, [x])[:, 0])


def _ell_bucket(ell: int) -> int:
    size = 8
    while size <= ell:
        size *= 2
    return size


def hs_delta(R: float, ell: int, kin: Kinematics) -> float:
    """Hard-sphere phase shift in radians, continuous in kR from 0.

    Saturated orders (l far above kR, where the irregular Bessel solution
    leaves the floating-point range) return exactly 0.
    """
    if R <= 0.0:
        raise ValueError(f"radius must be positive, got {R}")
    if ell < 0:
        raise ValueError(f"ell must be >= 0, got {ell}")
    x = kin.k * R
    return _cached_delta_column(x, _ell_bucket(ell))[ell]


def slope_table(R: float, ellmax: int, kin_mass: float, k) -> np.ndarray:
    """d(delta_l)/dE for l = 0..ellmax over a k grid, from the Wronskian.

    Shape (ellmax + 1, len(k)); saturated entries are zero.  This is the
    branch-free route: no unwrapping is involved.
    """
    ks = np.atleast_1d(np.asarray(k, dtype=float))
    xs = ks * R
    tab = bessel_table(ellmax, xs)
    # saturated entries hold clipped placeholders; the overflow in their
    # squares is discarded by the mask
    with np.errstate(over="ignore"):
        denom = xs**2 * (tab.j**2 + tab.n**2)
        slope_x = np.where(tab.saturated, 0.0, -1.0 / denom)
    return (kin_mass / ks) * R * slope_x


def hs_ddelta_dE(R: float, ell: int, kin: Kinematics) -> float:
    """Energy derivative of the hard-sphere phase shift (radians/energy)."""
    if R <= 0.0:
        raise ValueError(f"radius must be positive, got {R}")
    if ell < 0:
        raise ValueError(f"ell must be >= 0, got {ell}")
    return float(slope_table(R, ell, kin.mass, kin.k)[ell, 0])


def classical_delay(R: float, kin: Kinematics, theta: float) -> float:
    """Classical hard-sphere time delay -(m/k) 2R sin(theta/2).

    Negative: the reflected ray cuts the corner relative to a ray through
    the center of a point reference scatterer.
    """
    if not 0.0 < theta <= math.pi + 1e-12:
        raise ValueError(f"theta must lie in (0, pi], got {theta}")
    return -(kin.mass / kin.k) * 2.0 * R * math.sin(theta / 2.0)


def classical_space_shift(R: float, theta: float) -> float:
    """Classical transverse offset R cos(theta/2) of the outgoing ray."""
    if not 0.0 < theta <= math.pi + 1e-12:
        raise ValueError(f"theta must lie in (0, pi], got {theta}")
    return R * math.cos(theta / 2.0)


def classical_deflection(R: float, impact_b: float, kin: Kinematics | None = None) -> float:
    """Deflection angle of a classical ray at impact parameter b.

    pi - 2 arcsin(b/R) for b < R; rays with b >= R miss and deflect by 0.
    """
    if impact_b < 0.0:
        raise ValueError(f"impact parameter must be >= 0, got {impact_b}")
    if impact_b >= R:
        return 0.0
    return math.pi - 2.0 * math.asin(impact_b / R)


@dataclass(frozen=True)
class HardSphere(PhaseShiftModel):
    """Impenetrable sphere of radius R as a phase-shift provider."""

    radius: float = 1.0

    def __post_init__(self):
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise ValueError(f"radius must be positive and finite, got {self.radius}")

    def delta(self, ell: int, kin: Kinematics) -> float:
        return hs_delta(self.radius, ell, kin)

    def ddelta_dE(self, ell: int, kin: Kinematics) -> float:
        return hs_ddelta_dE(self.radius, ell, kin)

    def suggested_ellmax(self, kin: Kinematics) -> int:
        x = kin.k * self.radius
        return int(math.ceil(x + 10.0 * x ** (1.0 / 3.0) + 10.0))

    def phase_table(self, kin: Kinematics, ellmax: int):
        """Batch phase shifts and slopes at fixed k.

        Values here are principal (mod pi) rather than the continuous branch
        of ``delta``; every amplitude observable is invariant under that
        difference, and this path avoids the branch walk entirely.
        """
        x = kin.k * self.radius
        tab = bessel_table(ellmax, x)
        deltas = np.where(tab.saturated[:, 0], 0.0, _principal(tab.j[:, 0], tab.n[:, 0]))
        slopes = slope_table(self.radius, ellmax, kin.mass, kin.k)[:, 0]
        return deltas, slopes

    def classical_time_delay(self, kin: Kinematics, theta: float) -> float:
        return classical_delay(self.radius, kin, theta)

    def classical_space_shift(self, kin: Kinematics, theta: float) -> float:
        return classical_space_shift(self.radius, theta)


@dataclass(frozen=True)
class PointScatterer(PhaseShiftModel):
    """Reference dynamics of a scatterer of vanishing size.

    All phase shifts are identically zero, so the amplitude vanishes and the
    model contributes no delay anywhere; it encodes the R -> 0 limit exactly
    instead of approximating it with a tiny sphere.
    """

    def delta(self, ell: int, kin: Kinematics) -> float:
        return 0.0

    def ddelta_dE(self, ell: int, kin: Kinematics) -> float:
        return 0.0

    def suggested_ellmax(self, kin: Kinematics) -> int:
        return 0

    def classical_time_delay(self, kin: Kinematics, theta: float) -> float:
        return 0.0

    def classical_space_shift(self, kin: Kinematics, theta: float) -> float:
        return 0.0
