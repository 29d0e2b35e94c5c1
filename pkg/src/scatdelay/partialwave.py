"""Scattering amplitude and angular time observables from partial waves.

Any provider of phase shifts (and their energy derivatives) plugs in through
`PhaseShiftModel`.  The amplitude is assembled as the truncated sum

    A(theta) = (1/k) * sum_l (2l+1) sin(d_l) e^{i d_l} P_l(cos theta),

whose terms vanish with d_l, so the truncation converges.  The angular time
delay is the energy derivative of the amplitude's complex phase and the space
shift is (-1/k) times its polar-angle derivative; both come from analytic
derivative sums, never from differencing the phase, which is unstable near
diffraction zeros.  Where |A| is numerically zero the phase derivatives are
genuinely indeterminate and the functions say so instead of returning noise.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from scatdelay.kinematics import Kinematics
from scatdelay.specfun import legendre_dtheta_table, legendre_table

__all__ = [
    "AMPLITUDE_NODE_THRESHOLD",
    "AmplitudeNodeError",
    "NoPeakError",
    "PhaseShiftModel",
    "AmplitudeSample",
    "DelayProfile",
    "PeakInfo",
    "amplitude",
    "angular_time_delay",
    "space_shift",
    "eisenbud_wigner_delay",
    "relative_delay",
    "delay_profile_scan",
    "find_peak",
    "total_cross_section",
]

# |A| below this (in base length units) counts as an amplitude zero
AMPLITUDE_NODE_THRESHOLD = 1e-13


class AmplitudeNodeError(ArithmeticError):
    """The amplitude vanishes here, so its phase derivatives are undefined."""


class NoPeakError(ValueError):
    """No interior extremum exists in the requested window."""


class PhaseShiftModel(ABC):
    """Provider of partial-wave phase shifts and their energy derivatives.

    Implementations must be stateless (or internally synchronized); scans
    call them from tight loops and are free to parallelize.
    """

    @abstractmethod
    def delta(self, ell: int, kin: Kinematics) -> float:
        """Phase shift of partial wave ``ell`` in radians."""

    @abstractmethod
    def ddelta_dE(self, ell: int, kin: Kinematics) -> float:
        """Energy derivative of the phase shift, radians per energy."""

    @abstractmethod
    def suggested_ellmax(self, kin: Kinematics) -> int:
        """Truncation order beyond which the partial-wave sum is converged."""

    def phase_table(self, kin: Kinematics, ellmax: int) -> tuple[np.ndarray, np.ndarray]:
        """Phase shifts and slopes for ell = 0..ellmax as arrays.

        The default just loops; models with a cheaper batch path override it.
        """
        deltas = np.array([self.delta(l, kin) for l in range(ellmax + 1)], dtype=float)
        slopes = np.array([self.ddelta_dE(l, kin) for l in range(ellmax + 1)], dtype=float)
        return deltas, slopes

    def classical_time_delay(self, kin: Kinematics, theta: float) -> float:
        """Classical reference delay at this angle; NaN when undefined."""
        return float("nan")

    def classical_space_shift(self, kin: Kinematics, theta: float) -> float:
        """Classical reference shift at this angle; NaN when undefined."""
        return float("nan")


@dataclass(frozen=True)
class AmplitudeSample:
    """Scattering amplitude at one angle.

    ``re``/``im`` carry length units, ``dsigma_domega`` their squared sum,
    and ``phase`` the two-argument arctangent of (im, re) in (-pi, pi].
    """

    theta: float
    re: float
    im: float
    dsigma_domega: float
    phase: float

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    @property
    def modulus(self) -> float:
        return math.hypot(self.re, self.im)


@dataclass(frozen=True)
class DelayProfile:
    """Angle scan of delay observables at fixed energy.

    Columns are aligned with ``theta``; entries at amplitude nodes hold NaN
    in ``time_delay`` and ``space_shift`` and are flagged by ``node``.
    Classical reference columns are NaN for models without one.
    """

    kinematics: Kinematics
    theta: np.ndarray
    time_delay: np.ndarray
    space_shift: np.ndarray
    dsigma_domega: np.ndarray
    classical_delay: np.ndarray
    classical_shift: np.ndarray

    @property
    def node(self) -> np.ndarray:
        return np.isnan(self.time_delay)

    def __len__(self) -> int:
        return self.theta.size


@dataclass(frozen=True)
class PeakInfo:
    """Refined extremum location: position, signed height, full width at half height."""

    theta: float
    height: float
    half_width: float

    def __iter__(self):
        yield self.theta
        yield self.height
        yield self.half_width


def _validate_theta(theta: np.ndarray) -> None:
    if theta.size == 0:
        return
    if not np.all(np.isfinite(theta)):
        raise ValueError("theta grid must be finite")
    if np.any(theta <= 0.0) or np.any(theta > math.pi + 1e-12):
        raise ValueError("theta must lie in (0, pi]; the forward direction is excluded")


def _resolve_ellmax(model: PhaseShiftModel, kin: Kinematics, ellmax) -> int:
    if ellmax is None:
        ellmax = model.suggested_ellmax(kin)
    ellmax = int(ellmax)
    if ellmax < 0:
        raise ValueError(f"ellmax must be >= 0, got {ellmax}")
    return ellmax


def _scan_arrays(model, kin, theta, ellmax):
    """Amplitude, d(amplitude)/d(theta), time delay and space shift on a grid.

    Returns (amp, t_delay, shift); nodes carry NaN in the two derivative
    columns.  All sums run as matrix products over an (ellmax+1, n) Legendre
    table.
    """
    theta = np.asarray(theta, dtype=float)
    _validate_theta(theta)
    ellmax = _resolve_ellmax(model, kin, ellmax)
    k = kin.k

    deltas, slopes = model.phase_table(kin, ellmax)
    weights = 2.0 * np.arange(ellmax + 1, dtype=float) + 1.0
    unit_phase = np.exp(1j * deltas)
    half_smatrix = np.sin(deltas) * unit_phase  # (e^{2i d} - 1) / 2i, term-wise small
    smatrix = unit_phase**2

    ptab = legendre_table(ellmax, np.cos(theta))
    dptab = legendre_dtheta_table(ellmax, theta)

    amp = (weights * half_smatrix) @ ptab / k
    damp_dtheta = (weights * half_smatrix) @ dptab / k
    # numerator/denominator of d(arg A)/dE; the denominator is 2ik A, kept in
    # its convergent sin-form rather than the bare e^{2i d} sum
    numer = 2.0 * ((weights * slopes * smatrix) @ ptab)
    denom = (2j * weights * half_smatrix) @ ptab

    node = np.abs(amp) < AMPLITUDE_NODE_THRESHOLD
    safe_amp = np.where(node, 1.0, amp)
    safe_denom = np.where(node, 1.0, denom)
    t_delay = np.where(node, np.nan, np.real(numer / safe_denom))
    shift = np.where(node, np.nan, -np.imag(damp_dtheta / safe_amp) / k)
    return amp, t_delay, shift


def amplitude(model: PhaseShiftModel, kin: Kinematics, theta: float, ellmax: int | None = None) -> AmplitudeSample:
    """Truncated partial-wave amplitude at one angle.

    Parameters
    ----------
    model, kin : the phase-shift provider and the fixed kinematics.
    theta : float
        Scattering angle in (0, pi]; 0 is rejected, the forward direction
        is not an observable of this construction.
    ellmax : int, optional
        Truncation order; defaults to ``model.suggested_ellmax(kin)``.
    """
    amp, _, _ = _scan_arrays(model, kin, [float(theta)], ellmax)
    a = complex(amp[0])
    return AmplitudeSample(
        theta=float(theta),
        re=a.real,
        im=a.imag,
        dsigma_domega=a.real**2 + a.imag**2,
        phase=math.atan2(a.imag, a.real),
    )


def angular_time_delay(model: PhaseShiftModel, kin: Kinematics, theta: float, ellmax: int | None = None) -> float:
    """Energy derivative of the amplitude phase at fixed angle.

    Computed from the analytic derivative sums; raises AmplitudeNodeError
    where the amplitude is numerically zero and the phase is indeterminate.
    """
    _, t_delay, _ = _scan_arrays(model, kin, [float(theta)], ellmax)
    out = float(t_delay[0])
    if math.isnan(out):
        raise AmplitudeNodeError(f"indeterminate at amplitude node (theta = {theta})")
    return out


def space_shift(model: PhaseShiftModel, kin: Kinematics, theta: float, ellmax: int | None = None) -> float:
    """Signed transverse offset -(1/k) d(arg A)/d(theta) at fixed angle."""
    _, _, shift = _scan_arrays(model, kin, [float(theta)], ellmax)
    out = float(shift[0])
    if math.isnan(out):
        raise AmplitudeNodeError(f"indeterminate at amplitude node (theta = {theta})")
    return out


def eisenbud_wigner_delay(model: PhaseShiftModel, kin: Kinematics, ell: int) -> float:
    """Single-channel delay 2 d(delta_ell)/dE of one partial wave."""
    if ell < 0:
        raise ValueError(f"ell must be >= 0, got {ell}")
    return 2.0 * model.ddelta_dE(int(ell), kin)


def relative_delay(model: PhaseShiftModel, kin: Kinematics, theta: float, theta0: float, ellmax: int | None = None) -> float:
    """Delay of the detector at ``theta`` relative to one at ``theta0``."""
    return angular_time_delay(model, kin, theta, ellmax) - angular_time_delay(model, kin, theta0, ellmax)


def delay_profile_scan(model: PhaseShiftModel, kin: Kinematics, theta_grid, ellmax: int | None = None) -> DelayProfile:
    """Delay, shift, cross section and classical references over an angle grid.

    The grid must be strictly increasing within (0, pi].  Amplitude nodes are
    reported as NaN rows (see ``DelayProfile.node``) rather than interpolated.
    """
    theta = np.asarray(theta_grid, dtype=float)
    if theta.ndim != 1:
        raise ValueError("theta_grid must be 1-D")
    if theta.size and np.any(np.diff(theta) <= 0.0):
        raise ValueError("theta_grid must be strictly increasing")
    if theta.size == 0:
        empty = np.empty(0)
        return DelayProfile(kin, theta, empty, empty.copy(), empty.copy(), empty.copy(), empty.copy())

    amp, t_delay, shift = _scan_arrays(model, kin, theta, ellmax)
    dsigma = np.abs(amp) ** 2
    t_class = np.array([model.classical_time_delay(kin, th) for th in theta])
    b_class = np.array([model.classical_space_shift(kin, th) for th in theta])
    return DelayProfile(
        kinematics=kin,
        theta=theta,
        time_delay=t_delay,
        space_shift=shift,
        dsigma_domega=dsigma,
        classical_delay=t_class,
        classical_shift=b_class,
    )


def total_cross_section(model: PhaseShiftModel, kin: Kinematics, ellmax: int | None = None) -> float:
    """4 pi / k^2 sum (2l+1) sin^2(delta_l), truncated like the amplitude."""
    ellmax = _resolve_ellmax(model, kin, ellmax)
    deltas, _ = model.phase_table(kin, ellmax)
    weights = 2.0 * np.arange(ellmax + 1, dtype=float) + 1.0
    return float(4.0 * math.pi / kin.k**2 * np.sum(weights * np.sin(deltas) ** 2))


_PEAK_COLUMNS = {
    "t_delay": "time_delay",
    "b": "space_shift",
    "dsigma_dOmega": "dsigma_domega",
}


def _parabolic_vertex(x3, y3):
    # quadratic through three points; fall back to the middle sample when flat
    coef = np.polyfit(x3, y3, 2)
    if coef[0] == 0.0:
        return float(x3[1]), float(y3[1])
    xv = -coef[1] / (2.0 * coef[0])
    if not x3[0] <= xv <= x3[2]:
        return float(x3[1]), float(y3[1])
    return float(xv), float(np.polyval(coef, xv))


def find_peak(profile: DelayProfile, column: str, theta_window) -> PeakInfo:
    """Locate the dominant extremum of one profile column inside a window.

    The extremum is the sample of largest magnitude, refined by a parabola
    through its three bracketing grid points.  ``half_width`` is the full
    width at half the peak height measured against a zero baseline, found by
    linear interpolation outward from the peak (NaN when a flank never drops
    that far).  Raises NoPeakError when the window holds no interior extremum.
    """
    try:
        y = getattr(profile, _PEAK_COLUMNS[column])
    except KeyError:
        raise ValueError(f"unknown column {column!r}; expected one of {sorted(_PEAK_COLUMNS)}")
    x = profile.theta
    lo, hi = float(theta_window[0]), float(theta_window[1])
    inside = (x >= lo) & (x <= hi) & np.isfinite(y)
    idx = np.nonzero(inside)[0]
    if idx.size < 3:
        raise NoPeakError("no peak found: window holds fewer than three usable points")

    pick = idx[np.argmax(np.abs(y[idx]))]
    if pick == idx[0] or pick == idx[-1]:
        raise NoPeakError("no peak found: extremum sits on the window edge")
    if not (np.isfinite(y[pick - 1]) and np.isfinite(y[pick + 1])):
        raise NoPeakError("no peak found: extremum borders a flagged node")
    sign = 1.0 if y[pick] >= 0.0 else -1.0
    if y[pick - 1] * sign > y[pick] * sign or y[pick + 1] * sign > y[pick] * sign:
        raise NoPeakError("no peak found: window is monotone at its largest sample")

    theta_star, height = _parabolic_vertex(x[pick - 1 : pick + 2], y[pick - 1 : pick + 2])

    level = height / 2.0
    left = np.nan
    for i in range(pick, 0, -1):
        ya, yb = y[i - 1], y[i]
        if not (np.isfinite(ya) and np.isfinite(yb)):
            break
        if ya * sign <= level * sign <= yb * sign:
            left = x[i - 1] + (x[i] - x[i - 1]) * (level - ya) / (yb - ya)
            break
    right = np.nan
    for i in range(pick, x.size - 1):
        ya, yb = y[i], y[i + 1]
        if not (np.isfinite(ya) and np.isfinite(yb)):
            break
        if yb * sign <= level * sign <= ya * sign:
            right = x[i] + (x[i + 1] - x[i]) * (level - ya) / (yb - ya)
            break
    width = right - left if np.isfinite(left) and np.isfinite(right) else float("nan")
    return PeakInfo(theta=theta_star, height=height, half_width=width)
