"""Semiclassical phase shifts, deflection function, and stationary-phase
time observables for radial potentials.

Phase shifts use the half-integer angular momentum J = ell + 1/2 in the
centrifugal term.  The phase integral runs from the outermost classical
turning point; the endpoint square-root singularity is removed by the
substitution r = r0 cosh(u), and the free part of the integral beyond the
potential's range is attached in closed form.  A hard-wall turning point
carries an extra -pi/4 relative to a smooth one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .kinematics import Kinematics

TURNING_POINT_RTOL = 1e-12
_QUAD_LIMIT = 200
_BRACKET_POINTS = 4096
_BRANCH_SCAN_POINTS = 256


class TurningPointError(ArithmeticError):
    """No classical turning point could be bracketed."""


class QuadratureError(ArithmeticError):
    """The adaptive phase-integral quadrature failed to converge."""


class MultiBranchError(ValueError):
    """The scattering angle maps to zero or several angular momenta.

    `branches` lists the (J, sign, Theta) triples found; stationary-phase
    observables are only defined when exactly one branch contributes.
    """

    def __init__(self, message: str, branches):
        super().__init__(message)
        self.branches = list(branches)


@dataclass(frozen=True)
class RadialPotential:
    """Short-range central potential, optionally with a hard core.

    `v` is the potential energy as a function of radius; it must vanish for
    r >= range_radius.  Inside core_radius the potential is treated as an
    impenetrable wall.
    """

    v: Callable[[float], float]
    range_radius: float
    core_radius: float = 0.0

    def __post_init__(self) -> None:
        if self.range_radius < 0.0:
            raise ValueError(f"range_radius must be >= 0, got {self.range_radius}")
        if self.core_radius < 0.0:
            raise ValueError(f"core_radius must be >= 0, got {self.core_radius}")
        if self.core_radius > self.range_radius:
            raise ValueError("core_radius cannot exceed range_radius")


def hard_core(radius: float) -> RadialPotential:
    """Impenetrable sphere of the given radius, free outside."""
    if radius <= 0.0:
        raise ValueError(f"radius must be > 0, got {radius}")
    return RadialPotential(v=lambda r: 0.0, range_radius=radius, core_radius=radius)


def free_potential() -> RadialPotential:
    """No interaction at all."""
    return RadialPotential(v=lambda r: 0.0, range_radius=0.0, core_radius=0.0)


@dataclass(frozen=True)
class WkbResult:
    """Semiclassical phase-shift bundle at one angular momentum."""

    J: float
    r0: float
    delta_wkb: float
    ddelta_dE: float
    Theta: float


def _w_of_r(pot: RadialPotential, kin: Kinematics, J: float, r: float) -> float:
    # squared radial momentum 2m(E - V) - J^2/r^2
    w = 2.0 * kin.mass * (kin.energy - pot.v(r))
    if J != 0.0:
        w -= (J / r) ** 2
    return w


def turning_point(pot: RadialPotential, kin: Kinematics, J: float) -> float:
    """Outermost radius where the radial momentum vanishes.

    For a hard-core potential the result is never below the core radius;
    when the centrifugal root lies inside the core, the wall itself is the
    turning point.
    """
    if kin.energy <= 0.0:
        raise ValueError("turning point requires E > 0")
    if J < 0.0:
        raise ValueError(f"angular momentum must be >= 0, got {J}")
    k = kin.k
    r_free = J / k
    if r_free >= pot.range_radius:
        # the root sits in the free zone where it is algebraic
        return max(pot.core_radius, r_free)

    lo = pot.core_radius
    if lo == 0.0:
        lo = min(1e-9, 1e-9 * pot.range_radius)
    rs = np.linspace(lo, pot.range_radius, _BRACKET_POINTS)
    ws = np.array([_w_of_r(pot, kin, J, r) for r in rs])
    crossings = np.nonzero((ws[:-1] <= 0.0) & (ws[1:] > 0.0))[0]
    if crossings.size == 0:
        if ws[0] > 0.0 and pot.core_radius > 0.0:
            return pot.core_radius
        if ws[0] > 0.0 and J == 0.0:
            # no centrifugal barrier and no classically forbidden region:
            # the phase integral starts at the origin
            return 0.0
        raise TurningPointError(
            f"no turning point bracketed for J = {J}, E = {kin.energy}"
        )
    i = crossings[-1]
    root = brentq(
        lambda r: _w_of_r(pot, kin, J, r),
        rs[i],
        rs[i + 1],
        rtol=TURNING_POINT_RTOL,
    )
    return max(pot.core_radius, float(root))


def _quad_checked(fun, a: float, b: float, label: str) -> float:
    value, abserr = quad(fun, a, b, limit=_QUAD_LIMIT, epsabs=1e-12, epsrel=1e-11)
    if abserr > 1e-7 * (1.0 + abs(value)):
        raise QuadratureError(
            f"{label} integral did not converge: value {value:.6e}, "
            f"error estimate {abserr:.3e}"
        )
    return value


def _is_wall(pot: RadialPotential, kin: Kinematics, J: float, r0: float) -> bool:
    if pot.core_radius <= 0.0:
        return False
    if r0 > pot.core_radius * (1.0 + 1e-12):
        return False
    return _w_of_r(pot, kin, J, pot.core_radius) > 0.0


def _phase_shift_at(pot: RadialPotential, kin: Kinematics, J: float):
    """(r0, delta) for real J >= 0."""
    k = kin.k
    r0 = turning_point(pot, kin, J)
    rc = max(pot.range_radius, r0)

    # closed-form free contribution of [rc, infinity)
    if J == 0.0:
        tail = 0.0
    else:
        krc = k * rc
        radial = math.sqrt(max(0.0, krc * krc - J * J))
        f_rc = radial - J * math.acos(min(1.0, J / krc)) - krc
        tail = -0.5 * math.pi * J - f_rc

    if r0 == 0.0:
        # J = 0 continuation: the integrand is regular down to the origin,
        # so no endpoint substitution is needed

        def integrand_r(r: float) -> float:
            w = _w_of_r(pot, kin, J, r)
            return math.sqrt(w) - k if w > 0.0 else -k

        interior = _quad_checked(integrand_r, 0.0, rc, "phase")
    elif rc > r0 * (1.0 + 1e-14):
        uc = math.acosh(rc / r0)

        def integrand(u: float) -> float:
            r = r0 * math.cosh(u)
            w = _w_of_r(pot, kin, J, r)
            if w <= 0.0:
                return 0.0
            return (math.sqrt(w) - k) * r0 * math.sinh(u)

        interior = _quad_checked(integrand, 0.0, uc, "phase")
    else:
        interior = 0.0

    delta = 0.5 * math.pi * J + interior + tail - k * r0
    if _is_wall(pot, kin, J, r0):
        delta -= 0.25 * math.pi
    return r0, delta


def _energy_slope_at(pot: RadialPotential, kin: Kinematics, J: float) -> float:
    """d(delta)/dE at real J, as the radial traversal-time difference."""
    k = kin.k
    m = kin.mass
    r0 = turning_point(pot, kin, J)
    rc = max(pot.range_radius, r0)

    b = J / k
    tail = (m / k) * (rc - math.sqrt(max(0.0, rc * rc - b * b)))

    if r0 == 0.0:

        def integrand_r(r: float) -> float:
            w = _w_of_r(pot, kin, J, r)
            return m / math.sqrt(w) - m / k if w > 0.0 else -m / k

        interior = _quad_checked(integrand_r, 0.0, rc, "delay")
    elif rc > r0 * (1.0 + 1e-14):
        uc = math.acosh(rc / r0)

        def integrand(u: float) -> float:
            r = r0 * math.cosh(u)
            w = _w_of_r(pot, kin, J, r)
            if w <= 0.0:
                return 0.0
            return (m / math.sqrt(w) - m / k) * r0 * math.sinh(u)

        interior = _quad_checked(integrand, 0.0, uc, "delay")
    else:
        interior = 0.0

    return -(m / k) * r0 + interior + tail


def wkb_phase_shift(pot: RadialPotential, kin: Kinematics, ell: int) -> WkbResult:
    """Semiclassical phase shift and its observables at integer ell."""
    if ell < 0:
        raise ValueError(f"ell must be >= 0, got {ell}")
    J = ell + 0.5
    r0, delta = _phase_shift_at(pot, kin, J)
    slope = _energy_slope_at(pot, kin, J)
    theta = deflection_function(pot, kin, J)
    return WkbResult(J=J, r0=r0, delta_wkb=delta, ddelta_dE=slope, Theta=theta)


def phase_shift_value(pot: RadialPotential, kin: Kinematics, J: float) -> float:
    """Semiclassical phase shift at real (not necessarily half-integer) J."""
    _, delta = _phase_shift_at(pot, kin, J)
    return delta


def phase_shift_energy_slope(pot: RadialPotential, kin: Kinematics, J: float) -> float:
    """d(delta)/dE of the semiclassical phase shift at real J."""
    return _energy_slope_at(pot, kin, J)


def deflection_function(pot: RadialPotential, kin: Kinematics, J: float) -> float:
    """Continuous classical deflection angle Theta(J).

    Computed as twice the centered J-derivative of the semiclassical phase
    shift with half-unit step, so both evaluations land on physical
    half-integer angular momenta when J itself is one.
    """
    if J < 0.5:
        raise ValueError(f"deflection needs J >= 0.5, got {J}")
    _, d_plus = _phase_shift_at(pot, kin, J + 0.5)
    _, d_minus = _phase_shift_at(pot, kin, J - 0.5)
    return 2.0 * (d_plus - d_minus)


def _wrap_pi(x: float) -> float:
    return math.remainder(x, 2.0 * math.pi)


def stationary_branches(pot: RadialPotential, kin: Kinematics, theta: float):
    """All J where theta equals +/-Theta(J) mod 2pi, with the matched sign.

    Returns a list of (J, sign, Theta) triples, one per contributing
    semiclassical branch.  The single-branch observables below require the
    list to have exactly one entry.
    """
    if not 0.0 < theta < math.pi:
        raise ValueError(f"scattering angle must lie in (0, pi), got {theta}")
    k = kin.k
    j_hi = k * max(pot.range_radius, pot.core_radius) + 1.0
    j_lo = 0.5
    if j_hi <= j_lo + 1.0:
        j_hi = j_lo + 2.0
    grid = np.linspace(j_lo, j_hi, _BRANCH_SCAN_POINTS)
    thetas = np.array([deflection_function(pot, kin, j) for j in grid])

    if np.any(thetas < -math.pi):
        worst = float(np.min(thetas))
        raise MultiBranchError(
            f"deflection winds below -pi (min Theta = {worst:.3f}); "
            "orbiting branches are not resolved",
            [],
        )

    # the hard-wall turning point makes delta jump by pi/4 at J = k R_core,
    # so the J-difference behind Theta is invalid within half a unit of that
    # edge; candidates there belong to the diffractive zone, not to a branch
    spacing = grid[1] - grid[0]
    wall_edge = k * pot.core_radius if pot.core_radius > 0.0 else None

    branches = []
    for sign in (+1.0, -1.0):
        g = np.array([_wrap_pi(t - sign * theta) for t in thetas])
        flips = np.nonzero(np.sign(g[:-1]) * np.sign(g[1:]) < 0.0)[0]
        for i in flips:
            # reject wrap-around jumps masquerading as roots
            if abs(g[i + 1] - g[i]) > math.pi:
                continue
            j_star = brentq(
                lambda j: _wrap_pi(deflection_function(pot, kin, j) - sign * theta),
                grid[i],
                grid[i + 1],
                rtol=1e-10,
            )
            theta_at = deflection_function(pot, kin, j_star)
            if abs(_wrap_pi(theta_at - sign * theta)) > 1e-6:
                # bracketed a discontinuity of Theta, not a root
                continue
            if wall_edge is not None and abs(j_star - wall_edge) < 0.5 + 2.0 * spacing:
                continue
            branches.append((float(j_star), sign, theta_at))
    return branches


def _single_branch(pot, kin, theta):
    branches = stationary_branches(pot, kin, theta)
    if len(branches) != 1:
        listing = ", ".join(
            f"(J = {j:.6f}, sign {s:+.0f}, Theta = {t:.6f})" for j, s, t in branches
        )
        raise MultiBranchError(
            f"need exactly one stationary angular momentum at theta = {theta}, "
            f"found {len(branches)}: [{listing}]",
            branches,
        )
    return branches[0]


def semiclassical_delay(pot: RadialPotential, kin: Kinematics, theta: float) -> float:
    """Stationary-phase time delay 2 d(delta)/dE at the matching J."""
    j_star, _, _ = _single_branch(pot, kin, theta)
    return 2.0 * _energy_slope_at(pot, kin, j_star)


def semiclassical_space_shift(pot: RadialPotential, kin: Kinematics, theta: float) -> float:
    """Signed impact parameter +/- J*/k of the single contributing branch."""
    j_star, sign, _ = _single_branch(pot, kin, theta)
    return sign * j_star / kin.k
