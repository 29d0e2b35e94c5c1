"""Time observables for quantum scattering.

Partial-wave scattering amplitudes and their energy/angle phase derivatives
(angular time delay and transverse space shift), hard-sphere and point
reference dynamics, one-dimensional transfer-matrix scattering, Kijowski
arrival-time distributions, and semiclassical (WKB) cross checks.

Natural units with hbar = 1 everywhere.  Default convention: mass and sphere
radius equal to one, so times are quoted in units of m*R^2 and lengths in R.
"""

from scatdelay.kinematics import Kinematics, UnitSystem, central_derivative, energy_from_k
from scatdelay.partialwave import (
    AmplitudeNodeError,
    AmplitudeSample,
    DelayProfile,
    PhaseShiftModel,
    amplitude,
    angular_time_delay,
    delay_profile_scan,
    eisenbud_wigner_delay,
    find_peak,
    relative_delay,
    space_shift,
)
from scatdelay.hardsphere import HardSphere, PointScatterer, hs_delta, hs_ddelta_dE

__version__ = "0.1.0"

__all__ = [
    "Kinematics",
    "UnitSystem",
    "central_derivative",
    "energy_from_k",
    "PhaseShiftModel",
    "AmplitudeSample",
    "AmplitudeNodeError",
    "DelayProfile",
    "amplitude",
    "angular_time_delay",
    "space_shift",
    "eisenbud_wigner_delay",
    "relative_delay",
    "delay_profile_scan",
    "find_peak",
    "HardSphere",
    "PointScatterer",
    "hs_delta",
    "hs_ddelta_dE",
    "__version__",
]
