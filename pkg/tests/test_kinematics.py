import math

import numpy as np
import pytest

from scatdelay.kinematics import (
    Kinematics,
    UnitSystem,
    central_derivative,
    default_step,
    energy_from_k,
    k_from_energy,
    unwrap_phase,
)


def test_energy_velocity_roundtrip():
    kin = Kinematics(mass=2.0, k=3.0)
    assert kin.energy == pytest.approx(9.0 / 4.0, rel=1e-15)
    assert kin.velocity == pytest.approx(1.5, rel=1e-15)
    again = Kinematics.from_energy(2.0, kin.energy)
    assert again.k == pytest.approx(3.0, rel=1e-14)


def test_with_energy_keeps_mass():
    kin = Kinematics(mass=0.5, k=1.0).with_energy(8.0)
    assert kin.mass == 0.5
    assert kin.energy == pytest.approx(8.0, rel=1e-14)


def test_energy_k_helpers_match():
    for k in (0.01, 1.0, 42.0):
        e = energy_from_k(k, mass=1.5)
        assert k_from_energy(e, mass=1.5) == pytest.approx(k, rel=1e-14)


def test_invalid_kinematics_rejected():
    with pytest.raises(ValueError):
        Kinematics(mass=-1.0, k=1.0)
    with pytest.raises(ValueError):
        Kinematics(mass=1.0, k=0.0)
    with pytest.raises(ValueError):
        Kinematics.from_energy(1.0, -2.0)


def test_central_derivative_on_known_functions():
    # 5-point stencil should be far better than the 1e-8 target on smooth f
    assert central_derivative(math.exp, 1.3) == pytest.approx(math.exp(1.3), rel=1e-10)
    assert central_derivative(math.sin, 0.7) == pytest.approx(math.cos(0.7), rel=1e-10)
    assert central_derivative(lambda x: x**4, 2.0) == pytest.approx(32.0, rel=1e-9)


def test_default_step_scales_with_argument():
    assert default_step(0.0) == pytest.approx(1e-5)
    assert default_step(1000.0) == pytest.approx(1e-2)
    assert default_step(-1000.0) == pytest.approx(1e-2)


def test_unwrap_phase_removes_jumps():
    raw = np.array([3.0, -3.0, 3.0, -3.0])
    smooth = unwrap_phase(raw)
    assert np.all(np.abs(np.diff(smooth)) < math.pi)


def test_unit_system_describe_mentions_scales():
    text = UnitSystem().describe()
    assert "hbar=1" in text
    assert "R" in text
