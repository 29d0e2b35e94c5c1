import cmath
import math

import numpy as np
import pytest

from scatdelay.kinematics import Kinematics
from scatdelay.onedim import (
    NodeError,
    PiecewiseConstant,
    ScatterCoefficients,
    StepPotential,
    reflection_delay_semiinfinite_step,
    step_reflection_amplitude,
    transfer_coefficients,
    transmission_delay,
)


def oracle_coefficients(breakpoints, values, mass, energy):
    """Independent matching route: complex trig segment matrices (no scaling
    tricks), then a direct 2x2 linear solve for (r, t).  Valid while the
    segment matrices stay within floating-point range, i.e. kappa*d < ~700."""
    k = math.sqrt(2.0 * mass * energy)
    m_tot = np.eye(2, dtype=complex)
    for left, right, v in zip(breakpoints, breakpoints[1:], values):
        d = right - left
        q = cmath.sqrt(2.0 * mass * (energy - v))
        if abs(q) < 1e-12:
            seg = np.array([[1.0, d], [0.0, 1.0]], dtype=complex)
        else:
            seg = np.array(
                [[cmath.cos(q * d), cmath.sin(q * d) / q], [-q * cmath.sin(q * d), cmath.cos(q * d)]]
            )
        m_tot = seg @ m_tot
    xl, xr = breakpoints[0], breakpoints[-1]
    el = cmath.exp(1j * k * xl)
    er = cmath.exp(1j * k * xr)
    # unknowns (r, t): M (psi_l, psi_l') = (psi_r, psi_r')
    a = np.array(
        [
            [m_tot[0, 0] / el - 1j * k * m_tot[0, 1] / el, -er],
            [m_tot[1, 0] / el - 1j * k * m_tot[1, 1] / el, -1j * k * er],
        ]
    )
    b = -np.array(
        [m_tot[0, 0] * el + 1j * k * m_tot[0, 1] * el, m_tot[1, 0] * el + 1j * k * m_tot[1, 1] * el]
    )
    r, t = np.linalg.solve(a, b)
    return complex(r), complex(t)


def oracle_delay(breakpoints, values, mass, energy, h=1e-7):
    args = []
    for e in (energy - 2 * h, energy - h, energy + h, energy + 2 * h):
        _, t = oracle_coefficients(breakpoints, values, mass, e)
        args.append(cmath.phase(t))
    a = np.unwrap(np.array(args))
    return (a[0] - 8 * a[1] + 8 * a[2] - a[3]) / (12 * h)


def random_potential(rng):
    nseg = int(rng.integers(1, 9))
    widths = rng.uniform(0.05, 6.0, size=nseg)
    bp = np.concatenate([[0.0], np.cumsum(widths)])
    vals = rng.uniform(-4.0, 4.0, size=nseg)
    return PiecewiseConstant(bp, vals)


def test_rectangular_barrier_closed_form():
    # barrier of height 4 and width 1 probed at E = 2: k = kappa = 2, and
    # |T|^2 = 1 / (1 + sinh^2(2))
    kin = Kinematics(mass=1.0, k=2.0)
    coefs = transfer_coefficients(PiecewiseConstant([0.0, 1.0], [4.0]), kin)
    want = 1.0 / (1.0 + math.sinh(2.0) ** 2)
    assert abs(coefs.T_coef) ** 2 == pytest.approx(want, rel=1e-10)
    assert coefs.flux_sum == pytest.approx(1.0, abs=1e-12)


def test_matches_independent_matching_route():
    cases = [
        ([0.0, 1.0], [4.0], 2.0),  # tunneling barrier
        ([0.0, 1.0], [-3.0], 2.0),  # well
        ([-0.5, 0.5, 1.5], [2.5, -1.0], 1.7),  # mixed, offset origin
        ([0.0, 0.5], [1.5], 1.0),  # thin translucent barrier
    ]
    for bp, vals, e in cases:
        kin = Kinematics.from_energy(1.0, e)
        got = transfer_coefficients(PiecewiseConstant(bp, vals), kin)
        r, t = oracle_coefficients(bp, vals, 1.0, e)
        assert abs(got.R_coef - r) < 1e-11 * max(1.0, abs(r))
        assert abs(got.T_coef - t) < 1e-11 * max(1.0, abs(t))


def test_unitarity_of_random_potentials():
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(100):
        pot = random_potential(rng)
        e = float(rng.uniform(0.1, 8.0))
        coefs = transfer_coefficients(pot, Kinematics.from_energy(1.0, e))
        worst = max(worst, abs(coefs.flux_sum - 1.0))
    assert worst < 1e-10


def test_segment_split_invariance():
    # halving every segment must not change the physics
    rng = np.random.default_rng(7)
    for _ in range(20):
        pot = random_potential(rng)
        e = float(rng.uniform(0.1, 8.0))
        bp2, vals2 = [pot.breakpoints[0]], []
        for left, right, v in zip(pot.breakpoints, pot.breakpoints[1:], pot.values):
            mid = 0.5 * (left + right)
            bp2.extend([mid, right])
            vals2.extend([v, v])
        split = PiecewiseConstant(bp2, vals2)
        kin = Kinematics.from_energy(1.0, e)
        a = transfer_coefficients(pot, kin)
        b = transfer_coefficients(split, kin)
        assert abs(a.R_coef - b.R_coef) < 1e-12
        assert abs(a.T_coef - b.T_coef) < 1e-12


def test_zero_potential_is_transparent():
    kin = Kinematics(mass=1.0, k=1.3)
    coefs = transfer_coefficients(PiecewiseConstant([0.0, 2.0], [0.0]), kin)
    assert abs(coefs.T_coef - 1.0) < 1e-14
    assert abs(coefs.R_coef) < 1e-14
    assert abs(transmission_delay(PiecewiseConstant([0.0, 2.0], [0.0]), kin)) < 1e-10


def test_segment_at_exact_energy():
    # E equal to a segment value exercises the linear branch; the result must
    # join the two trig branches continuously
    e = 2.0
    kin = Kinematics.from_energy(1.0, e)
    at = transfer_coefficients(PiecewiseConstant([0.0, 1.0], [e]), kin)
    above = transfer_coefficients(PiecewiseConstant([0.0, 1.0], [e - 1e-9]), kin)
    below = transfer_coefficients(PiecewiseConstant([0.0, 1.0], [e + 1e-9]), kin)
    assert abs(at.T_coef - above.T_coef) < 1e-8
    assert abs(at.T_coef - below.T_coef) < 1e-8
    assert at.flux_sum == pytest.approx(1.0, abs=1e-12)


def test_transmission_delay_against_oracle():
    for bp, vals, e in [
        ([0.0, 0.5], [1.5], 1.0),  # thin, kappa*a ~ 0.5
        ([0.0, 1.0], [-3.0], 2.0),  # well
        ([0.0, 1.0, 2.0], [3.0, -1.0], 1.3),
    ]:
        kin = Kinematics.from_energy(1.0, e)
        got = transmission_delay(PiecewiseConstant(bp, vals), kin)
        want = oracle_delay(bp, vals, 1.0, e)
        assert got == pytest.approx(want, rel=1e-6, abs=1e-9)


def test_opaque_barrier_delay_is_negative():
    # kappa*a ~ 10: the direct complex route still works, and the emerging
    # phase slope is negative, approaching -(m/k) a + const
    bp, vals, e = [0.0, 0.5], [200.0], 1.0
    kin = Kinematics.from_energy(1.0, e)
    got = transmission_delay(PiecewiseConstant(bp, vals), kin)
    # closed-form phase of the rectangular barrier in the deep-tunneling regime
    def arg_t(energy):
        k = math.sqrt(2.0 * energy)
        kap = math.sqrt(2.0 * (200.0 - energy))
        return -k * 0.5 - math.atan((kap * kap - k * k) / (2.0 * k * kap) * math.tanh(kap * 0.5))

    h = 1e-7
    want = (arg_t(e - 2 * h) - 8 * arg_t(e - h) + 8 * arg_t(e + h) - arg_t(e + 2 * h)) / (12 * h)
    assert got < 0.0
    assert got == pytest.approx(want, rel=1e-6)


def test_fully_opaque_barrier_raises():
    # kappa*a ~ 40 pushes |T| to ~1e-18, far below the node threshold
    kin = Kinematics.from_energy(1.0, 1.0)
    with pytest.raises(NodeError):
        transmission_delay(PiecewiseConstant([0.0, 2.0], [200.0]), kin)


def test_step_total_reflection_is_unimodular():
    for v0, e in [(2.0, 1.0), (5.0, 1.0), (1.1, 1.0), (3.0, 2.9999)]:
        r = step_reflection_amplitude(v0, Kinematics.from_energy(1.0, e))
        assert abs(abs(r) - 1.0) < 1e-12
        # continuous phase convention: arg R = 2 arctan(k/kappa) - pi
        k = math.sqrt(2.0 * e)
        kap = math.sqrt(2.0 * (v0 - e))
        assert cmath.phase(r) == pytest.approx(2.0 * math.atan(k / kap) - math.pi, abs=1e-12)


def test_step_excess_reflection_delay_closed_form():
    # excess over the round trip 2mD/k is (m/k)(2/q), twice the penetration
    # depth over the speed
    for v0, e in [(2.0, 1.0), (5.0, 1.0), (1.1, 1.0)]:
        kin = Kinematics.from_energy(1.0, e)
        d = 7.0
        got = reflection_delay_semiinfinite_step(v0, kin, d)
        round_trip = 2.0 * kin.mass * d / kin.k
        q = math.sqrt(2.0 * (v0 - e))
        assert got - round_trip == pytest.approx((kin.mass / kin.k) * 2.0 / q, rel=1e-8)


def test_step_excess_diverges_toward_threshold():
    kin = Kinematics.from_energy(1.0, 1.0)
    excesses = [
        reflection_delay_semiinfinite_step(1.0 + gap, kin, 0.0) for gap in (1e-2, 1e-4, 1e-6)
    ]
    assert excesses[0] < excesses[1] < excesses[2]
    assert excesses[2] > 1e2


def test_step_above_barrier_fluxes():
    # E > V0: both amplitudes are real, and velocity-weighted flux balances
    v0, e = 2.0, 5.0
    kin = Kinematics.from_energy(1.0, e)
    coefs = transfer_coefficients(StepPotential(v0), kin)
    k = kin.k
    kp = math.sqrt(2.0 * (e - v0))
    assert coefs.R_coef.imag == 0.0 and coefs.T_coef.imag == 0.0
    flux = abs(coefs.R_coef) ** 2 + (kp / k) * abs(coefs.T_coef) ** 2
    assert flux == pytest.approx(1.0, rel=1e-12)
    assert coefs.R_coef.real == pytest.approx((k - kp) / (k + kp), rel=1e-12)


def test_step_below_barrier_interface_continuity():
    # psi is continuous at the interface: 1 + R equals the evanescent amplitude
    v0, e = 3.0, 1.0
    coefs = transfer_coefficients(StepPotential(v0), Kinematics.from_energy(1.0, e))
    assert coefs.T_coef == pytest.approx(1.0 + coefs.R_coef, rel=1e-12)


def test_validation_errors():
    kin = Kinematics(mass=1.0, k=1.0)
    with pytest.raises(ValueError):
        PiecewiseConstant([0.0], [])
    with pytest.raises(ValueError):
        PiecewiseConstant([0.0, 1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        PiecewiseConstant([1.0, 0.5], [1.0])
    with pytest.raises(ValueError):
        StepPotential(-1.0)
    with pytest.raises(TypeError):
        transfer_coefficients(object(), kin)
    with pytest.raises(ValueError):
        reflection_delay_semiinfinite_step(0.3, kin, 1.0)  # E above the step
    with pytest.raises(ValueError):
        reflection_delay_semiinfinite_step(2.0, kin, -1.0)


def test_coefficients_container():
    c = ScatterCoefficients(E=1.0, R_coef=0.6 + 0.0j, T_coef=0.8j)
    assert c.flux_sum == pytest.approx(1.0)
