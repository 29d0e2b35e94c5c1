import math

import numpy as np
import pytest
from numpy.polynomial.legendre import legval
from scipy.special import spherical_jn, spherical_yn

from scatdelay.specfun import (
    bessel_table,
    legendre_all,
    legendre_asymptotic,
    legendre_dtheta_table,
    legendre_table,
    legendre_theta_derivative,
    spherical_bessel,
)

# lattice used for the cross-checks: orders to 60, arguments spanning the
# deep-tunneling and oscillatory regimes
ORDERS = [0, 1, 2, 3, 5, 8, 13, 21, 34, 60]
ARGS = [0.05, 0.3, 1.0, 2.0, 7.7, 20.0, 55.0, 130.0]


def test_wronskian_identity_on_lattice():
    worst = 0.0
    for ell in ORDERS:
        for x in ARGS:
            p = spherical_bessel(ell, x)
            if p.saturated:
                continue
            w = p.j * p.nprime - p.jprime * p.n
            worst = max(worst, abs(w * x * x - 1.0))
    assert worst < 1e-10


def test_values_match_scipy():
    for ell in ORDERS:
        for x in ARGS:
            p = spherical_bessel(ell, x)
            if p.saturated:
                continue
            jr = spherical_jn(ell, x)
            nr = spherical_yn(ell, x)
            scale = max(abs(jr), abs(nr), 1e-300)
            assert abs(p.j - jr) / scale < 1e-12, (ell, x)
            assert abs(p.n - nr) / scale < 1e-12, (ell, x)
            assert abs(p.jprime - spherical_jn(ell, x, derivative=True)) / scale < 1e-11
            assert abs(p.nprime - spherical_yn(ell, x, derivative=True)) / scale < 1e-11


def test_table_matches_single_point_calls():
    xs = np.array([0.4, 3.0, 12.0])
    table = bessel_table(25, xs)
    for ell in (0, 7, 25):
        for col, x in enumerate(xs):
            p = spherical_bessel(ell, float(x))
            assert table.j[ell, col] == pytest.approx(p.j, rel=1e-13, abs=1e-300)
            assert table.n[ell, col] == pytest.approx(p.n, rel=1e-13, abs=1e-300)
            assert bool(table.saturated[ell, col]) == p.saturated


def test_high_order_small_argument_saturates():
    # n_l grows roughly like (2l-1)!!/x^(l+1); far past the representable
    # range the pair must be flagged rather than silently wrong
    p = spherical_bessel(400, 0.5)
    assert p.saturated
    table = bessel_table(400, 0.5)
    assert bool(table.saturated[400, 0])
    assert not bool(table.saturated[0, 0])
    # saturation is monotone in order at fixed argument
    col = table.saturated[:, 0]
    first = int(np.argmax(col))
    assert col[first:].all()


def test_moderate_high_order_still_accurate():
    # l = 85 at x = 1 is far into the tunneling regime yet unflagged,
    # so both members must still match the reference implementation
    p = spherical_bessel(85, 1.0)
    assert not p.saturated
    assert p.n == pytest.approx(spherical_yn(85, 1.0), rel=1e-10)
    assert p.j == pytest.approx(spherical_jn(85, 1.0), rel=1e-10)


def test_deep_saturation_clips_to_limit():
    p = spherical_bessel(140, 1.0)
    assert p.saturated
    assert abs(p.n) == pytest.approx(1e280)
    assert p.j == 0.0


def test_bessel_argument_validation():
    with pytest.raises(ValueError):
        spherical_bessel(3, -1.0)
    with pytest.raises(ValueError):
        spherical_bessel(3, 0.0)
    with pytest.raises(ValueError):
        spherical_bessel(-1, 1.0)
    with pytest.raises(ValueError):
        bessel_table(5, np.array([[1.0, 2.0]]))


def test_legendre_matches_legval():
    xs = np.linspace(-1.0, 1.0, 41)
    table = legendre_table(30, xs)
    for ell in (0, 1, 2, 9, 30):
        coeffs = np.zeros(ell + 1)
        coeffs[ell] = 1.0
        ref = legval(xs, coeffs)
        assert np.max(np.abs(table[ell] - ref)) < 1e-12


def test_legendre_all_indexing():
    seq = legendre_all(4, 0.5)
    assert len(seq) == 5
    assert seq[0] == pytest.approx(1.0)
    assert seq[1] == pytest.approx(0.5)
    assert seq[2] == pytest.approx(0.5 * (3 * 0.25 - 1))


def test_theta_derivative_against_finite_difference():
    # acceptance-level bound: 1e-7 against a central difference of legval
    h = 1e-6
    worst = 0.0
    for ell in (1, 2, 5, 12, 40):
        coeffs = np.zeros(ell + 1)
        coeffs[ell] = 1.0
        for theta in (0.3, 1.0, 2.0, 2.9):
            fd = (legval(math.cos(theta + h), coeffs) - legval(math.cos(theta - h), coeffs)) / (
                2 * h
            )
            got = legendre_theta_derivative(ell, theta)
            worst = max(worst, abs(got - fd) / max(1.0, abs(fd)))
    assert worst < 1e-7


def test_dtheta_table_matches_scalar_and_poles():
    thetas = np.array([0.7, 1.9, math.pi])
    table = legendre_dtheta_table(6, thetas)
    for ell in range(7):
        assert table[ell, 0] == pytest.approx(legendre_theta_derivative(ell, 0.7), rel=1e-12)
        assert table[ell, 1] == pytest.approx(legendre_theta_derivative(ell, 1.9), rel=1e-12)
        assert table[ell, 2] == 0.0  # derivative vanishes at the backward pole


def test_legendre_argument_validation():
    with pytest.raises(ValueError):
        legendre_table(3, 1.5)
    with pytest.raises(ValueError):
        legendre_theta_derivative(3, 0.0)
    with pytest.raises(ValueError):
        legendre_theta_derivative(3, math.pi)


def test_asymptotic_form_converges():
    theta = 1.1
    errs = []
    for ell in (20, 80, 320):
        coeffs = np.zeros(ell + 1)
        coeffs[ell] = 1.0
        exact = legval(math.cos(theta), coeffs)
        est = legendre_asymptotic(ell, theta)
        errs.append(abs(est - exact) * math.sqrt(ell))
    # error scaled by sqrt(l) must keep shrinking like 1/l
    assert errs[1] < 0.3 * errs[0]
    assert errs[2] < 0.3 * errs[1]
