"""Spherical Bessel/Neumann functions and Legendre polynomials.

The recurrences here are chosen for stability at high order: the regular
solution j_l comes from downward (Miller) recurrence with closed-form
normalization at l = 0/1 whenever l can exceed x, and plain upward recurrence
in the oscillatory regime x > l; the irregular solution n_l is always upward.
Orders up to 1e5 are supported.  When |n_l| would leave the representable
range the pair is marked ``saturated``; callers treat the corresponding phase
shifts as exactly zero.

Derivatives use f'_l = f_{l-1} - (l+1)/x * f_l (with f'_0 = -f_1), so the
Wronskian j n' - j' n = 1/x^2 holds to roundoff for every non-saturated pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "BesselPair",
    "BesselTable",
    "spherical_bessel",
    "bessel_table",
    "LegendreSequence",
    "legendre_all",
    "legendre_table",
    "legendre_theta_derivative",
    "legendre_dtheta_table",
    "legendre_asymptotic",
]

SATURATION_LIMIT = 1e280

_MAX_ORDER = 100_000
_RESCALE_LIMIT = 1e250
_RESCALE_FACTOR = 1e-250


def _miller_start(ellmax: int) -> int:
    # Start high enough above ellmax that the admixture of the irregular
    # solution decays away before the stored rows are reached.
    return ellmax + max(20, math.ceil(10.0 * math.log(ellmax + 10.0)))


@dataclass(frozen=True)
class BesselPair:
    """j_l(x), n_l(x) and their derivatives at a single order and argument."""

    ell: int
    x: float
    j: float
    n: float
    jprime: float
    nprime: float
    saturated: bool


@dataclass(frozen=True)
class BesselTable:
    """Columns of j/n values for orders 0..ellmax over an argument grid.

    Arrays have shape (ellmax + 1, len(x)).  ``saturated`` marks entries where
    n_l overflowed the working range; their values are placeholders and the
    associated phase shifts are zero for all practical purposes.
    """

    ellmax: int
    x: np.ndarray
    j: np.ndarray
    n: np.ndarray
    jprime: np.ndarray
    nprime: np.ndarray
    saturated: np.ndarray


def _validate_order(ell: int) -> int:
    if not isinstance(ell, (int, np.integer)):
        raise ValueError(f"order must be an integer, got {ell!r}")
    if ell < 0 or ell > _MAX_ORDER:
        raise ValueError(f"order must lie in [0, {_MAX_ORDER}], got {ell}")
    return int(ell)


def bessel_table(ellmax: int, x) -> BesselTable:
    """Evaluate j_l, n_l and derivatives for l = 0..ellmax on a grid of x > 0."""
    ellmax = _validate_order(ellmax)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if xs.ndim != 1:
        raise ValueError("x must be scalar or 1-D")
    if not np.all(np.isfinite(xs)) or np.any(xs <= 0.0):
        raise ValueError("arguments must be positive and finite")

    nx = xs.size
    # row 1 is always needed for the l = 0 derivatives
    nrows = max(ellmax, 1) + 1
    sinx = np.sin(xs)
    cosx = np.cos(xs)
    j0c = sinx / xs
    j1c = sinx / xs**2 - cosx / xs

    # --- irregular solution, upward (the growing direction is stable) ---
    n_rows = np.empty((nrows, nx))
    n_rows[0] = -cosx / xs
    n_rows[1] = -cosx / xs**2 - sinx / xs
    sat_from = np.full(nx, nrows + 1, dtype=np.int64)
    for row in (0, 1):
        hit = (np.abs(n_rows[row]) >= SATURATION_LIMIT) & (sat_from > row)
        sat_from[hit] = row
    for l in range(1, nrows - 1):
        nxt = (2 * l + 1) / xs * n_rows[l] - n_rows[l - 1]
        hit = (np.abs(nxt) >= SATURATION_LIMIT) & (sat_from > l + 1)
        sat_from[hit] = l + 1
        n_rows[l + 1] = np.clip(nxt, -SATURATION_LIMIT, SATURATION_LIMIT)

    # --- regular solution ---
    j_rows = np.empty((nrows, nx))
    stale_from = np.full(nx, nrows + 1, dtype=np.int64)
    up_cols = xs > nrows - 1  # oscillatory for every stored row: upward is fine
    dn_cols = ~up_cols

    if np.any(up_cols):
        xu = xs[up_cols]
        j_rows[0, up_cols] = j0c[up_cols]
        j_rows[1, up_cols] = j1c[up_cols]
        for l in range(1, nrows - 1):
            j_rows[l + 1, up_cols] = (2 * l + 1) / xu * j_rows[l, up_cols] - j_rows[l - 1, up_cols]

    if np.any(dn_cols):
        xd = xs[dn_cols]
        ncols = xd.size
        lstart = _miller_start(nrows - 1)
        fprev = np.zeros(ncols)  # trial value at l + 1
        fcur = np.full(ncols, 1e-30)  # trial value at l
        w = np.zeros((nrows, ncols))
        stale = np.full(ncols, nrows + 1, dtype=np.int64)
        for l in range(lstart, -1, -1):
            if l < nrows:
                w[l] = fcur
            if l == 0:
                break
            fprev, fcur = fcur, (2 * l + 1) / xd * fcur - fprev
            big = np.abs(fcur) > _RESCALE_LIMIT
            if np.any(big):
                fcur[big] *= _RESCALE_FACTOR
                fprev[big] *= _RESCALE_FACTOR
                stale[big] = np.minimum(stale[big], l)
        # normalize against whichever closed form is larger in magnitude
        j0d = j0c[dn_cols]
        j1d = j1c[dn_cols]
        use0 = np.abs(j0d) >= np.abs(j1d)
        numer = np.where(use0, j0d, j1d)
        denom = np.where(use0, w[0], w[1])
        scale = numer / denom
        cols = w * scale
        # rows written before the last rescale are off by the rescale factor;
        # their true values underflow anyway, so zero and flag them
        row_idx = np.arange(nrows)[:, None]
        cols[row_idx >= stale[None, :]] = 0.0
        j_rows[:, dn_cols] = cols
        stale_from[dn_cols] = stale

    # --- derivatives from the two-term relation ---
    ell_col = np.arange(1, nrows, dtype=float)[:, None]
    jp = np.empty((nrows, nx))
    npr = np.empty((nrows, nx))
    jp[0] = -j_rows[1]
    npr[0] = -n_rows[1]
    jp[1:] = j_rows[:-1] - (ell_col + 1.0) / xs * j_rows[1:]
    npr[1:] = n_rows[:-1] - (ell_col + 1.0) / xs * n_rows[1:]

    rows = np.arange(nrows, dtype=np.int64)[:, None]
    saturated = (rows >= sat_from[None, :]) | (rows >= stale_from[None, :])

    keep = slice(0, ellmax + 1)
    return BesselTable(
        ellmax=ellmax,
        x=xs,
        j=j_rows[keep],
        n=n_rows[keep],
        jprime=jp[keep],
        nprime=npr[keep],
        saturated=saturated[keep],
    )


def spherical_bessel(ell: int, x: float) -> BesselPair:
    """j_l(x), n_l(x), j'_l(x), n'_l(x) at a single point.

    Parameters
    ----------
    ell : int
        Order, 0 <= ell <= 100000.
    x : float
        Argument, > 0.

    Returns
    -------
    BesselPair
        Values and derivatives; ``saturated`` is set when n_l left the
        representable range (l >> x), in which case the values are
        placeholders and phase shifts built from them are zero.
    """
    ell = _validate_order(ell)
    table = bessel_table(ell, float(x))
    return BesselPair(
        ell=ell,
        x=float(x),
        j=float(table.j[ell, 0]),
        n=float(table.n[ell, 0]),
        jprime=float(table.jprime[ell, 0]),
        nprime=float(table.nprime[ell, 0]),
        saturated=bool(table.saturated[ell, 0]),
    )


@dataclass(frozen=True)
class LegendreSequence:
    """P_0 .. P_ellmax evaluated at a single cos(theta)."""

    x: float
    values: np.ndarray

    def __getitem__(self, ell: int) -> float:
        return float(self.values[ell])

    def __len__(self) -> int:
        return self.values.size


def legendre_table(ellmax: int, x) -> np.ndarray:
    """P_l(x) for l = 0..ellmax over a grid, by the three-term recurrence."""
    ellmax = _validate_order(ellmax)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(np.abs(xs) > 1.0 + 1e-14):
        raise ValueError("Legendre argument must lie in [-1, 1]")
    xs = np.clip(xs, -1.0, 1.0)
    out = np.empty((ellmax + 1, xs.size))
    out[0] = 1.0
    if ellmax >= 1:
        out[1] = xs
    for l in range(1, ellmax):
        out[l + 1] = ((2 * l + 1) * xs * out[l] - l * out[l - 1]) / (l + 1)
    return out


def legendre_all(ellmax: int, costheta: float) -> LegendreSequence:
    """All Legendre polynomials up to ellmax at one argument."""
    values = legendre_table(ellmax, float(costheta))[:, 0]
    return LegendreSequence(x=float(costheta), values=values)


def legendre_theta_derivative(ell: int, theta: float) -> float:
    """d/dtheta P_l(cos(theta)), away from the poles.

    Uses (l+1) * (P_{l+1}(c) - c P_l(c)) / sin(theta) with c = cos(theta),
    which is stable for theta in (0, pi); the endpoints are rejected because
    the quotient degenerates there.
    """
    ell = _validate_order(ell)
    theta = float(theta)
    if not 0.0 < theta < math.pi:
        raise ValueError(f"theta must lie strictly inside (0, pi), got {theta}")
    c = math.cos(theta)
    p = legendre_table(ell + 1, c)[:, 0]
    return (ell + 1) * (p[ell + 1] - c * p[ell]) / math.sin(theta)


def legendre_dtheta_table(ellmax: int, theta) -> np.ndarray:
    """d/dtheta P_l(cos theta) for l = 0..ellmax over a theta grid.

    At theta = pi (and 0) the derivative vanishes by symmetry; those columns
    are set to the limit directly instead of dividing by sin(theta).
    """
    ellmax = _validate_order(ellmax)
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    c = np.cos(th)
    s = np.sin(th)
    p = legendre_table(ellmax + 1, c)
    ell_col = np.arange(ellmax + 1, dtype=float)[:, None]
    pole = np.abs(s) < 1e-12
    safe_s = np.where(pole, 1.0, s)
    out = (ell_col + 1.0) * (p[1:] - c * p[:-1]) / safe_s
    out[:, pole] = 0.0
    return out


def legendre_asymptotic(ell: int, theta: float) -> float:
    """Large-order estimate 2/sqrt(2 pi l sin th) * cos((l + 1/2) th - pi/4).

    Accurate to O(1/l) for theta away from the poles; useful as a sanity
    scale for truncation decisions, not as a substitute for the recurrence.
    """
    ell = _validate_order(ell)
    if ell < 1:
        raise ValueError("asymptotic form needs ell >= 1")
    theta = float(theta)
    if not 0.0 < theta < math.pi:
        raise ValueError(f"theta must lie strictly inside (0, pi), got {theta}")
    amp = 2.0 / math.sqrt(2.0 * math.pi * ell * math.sin(theta))
    return amp * math.cos((ell + 0.5) * theta - math.pi / 4.0)
