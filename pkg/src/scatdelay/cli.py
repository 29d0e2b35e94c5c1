"""Command-line front end: phase-shift tables, delay scans, and reports.

Every subcommand emits CSV with `#`-prefixed header comments recording the
command, its parameters, the unit convention, and the library version, then
a column-name row and the data.  Floats are rendered with 17 significant
digits; indeterminate entries become `nan` tokens.  Identical invocations
produce bit-identical output.

Exit codes: 0 on success, 2 on usage errors, 3 on numerical failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import __version__
from .arrival import gaussian_packet, kijowski_density
from .hardsphere import HardSphere, hs_delta, slope_table
from .kinematics import Kinematics, UnitSystem
from .onedim import (
    NodeError,
    PiecewiseConstant,
    reflection_delay_semiinfinite_step,
    transfer_coefficients,
    transmission_delay,
)
from .partialwave import (
    AmplitudeNodeError,
    angular_time_delay,
    delay_profile_scan,
    space_shift,
)
from .wkb import (
    MultiBranchError,
    hard_core,
    phase_shift_energy_slope,
    phase_shift_value,
    stationary_branches,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _write_csv(stream, command: str, params: dict, columns, rows) -> None:
    stream.write(f"# command: {command}\n")
    joined = " ".join(f"{key}={params[key]}" for key in params)
    stream.write(f"# parameters: {joined}\n")
    stream.write(f"# units: {UnitSystem().describe()}\n")
    stream.write(f"# version: {__version__}\n")
    stream.write(",".join(columns) + "\n")
    for row in rows:
        stream.write(",".join(_fmt(v) for v in row) + "\n")


def _open_out(path):
    if path is None:
        return sys.stdout, False
    return open(path, "w"), True


def _positive(name: str, value: float) -> float:
    if not value > 0.0:
        raise ValueError(f"{name} must be > 0, got {value}")
    return value


def _cmd_phase_shifts(args, stream) -> int:
    kR = _positive("--kR", args.kR)
    kin = Kinematics(mass=args.mass, k=kR)
    model = HardSphere(radius=1.0)
    ellmax = args.ellmax if args.ellmax is not None else model.suggested_ellmax(kin)
    if ellmax < 0:
        raise ValueError(f"--ellmax must be >= 0, got {ellmax}")
    deltas = np.array([hs_delta(1.0, ell, kin) for ell in range(ellmax + 1)])
    slopes = slope_table(1.0, ellmax, kin.mass, kin.k)[:, 0]
    params = {"kR": _fmt(kR), "mass": _fmt(args.mass), "ellmax": ellmax}
    rows = ((ell, deltas[ell], slopes[ell]) for ell in range(ellmax + 1))
    _write_csv(stream, "phase-shifts", params, ("ell", "delta_rad", "ddelta_dE"), rows)
    return EXIT_OK


def _cmd_delay_scan(args, stream) -> int:
    kR = _positive("--kR", args.kR)
    if not 0.0 < args.theta_min < args.theta_max <= math.pi:
        raise ValueError(
            "need 0 < theta-min < theta-max <= pi, got "
            f"[{args.theta_min}, {args.theta_max}]"
        )
    if args.points < 2:
        raise ValueError(f"--points must be >= 2, got {args.points}")
    kin = Kinematics(mass=args.mass, k=kR)
    model = HardSphere(radius=1.0)
    thetas = np.linspace(args.theta_min, args.theta_max, args.points)
    profile = delay_profile_scan(model, kin, thetas, ellmax=args.ellmax)
    params = {
        "kR": _fmt(kR),
        "mass": _fmt(args.mass),
        "theta_min": _fmt(args.theta_min),
        "theta_max": _fmt(args.theta_max),
        "points": args.points,
    }
    k = kin.k
    rows = (
        (
            profile.theta[i],
            k * profile.time_delay[i] / args.mass,
            profile.space_shift[i],
            profile.dsigma_domega[i],
            k * profile.classical_delay[i] / args.mass,
            profile.classical_shift[i],
        )
        for i in range(len(profile))
    )
    columns = (
        "theta_rad",
        "t_delay_k",
        "b_over_R",
        "dsdo_over_R2",
        "t_class_k",
        "b_class_over_R",
    )
    _write_csv(stream, "delay-scan", params, columns, rows)
    return EXIT_OK


def _cmd_energy_scan(args, stream) -> int:
    if not 0.0 < args.theta <= math.pi:
        raise ValueError(f"--theta must lie in (0, pi], got {args.theta}")
    if not 0.0 < args.kR_min < args.kR_max:
        raise ValueError(
            f"need 0 < kR-min < kR-max, got [{args.kR_min}, {args.kR_max}]"
        )
    if args.points < 2:
        raise ValueError(f"--points must be >= 2, got {args.points}")
    model = HardSphere(radius=1.0)
    theta_grid = np.array([args.theta])
    rows = []
    for kR in np.linspace(args.kR_min, args.kR_max, args.points):
        kin = Kinematics(mass=args.mass, k=kR)
        profile = delay_profile_scan(model, kin, theta_grid, ellmax=args.ellmax)
        rows.append(
            (kR, 0.5 * kR * kR, profile.time_delay[0], profile.space_shift[0])
        )
    params = {
        "theta": _fmt(args.theta),
        "mass": _fmt(args.mass),
        "kR_min": _fmt(args.kR_min),
        "kR_max": _fmt(args.kR_max),
        "points": args.points,
    }
    columns = ("kR", "E_mR2", "t_delay_mR2", "b_over_R")
    _write_csv(stream, "energy-scan", params, columns, rows)
    return EXIT_OK


def _cmd_oned_step(args, stream) -> int:
    v0 = _positive("--V0", args.V0)
    e = _positive("--E", args.E)
    if args.D < 0.0:
        raise ValueError(f"--D must be >= 0, got {args.D}")
    kin = Kinematics.from_energy(args.mass, e)
    total = reflection_delay_semiinfinite_step(v0, kin, args.D)
    round_trip = 2.0 * args.mass * args.D / kin.k
    q = math.sqrt(2.0 * args.mass * (v0 - e))
    closed = (args.mass / kin.k) * (2.0 / q)
    params = {
        "V0": _fmt(v0),
        "E": _fmt(e),
        "D": _fmt(args.D),
        "mass": _fmt(args.mass),
    }
    columns = ("total_delay", "round_trip", "excess_delay", "closed_form_excess")
    _write_csv(
        stream, "oned step", params, columns, [(total, round_trip, total - round_trip, closed)]
    )
    return EXIT_OK


def _cmd_oned_barrier(args, stream) -> int:
    breakpoints = [float(tok) for tok in args.breakpoints.split(",")]
    values = [float(tok) for tok in args.values.split(",")]
    e = _positive("--E", args.E)
    pot = PiecewiseConstant(breakpoints, values)
    kin = Kinematics.from_energy(args.mass, e)
    coefs = transfer_coefficients(pot, kin)
    try:
        delay = transmission_delay(pot, kin)
    except NodeError:
        delay = math.nan
    params = {
        "breakpoints": args.breakpoints,
        "values": args.values,
        "E": _fmt(e),
        "mass": _fmt(args.mass),
    }
    columns = ("E", "re_R", "im_R", "re_T", "im_T", "abs_T2", "flux_sum", "delay")
    row = (
        e,
        coefs.R_coef.real,
        coefs.R_coef.imag,
        coefs.T_coef.real,
        coefs.T_coef.imag,
        abs(coefs.T_coef) ** 2,
        coefs.flux_sum,
        delay,
    )
    _write_csv(stream, "oned barrier", params, columns, [row])
    return EXIT_OK


def _cmd_arrival(args, stream) -> int:
    packet = gaussian_packet(
        E0=args.E0,
        sigma_E=args.sigmaE,
        mass=args.mass,
        detector_distance=args.D,
        n_points=args.points,
    )
    k0 = math.sqrt(2.0 * args.mass * args.E0)
    center = args.mass * args.D / k0
    spread = 1.0 / (2.0 * args.sigmaE)
    half_window = 10.0 * spread
    t_grid = np.linspace(center - half_window, center + half_window, args.t_points)
    dist = kijowski_density(packet, t_grid)
    params = {
        "E0": _fmt(args.E0),
        "sigmaE": _fmt(args.sigmaE),
        "D": _fmt(args.D),
        "mass": _fmt(args.mass),
        "points": args.points,
        "t_points": args.t_points,
    }
    stream.write("# command: arrival\n")
    joined = " ".join(f"{key}={params[key]}" for key in params)
    stream.write(f"# parameters: {joined}\n")
    stream.write(f"# units: {UnitSystem().describe()}\n")
    stream.write(f"# version: {__version__}\n")
    stream.write(f"# mean: {_fmt(dist.mean)}\n")
    stream.write(f"# variance: {_fmt(dist.variance)}\n")
    stream.write(f"# mass_captured: {_fmt(dist.mass)}\n")
    stream.write(f"# coverage_warning: {str(dist.coverage_warning).lower()}\n")
    stream.write("t,density\n")
    for i in range(len(dist)):
        stream.write(f"{_fmt(dist.t_grid[i])},{_fmt(dist.density[i])}\n")
    return EXIT_OK


def _cmd_wkb(args, stream) -> int:
    kR = _positive("--kR", args.kR)
    if not 0.0 < args.theta < math.pi:
        raise ValueError(f"--theta must lie in (0, pi), got {args.theta}")
    kin = Kinematics(mass=args.mass, k=kR)
    pot = hard_core(1.0)
    model = HardSphere(radius=1.0)

    branches = stationary_branches(pot, kin, args.theta)
    if not branches:
        print(
            f"no semiclassical branch matches theta = {args.theta} at kR = {kR}",
            file=sys.stderr,
        )
        return EXIT_NUMERICAL

    try:
        t_exact = angular_time_delay(model, kin, args.theta)
        b_exact = space_shift(model, kin, args.theta)
    except AmplitudeNodeError:
        t_exact = math.nan
        b_exact = math.nan

    params = {
        "kR": _fmt(kR),
        "theta": _fmt(args.theta),
        "mass": _fmt(args.mass),
    }
    columns = (
        "J_star",
        "Theta",
        "delta_wkb",
        "t_semiclassical",
        "b_semiclassical",
        "t_exact",
        "b_exact",
    )
    rows = []
    for j_star, sign, theta_j in branches:
        delta = phase_shift_value(pot, kin, j_star)
        t_semi = 2.0 * phase_shift_energy_slope(pot, kin, j_star)
        rows.append((j_star, theta_j, delta, t_semi, sign * j_star / kin.k, t_exact, b_exact))
    _write_csv(stream, "wkb", params, columns, rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scatdelay",
        description="Time observables of elastic scattering: tables and scans.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser(
        "phase-shifts", parents=[common], help="continuous phase shifts and slopes"
    )
    p.add_argument("--kR", type=float, required=True)
    p.add_argument("--ellmax", type=int, default=None)
    p.add_argument("--mass", type=float, default=1.0)
    p.set_defaults(func=_cmd_phase_shifts)

    p = sub.add_parser("delay-scan", parents=[common], help="delay profile over scattering angle")
    p.add_argument("--kR", type=float, required=True)
    p.add_argument("--theta-min", dest="theta_min", type=float, default=0.01)
    p.add_argument("--theta-max", dest="theta_max", type=float, default=math.pi)
    p.add_argument("--points", type=int, default=2000)
    p.add_argument("--ellmax", type=int, default=None)
    p.add_argument("--mass", type=float, default=1.0)
    p.set_defaults(func=_cmd_delay_scan)

    p = sub.add_parser("energy-scan", parents=[common], help="delay at fixed angle over kR")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--kR-min", dest="kR_min", type=float, required=True)
    p.add_argument("--kR-max", dest="kR_max", type=float, required=True)
    p.add_argument("--points", type=int, default=4000)
    p.add_argument("--ellmax", type=int, default=None)
    p.add_argument("--mass", type=float, default=1.0)
    p.set_defaults(func=_cmd_energy_scan)

    p = sub.add_parser("oned", help="one-dimensional scattering reports")
    oned_sub = p.add_subparsers(dest="oned_mode", required=True)

    ps = oned_sub.add_parser("step", parents=[common], help="total-reflection delay at a step")
    ps.add_argument("--V0", type=float, required=True)
    ps.add_argument("--E", type=float, required=True)
    ps.add_argument("--D", type=float, required=True)
    ps.add_argument("--mass", type=float, default=1.0)
    ps.set_defaults(func=_cmd_oned_step)

    pb = oned_sub.add_parser("barrier", parents=[common], help="piecewise-constant transmission")
    pb.add_argument("--breakpoints", required=True, help="comma-separated positions")
    pb.add_argument("--values", required=True, help="comma-separated segment levels")
    pb.add_argument("--E", type=float, required=True)
    pb.add_argument("--mass", type=float, default=1.0)
    pb.set_defaults(func=_cmd_oned_barrier)

    p = sub.add_parser("arrival", parents=[common], help="arrival-time density of a Gaussian packet")
    p.add_argument("--E0", type=float, required=True)
    p.add_argument("--sigmaE", type=float, required=True)
    p.add_argument("--D", type=float, default=0.0)
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--points", type=int, default=4096)
    p.add_argument("--t-points", dest="t_points", type=int, default=4001)
    p.set_defaults(func=_cmd_arrival)

    p = sub.add_parser("wkb", parents=[common], help="semiclassical branches vs exact observables")
    p.add_argument("--kR", type=float, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--mass", type=float, default=1.0)
    p.set_defaults(func=_cmd_wkb)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    stream, should_close = _open_out(args.out)
    try:
        return args.func(args, stream)
    except BrokenPipeError:
        # downstream consumer (e.g. head) closed the pipe; not an error;
        # repoint stdout at devnull so the interpreter-exit flush stays quiet
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return EXIT_OK
    except MultiBranchError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        if should_close:
            stream.close()


if __name__ == "__main__":
    sys.exit(main())
