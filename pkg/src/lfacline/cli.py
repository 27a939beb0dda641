"""Command-line front end.

Commands: line-info, pi-error, max-power, power-circle, check. All numeric
output uses 9 significant digits, '.' decimal separator, and LF line endings,
so repeated runs with the same configuration are byte-identical.

Exit codes: 0 success, 1 usage/config error, 2 computation error (typed error
name on stderr), 3 constraint violation reported by `check`.
"""

from __future__ import annotations

import argparse
import cmath
import json
import math
import sys
from pathlib import Path
from typing import Callable, Sequence, TextIO

from . import line_model, max_transfer, power_circle, power_flow
from .config import StudyConfig, load_config
from .errors import ConfigError, DivisionByZeroAdmittance, LfaclineError
from .line_model import Frequency, SilModel

__all__ = ["main"]


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def _fmt_complex(z: complex) -> str:
    sign = "+" if z.imag >= 0 else "-"
    return f"{_fmt(z.real)} {sign} j{_fmt(abs(z.imag))}"


def _active_set_str(active: frozenset[power_flow.Constraint]) -> str:
    return "+".join(sorted(c.value for c in active))


def _open_out(path: str | None) -> tuple[TextIO, bool]:
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline="\n"), True


def _parse_resolution(text: str) -> tuple[int, int]:
    try:
        a, b = text.lower().split("x")
        n_vd, n_theta = int(a), int(b)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"resolution must look like 41x721, got {text!r}"
        ) from exc
    if n_vd < 2 or n_theta < 3:
        raise argparse.ArgumentTypeError("resolution must be at least 2x3")
    return n_vd, n_theta


def _parse_lengths(text: str) -> list[float]:
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad length list {text!r}") from exc
    if not values or any(v <= 0 for v in values):
        raise argparse.ArgumentTypeError("lengths must be positive km values")
    return values


def _factory(config: StudyConfig) -> max_transfer.AdmittanceFactory:
    def build(f: Frequency) -> power_flow.BranchAdmittance:
        return power_flow.admittance_from_params(config.line, config.base, f)

    return build


def _origin_only(config: StudyConfig, args: argparse.Namespace) -> bool:
    return bool(config.origin_only_thermal or args.origin_only_thermal)


def cmd_line_info(args: argparse.Namespace, config: StudyConfig) -> int:
    f = Frequency(args.freq)
    params = config.line
    base = config.base
    branch = line_model.lump_parameters(params, f)
    out, close = _open_out(args.out)
    try:
        w = out.write
        w(f"frequency_hz: {_fmt(f.hertz)}\n")
        w(f"length_km: {_fmt(params.length_km)}\n")
        w(f"z_series_ohm: {_fmt_complex(branch.z_series)}\n")
        w(f"y_shunt_total_s: {_fmt_complex(branch.y_shunt_total)}\n")
        gl = line_model.propagation_constant(params, f) * params.length_km
        w(f"gamma_ell: {_fmt_complex(gl)}\n")
        w(f"gamma_ell_mag: {_fmt(abs(gl))}\n")
        try:
            z0 = line_model.characteristic_impedance(params, f)
            w(f"z0_ohm: {_fmt(abs(z0))} angle_deg {_fmt(math.degrees(cmath.phase(z0)))}\n")
        except DivisionByZeroAdmittance:
            w("z0_ohm: undefined at 0 Hz (zero shunt conductance)\n")
        w(f"z_base_ohm: {_fmt(base.z_base)}\n")
        z_pu = base.impedance_to_pu(branch.z_series)
        w(f"r_pu: {_fmt(z_pu.real)}\n")
        w(f"x_pu: {_fmt(z_pu.imag)}\n")
        adm = power_flow.branch_admittance(branch, base, f)
        w(f"g_series_pu: {_fmt(adm.g_series)}\n")
        w(f"b_series_pu: {_fmt(adm.b_series)}\n")
        w(f"b_shunt_end_pu: {_fmt(adm.b_shunt_end)}\n")
        w(f"b_shunt_flow_pu: {_fmt(adm.b_shunt_flow)}\n")
        if f.is_dc:
            w("note: 0 Hz quantities; susceptances vanish and g_series = 1/R\n")
    finally:
        if close:
            out.close()
    return 0


def _freq_grid(f_min: float, f_max: float, step: float) -> list[float]:
    if not 0.0 <= f_min < f_max or step <= 0.0:
        raise ConfigError("need 0 <= freq-min < freq-max and freq-step > 0")
    n = int(math.floor((f_max - f_min) / step + 1e-9)) + 1
    grid = [f_min + i * step for i in range(n)]
    if grid[-1] < f_max - 1e-9:
        grid.append(f_max)
    return grid


def cmd_pi_error(args: argparse.Namespace, config: StudyConfig) -> int:
    grid = _freq_grid(args.freq_min, args.freq_max, args.freq_step)
    out, close = _open_out(args.out)
    try:
        out.write("length_km,f_hz,gamma_ell,pi_error_pu\n")
        for length in sorted(args.lengths):
            params = config.line.with_length(length)
            for hz in grid:
                f = Frequency(hz)
                ge = line_model.gamma_ell_magnitude(params, f)
                err = line_model.pi_model_error(params, f)
                out.write(f"{_fmt(length)},{_fmt(hz)},{_fmt(ge)},{_fmt(err)}\n")
    finally:
        if close:
            out.close()
    return 0


def cmd_max_power(args: argparse.Namespace, config: StudyConfig) -> int:
    result = max_transfer.sweep(
        _factory(config),
        config.limits,
        args.freq_min,
        args.freq_max,
        args.freq_step,
        origin_only_thermal=_origin_only(config, args),
    )
    sidecar = {
        "breakpoints": [
            {
                "f_hz": round(bp.frequency.hertz, 9),
                "region_from": bp.region_from,
                "region_to": bp.region_to,
            }
            for bp in result.breakpoints
        ],
        "dc_p_max": None if result.dc_point is None else round(result.dc_point.p_max, 9),
        "crossover_hz": None if result.crossover_hz is None else round(result.crossover_hz, 9),
    }
    sidecar_text = json.dumps(sidecar, sort_keys=True, separators=(",", ":")) + "\n"

    out, close = _open_out(args.out)
    try:
        out.write("f_hz,p_max,v_d_star,theta_star_deg,active_set,region_id\n")
        for p in result.points:
            out.write(
                ",".join(
                    (
                        _fmt(p.frequency.hertz),
                        _fmt(p.p_max),
                        _fmt(p.v_d_star),
                        _fmt(math.degrees(p.theta_star)),
                        _active_set_str(p.active_set),
                        str(p.region_id),
                    )
                )
                + "\n"
            )
    finally:
        if close:
            out.close()
    if close:
        stem = Path(args.out)
        sidecar_path = stem.with_suffix(".breakpoints.json")
        sidecar_path.write_text(sidecar_text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(sidecar_text)
    return 0


def cmd_power_circle(args: argparse.Namespace, config: StudyConfig) -> int:
    f = Frequency(args.freq)
    n_vd, n_theta = args.resolution
    adm = power_flow.admittance_from_params(config.line, config.base, f)
    origin_only = _origin_only(config, args)
    lim = config.limits

    rows: list[tuple[str, ...]] = []
    if f.is_dc:
        region = power_circle.dc_segment(
            1.0, lim, adm, lim.k_dc, n_vd=n_vd, origin_only_thermal=origin_only
        )
    else:
        for v_d in (lim.v_min, lim.v_max):
            c = power_circle.circle(1.0, v_d, adm)
            rows.append(
                ("circle", "", _fmt(v_d), "", "", "", "",
                 _fmt(c.center_p), _fmt(c.center_q), _fmt(c.radius))
            )
        region = power_circle.feasible_region(
            lim, adm, f, n_vd=n_vd, n_theta=n_theta, origin_only_thermal=origin_only
        )
    for i, (p, q) in enumerate(region.boundary):
        rows.append(("boundary", str(i), "", "", _fmt(p), _fmt(q), "", "", "", ""))
    for s in region.samples:
        rows.append(
            ("sample", "", _fmt(s.v_d), _fmt(math.degrees(s.theta)),
             _fmt(s.p_o), _fmt(s.q_o), "1" if s.feasible else "0", "", "", "")
        )

    out, close = _open_out(args.out)
    try:
        out.write(
            "record,seq,v_d,theta_deg,p_o,q_o,feasible,center_p,center_q,radius\n"
        )
        for row in rows:
            out.write(",".join(row) + "\n")
    finally:
        if close:
            out.close()
    return 0


def cmd_check(args: argparse.Namespace, config: StudyConfig) -> int:
    f = Frequency(args.freq)
    theta = math.radians(args.theta_deg)
    if f.is_dc and theta != 0.0:
        raise ConfigError("theta must be 0 at 0 Hz")
    adm = power_flow.admittance_from_params(config.line, config.base, f)
    op = power_flow.OperatingPoint(
        v_o=args.v_o, v_d=args.v_d, theta_od=theta, frequency=f
    )
    if f.is_dc:
        flow = power_flow.dc_flow(op, adm, config.limits.k_dc)
    else:
        flow = power_flow.branch_flow(op, adm)
    report = power_flow.check_limits(flow, op, config.limits)
    origin_only = _origin_only(config, args)
    enforced = [
        c
        for c in power_flow.Constraint
        if not (origin_only and c is power_flow.Constraint.THERMAL_D)
    ]

    out, close = _open_out(args.out)
    try:
        w = out.write
        w(f"p_o: {_fmt(flow.p_o)}\nq_o: {_fmt(flow.q_o)}\ns_o: {_fmt(flow.s_o)}\n")
        w(f"p_d: {_fmt(flow.p_d)}\nq_d: {_fmt(flow.q_d)}\ns_d: {_fmt(flow.s_d)}\n")
        for c in power_flow.Constraint:
            st = report[c]
            state = "ok" if st.satisfied else "VIOLATED"
            if st.active:
                state += " active"
            if c not in enforced:
                state += " (not enforced)"
            w(f"{c.value}: margin {_fmt(st.margin)} {state}\n")
    finally:
        if close:
            out.close()
    return 0 if all(report[c].satisfied for c in enforced) else 3


class _Parser(argparse.ArgumentParser):
    # usage problems must exit 1, not argparse's default 2
    def error(self, message: str):  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="lfacline",
        description="Steady-state transmission branch analysis with frequency as a variable.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True, help="JSON study configuration")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument(
            "--origin-only-thermal",
            action="store_true",
            help="enforce the thermal limit at the origin end only",
        )

    p = sub.add_parser("line-info", help="line model quantities at one frequency")
    common(p)
    p.add_argument("--freq", type=float, default=60.0)
    p.set_defaults(handler=cmd_line_info)

    p = sub.add_parser("pi-error", help="Pi-approximation validity and error table")
    common(p)
    p.add_argument("--freq-min", type=float, default=0.5)
    p.add_argument("--freq-max", type=float, default=80.0)
    p.add_argument("--freq-step", type=float, default=0.5)
    p.add_argument(
        "--lengths",
        type=_parse_lengths,
        default=[100.0, 250.0, 400.0, 550.0, 700.0],
        help="comma-separated lengths in km",
    )
    p.set_defaults(handler=cmd_pi_error)

    p = sub.add_parser("max-power", help="maximum transfer sweep over frequency")
    common(p)
    p.add_argument("--freq-min", type=float, default=0.0)
    p.add_argument("--freq-max", type=float, default=60.0)
    p.add_argument("--freq-step", type=float, default=0.05)
    p.set_defaults(handler=cmd_max_power)

    p = sub.add_parser("power-circle", help="power circles and feasible PQ region")
    common(p)
    p.add_argument("--freq", type=float, default=60.0)
    p.add_argument("--resolution", type=_parse_resolution, default=(41, 721))
    p.set_defaults(handler=cmd_power_circle)

    p = sub.add_parser("check", help="evaluate one operating point against the limits")
    common(p)
    p.add_argument("--freq", type=float, default=60.0)
    p.add_argument("--v-o", type=float, default=1.0)
    p.add_argument("--v-d", type=float, default=1.0)
    p.add_argument("--theta-deg", type=float, default=0.0)
    p.set_defaults(handler=cmd_check)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        handler: Callable[[argparse.Namespace, StudyConfig], int] = args.handler
        return handler(args, config)
    except ConfigError as exc:
        print(f"lfacline: config error: {exc}", file=sys.stderr)
        return 1
    except LfaclineError as exc:
        print(f"lfacline: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"lfacline: ValueError: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
