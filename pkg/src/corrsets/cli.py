"""Command-line front end.

Subcommands wrap the library: support/gauge evaluations on a scenario,
witness construction for a target state, the verification battery, and the
CSV reports (critical-noise table, containment radii, noise sweeps).

Scenario files are JSON with keys "A" and "B" (row lists of Bloch
directions), optional "Z" and "C" (m x m matrices), and an optional
"state": one of "werner:p", "tau:p", "rho_max", a Pauli-form dict
{"weight", "ra", "rb", "t"}, or a dense 4 x 4 matrix whose entries are
[re, im] pairs. Rows of A and B are renormalized when they are within 1e-3
of unit length and rejected otherwise.

Exit codes: 0 on success, 1 when verification fails, 2 on input errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import detect, geometry, selfcheck, twoqubit
from ._version import __version__
from .geometry import MeasurementSettings
from .smallmat import det_sign, pinv, svdvals

_ROW_REJECT_TOL = 1e-3


def _fmt(x) -> str:
    return f"{float(x):.12g}"


def _fmt_complex(v) -> str:
    return f"{v.real:.12g}{v.imag:+.12g}j"


@dataclass
class Scenario:
    name: str
    settings: MeasurementSettings
    z: np.ndarray | None = None
    c: np.ndarray | None = None
    state: np.ndarray | None = None

    def coefficient(self) -> np.ndarray:
        if self.z is None:
            raise ValueError(f"scenario {self.name!r} provides no coefficient matrix Z")
        return self.z

    def correlation(self) -> np.ndarray:
        if self.c is not None:
            return self.c
        if self.state is not None:
            return geometry.correlation_matrix(self.state, self.settings)
        raise ValueError(f"scenario {self.name!r} provides neither C nor a state")


def _builtin_scenarios() -> dict:
    eye = np.eye(3)
    return {
        "chsh": lambda: Scenario("chsh", detect.chsh_settings(),
                                 z=np.array(detect.Z_CHSH),
                                 state=twoqubit.werner_state(0.0)),
        "pauli3": lambda: Scenario("pauli3", detect.pauli_settings(), z=eye.copy(),
                                   state=twoqubit.werner_state(0.0)),
        "b-rot": lambda: Scenario("b-rot", detect.rotated_settings(), z=eye.copy(),
                                  state=twoqubit.werner_state(0.0)),
        "i3322-opt": lambda: Scenario("i3322-opt", detect.i3322_settings(), z=eye.copy(),
                                      state=twoqubit.werner_state(0.0)),
    }


def parse_state(value):
    """Resolve a state description from a scenario file or --state flag."""
    if isinstance(value, str):
        if value == "rho_max":
            return twoqubit.rho_max()
        head, sep, tail = value.partition(":")
        if sep and head in ("werner", "tau"):
            p = float(tail)
            return twoqubit.werner_state(p) if head == "werner" else twoqubit.tau_state(p)
        raise ValueError(f"unknown state {value!r}; use werner:p, tau:p or rho_max")
    if isinstance(value, dict):
        missing = {"ra", "rb", "t"} - set(value)
        if missing:
            raise ValueError(f"Pauli-form state is missing {sorted(missing)}")
        form = twoqubit.PauliForm(
            weight=float(value.get("weight", 1.0)),
            ra=np.asarray(value["ra"], dtype=float),
            rb=np.asarray(value["rb"], dtype=float),
            t=np.asarray(value["t"], dtype=float))
        return twoqubit.pauli_assemble(form)
    dense = np.asarray(value, dtype=float)
    if dense.shape == (4, 4, 2):
        return dense[..., 0] + 1j * dense[..., 1]
    if dense.shape == (4, 4):
        return dense.astype(complex)
    raise ValueError("dense states must be 4x4 with real or [re, im] entries")


def _load_rows(data, key) -> np.ndarray:
    if key not in data:
        raise ValueError(f"scenario file is missing {key!r}")
    rows = np.asarray(data[key], dtype=float)
    if rows.ndim != 2 or rows.shape[1] != 3:
        raise ValueError(f"{key} must be a list of 3-vectors")
    norms = np.linalg.norm(rows, axis=1)
    if np.any(np.abs(norms - 1.0) > _ROW_REJECT_TOL):
        raise ValueError(f"rows of {key} are not unit length (beyond {_ROW_REJECT_TOL})")
    return rows / norms[:, None]


def load_scenario(path: str) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("scenario file must hold a JSON object")
    settings = MeasurementSettings(_load_rows(data, "A"), _load_rows(data, "B"))
    m = settings.m

    def square(key):
        if key not in data:
            return None
        mat = np.asarray(data[key], dtype=float)
        if mat.shape != (m, m):
            raise ValueError(f"{key} must be {m}x{m}, got {mat.shape}")
        return mat

    state = parse_state(data["state"]) if "state" in data else None
    return Scenario(path, settings, z=square("Z"), c=square("C"), state=state)


def _resolve_scenario(args) -> Scenario:
    if getattr(args, "file", None):
        return load_scenario(args.file)
    name = getattr(args, "scenario", None) or "chsh"
    builtins = _builtin_scenarios()
    if name not in builtins:
        raise ValueError(f"unknown scenario {name!r}; built-ins: {sorted(builtins)}")
    return builtins[name]()


def _emit(args, payload: dict, csv_rows=None, text: str | None = None):
    """Write one report in the requested format.

    payload is the json document (seed and version get attached); csv_rows
    is (header, rows) for csv output; text is the human-readable block.
    """
    payload = dict(payload, seed=args.seed, version=__version__)
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    elif args.format == "csv":
        writer = csv.writer(sys.stdout)
        print(f"# corrsets {__version__} seed={args.seed}")
        header, rows = csv_rows
        writer.writerow(header)
        writer.writerows(rows)
    else:
        print(text.rstrip("\n"))


def _matrix_json(mat: np.ndarray):
    if np.iscomplexobj(mat):
        return [[[float(v.real), float(v.imag)] for v in row] for row in mat]
    return [[float(v) for v in row] for row in mat]


def _matrix_text(mat: np.ndarray, indent: str = "  ") -> str:
    if np.iscomplexobj(mat):
        return "\n".join(indent + " ".join(_fmt_complex(v) for v in row) for row in mat)
    return "\n".join(indent + " ".join(_fmt(v) for v in row) for row in mat)


def cmd_support(args) -> int:
    scenario = _resolve_scenario(args)
    s = scenario.settings
    z = scenario.coefficient()
    value = geometry.support(args.model, s, z)
    frame = s.a.T @ z @ s.b
    sv = svdvals(frame)
    sign = det_sign(frame)
    payload = {
        "command": "support",
        "model": args.model,
        "scenario": scenario.name,
        "value": value,
        "frame_singular_values": [float(x) for x in sv],
        "frame_det_sign": sign,
        "rank": s.r,
    }
    rows = (("model", "value", "s1", "s2", "s3", "det_sign", "rank"),
            [(args.model, _fmt(value), _fmt(sv[0]), _fmt(sv[1]), _fmt(sv[2]),
              _fmt(sign), s.r)])
    text = (f"support {args.model} ({scenario.name}) = {_fmt(value)}\n"
            f"frame singular values: {' '.join(_fmt(x) for x in sv)}\n"
            f"frame determinant sign: {_fmt(sign)}\n"
            f"rank r: {s.r}\n"
            f"seed={args.seed} version={__version__}")
    _emit(args, payload, rows, text)
    return 0


def cmd_gauge(args) -> int:
    scenario = _resolve_scenario(args)
    s = scenario.settings
    c = scenario.correlation()
    g = geometry.gauge(args.model, s, c)
    w = pinv(s.a) @ c @ pinv(s.b).T
    sv = svdvals(w)
    sign = det_sign(w)
    value_repr = _fmt(g.value) if g.finite else "infinite"
    payload = {
        "command": "gauge",
        "model": args.model,
        "scenario": scenario.name,
        "finite": g.finite,
        "value": g.value if g.finite else None,
        "core_singular_values": [float(x) for x in sv],
        "core_det_sign": sign,
        "rank": s.r,
    }
    rows = (("model", "value", "s1", "s2", "s3", "det_sign", "rank"),
            [(args.model, value_repr, _fmt(sv[0]), _fmt(sv[1]), _fmt(sv[2]),
              _fmt(sign), s.r)])
    text = (f"gauge {args.model} ({scenario.name}) = {value_repr}\n"
            f"core singular values: {' '.join(_fmt(x) for x in sv)}\n"
            f"core determinant sign: {_fmt(sign)}\n"
            f"rank r: {s.r}\n"
            f"seed={args.seed} version={__version__}")
    _emit(args, payload, rows, text)
    return 0


def cmd_witness(args) -> int:
    scenario = _resolve_scenario(args)
    s = scenario.settings
    state = parse_state(args.state) if args.state else scenario.state
    if state is None:
        raise ValueError("no target state: pass --state or put one in the scenario file")
    c = geometry.correlation_matrix(state, s)
    g = geometry.gauge(args.model, s, c)
    if not g.finite:
        raise ValueError("target correlation has infinite gauge; no finite witness")
    if g.value <= 0.0:
        raise ValueError("target correlation vanishes; nothing to witness")
    report = detect.witness_report(args.model, s, c)
    round_trip = float(np.sum(report.z_star * c)) / geometry.support(args.model, s, report.z_star)
    detectable = report.sensitivity > 1.0
    payload = {
        "command": "witness",
        "model": args.model,
        "scenario": scenario.name,
        "sensitivity": report.sensitivity,
        "p_crit": report.p_crit,
        "detectable": detectable,
        "round_trip": round_trip,
        "z_star": _matrix_json(report.z_star),
        "witness": _matrix_json(report.witness),
    }
    rows = (("model", "sensitivity", "p_crit", "detectable", "round_trip"),
            [(args.model, _fmt(report.sensitivity), _fmt(report.p_crit),
              str(detectable).lower(), _fmt(round_trip))])
    lines = [
        f"witness {args.model} ({scenario.name})",
        f"sensitivity (gauge) = {_fmt(report.sensitivity)}",
        f"p_crit = {_fmt(report.p_crit)}",
        "detectable: " + ("yes" if detectable else "no (sensitivity <= 1)"),
        f"round-trip Tr[Z*^T C]/phi = {_fmt(round_trip)}",
        "Z*:",
        _matrix_text(report.z_star),
        "witness operator:",
        _matrix_text(report.witness),
        f"seed={args.seed} version={__version__}",
    ]
    _emit(args, payload, rows, "\n".join(lines))
    return 0


def cmd_verify(args) -> int:
    scenario = None
    if getattr(args, "file", None) or getattr(args, "scenario", None):
        scenario = _resolve_scenario(args).settings
    report = selfcheck.run_battery(level=args.level, seed=args.seed, scenario=scenario)
    if args.format == "json":
        payload = {
            "command": "verify",
            "level": report.level,
            "ok": report.ok,
            "results": [{"name": r.name, "passed": r.passed, "instances": r.instances,
                         "worst": r.worst, "detail": r.detail} for r in report.results],
        }
        _emit(args, payload, None, None)
    else:
        print(report.render().rstrip("\n"))
    return 0 if report.ok else 1


def cmd_table1(args) -> int:
    rows = detect.table1(detect.chsh_settings(), detect.pauli_settings())
    cells = [(r.method,
              "" if r.two_setting is None else _fmt(r.two_setting),
              "" if r.three_setting is None else _fmt(r.three_setting))
             for r in rows]
    payload = {
        "command": "table1",
        "rows": [{"method": r.method, "two_setting": r.two_setting,
                  "three_setting": r.three_setting} for r in rows],
    }
    text = "\n".join(["method two_settings three_settings"]
                     + [f"{m} {t2 or '-'} {t3 or '-'}" for m, t2, t3 in cells]
                     + [f"seed={args.seed} version={__version__}"])
    _emit(args, payload, (("method", "two_settings", "three_settings"), cells), text)
    return 0


def cmd_ratios(args) -> int:
    scenario = _resolve_scenario(args)
    s = scenario.settings
    reports = [detect.containment_radius(s, pair)
               for pair in (detect.QM_OVER_SEP, detect.MAX_OVER_QM)]
    cells = [(r.pair[0] + "-over-" + r.pair[1], s.r, _fmt(r.radius)) for r in reports]
    payload = {
        "command": "ratios",
        "scenario": scenario.name,
        "rank": s.r,
        "radii": {r.pair[0] + "-over-" + r.pair[1]: r.radius for r in reports},
    }
    text = "\n".join(["pair rank radius"]
                     + [f"{p} {rank} {rad}" for p, rank, rad in cells]
                     + [f"seed={args.seed} version={__version__}"])
    _emit(args, payload, (("pair", "rank", "radius"), cells), text)
    return 0


def cmd_sweep(args) -> int:
    scenario = _resolve_scenario(args)
    s = scenario.settings
    family = twoqubit.werner_state if args.state_family == "werner" else twoqubit.tau_state
    grid = np.linspace(0.0, 1.0, args.points)
    rows = []
    for p in grid:
        c = geometry.correlation_matrix(family(float(p)), s)
        g = geometry.gauge(args.model, s, c)
        rows.append((_fmt(p), _fmt(g.value) if g.finite else "inf"))
    payload = {
        "command": "sweep",
        "scenario": scenario.name,
        "model": args.model,
        "family": args.state_family,
        "points": [{"p": float(p), "gauge": (float(v) if v != "inf" else None)}
                   for p, v in rows],
    }
    text = "\n".join(["p gauge"] + [f"{p} {v}" for p, v in rows]
                     + [f"seed={args.seed} version={__version__}"])
    _emit(args, payload, (("p", "gauge"), rows), text)
    return 0


def _add_scenario_flags(sp, required=True):
    group = sp.add_mutually_exclusive_group(required=required)
    group.add_argument("--scenario", metavar="NAME",
                       help="built-in scenario: chsh, pauli3, b-rot, i3322-opt")
    group.add_argument("--file", metavar="PATH", help="scenario file (JSON)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corrsets",
        description="correlation-set geometry for fixed two-qubit measurements")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("text", "csv", "json"), default="text")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("support", parents=[common],
                        help="support function of a correlation body")
    _add_scenario_flags(sp)
    sp.add_argument("--model", choices=geometry.MODELS, required=True)
    sp.set_defaults(func=cmd_support)

    sp = sub.add_parser("gauge", parents=[common],
                        help="gauge function of a correlation body")
    _add_scenario_flags(sp)
    sp.add_argument("--model", choices=geometry.MODELS, required=True)
    sp.set_defaults(func=cmd_gauge)

    sp = sub.add_parser("witness", parents=[common],
                        help="optimal witness for a target state")
    _add_scenario_flags(sp)
    sp.add_argument("--model", choices=("sep", "qm"), default="sep")
    sp.add_argument("--state", help="target state, e.g. werner:0.2, tau:0.5, rho_max")
    sp.set_defaults(func=cmd_witness)

    sp = sub.add_parser("verify", parents=[common],
                        help="run the verification battery")
    _add_scenario_flags(sp, required=False)
    sp.add_argument("--level", choices=selfcheck.LEVELS, default="quick")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("table1", parents=[common], help="critical-noise table")
    sp.set_defaults(func=cmd_table1)

    sp = sub.add_parser("ratios", parents=[common],
                        help="containment radii of the nested bodies")
    _add_scenario_flags(sp)
    sp.set_defaults(func=cmd_ratios)

    sp = sub.add_parser("sweep", parents=[common], help="gauge along a noise family")
    _add_scenario_flags(sp)
    sp.add_argument("--model", choices=geometry.MODELS, required=True)
    sp.add_argument("--state", dest="state_family", choices=("werner", "tau"),
                    default="werner")
    sp.add_argument("--points", type=int, default=21)
    sp.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
