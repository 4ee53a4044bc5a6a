"""Command line entry point: ``redfield {simulate,fig1,choi,sweep}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .config import (
    Scenario,
    fmt,
    load_entries,
    parse_text,
    scenario_from_entries,
    sweep_axes,
    sweep_points,
    tool_version,
)
from .diagnostics import (
    TrajectoryFindings,
    analyze,
    check_resolution,
    choi_at,
    cp_divisibility_scan,
    scan_trajectory,
)
from .entanglement import concurrence, concurrence_slope_zero_T
from .errors import ConfigError, RedfieldError, ResolutionError, WrongRegimeError

log = logging.getLogger("redfield")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RESOLUTION = 3

SERIES_COLUMNS = ("t", "concurrence", "mutual_info", "choi_min_eig", "minor1", "minor2", "diag_min", "r03_t")

FIG1_CONFIG = """\
# reference scenario: rates as fractions of omega, time in units of 1/omega
mode = redfield
bath.a = 0.005
bath.b = 0.05
bath.alpha = 0.001
bath.gamma = 0.001
bath.w_over_gamma = 0.5
initial.mu = 0.025
initial.nu = 0.1
initial.u = 0.02
initial.v = 0.125
grid.t_max = 200
"""


def _write_csv(path: Path, header, rows) -> None:
    with path.open("w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if x is None:
        return "nan"
    return fmt(float(x))


def write_series(path: Path, series) -> None:
    cols = [np.asarray(getattr(series, name)) for name in SERIES_COLUMNS]
    rows = ([_cell(col[i]) for col in cols] for i in range(len(series)))
    _write_csv(path, SERIES_COLUMNS, rows)


def findings_dict(f: TrajectoryFindings) -> dict:
    return {
        "n_cycles": f.n_cycles,
        "death_time": f.death_time,
        "t_cp": f.t_cp,
        "t_cp_uncertainty": f.t_cp_uncertainty,
        "increase_intervals": [list(iv) for iv in f.increase_intervals],
        "maxima_times": f.maxima_times,
        "mi_violations": f.mi_violations,
    }


def format_report(scenario: Scenario, findings: TrajectoryFindings, command: str) -> str:
    def opt(x):
        return "none" if x is None else fmt(x)

    lines = [
        f"# redfield {tool_version()} :: {command}",
        "#",
        "# findings",
        f"#   n_cycles = {findings.n_cycles}",
        f"#   death_time = {opt(findings.death_time)}",
        f"#   t_cp = {opt(findings.t_cp)} (grid-resolved, +/- {fmt(findings.t_cp_uncertainty)})",
        f"#   increase_intervals = {len(findings.increase_intervals)}",
    ]
    lines += [f"#     [{fmt(a)}, {fmt(b)}]" for a, b in findings.increase_intervals]
    lines.append(f"#   mi_violations_after_t_cp = {len(findings.mi_violations)}")
    if findings.mi_violations:
        lines.append(f"#     first at t = {fmt(findings.mi_violations[0])}")
    p = scenario.effective_params
    lines += [
        "#",
        f"# effective generator rates ({scenario.mode}): a = {fmt(p.a)}, b = {fmt(p.b)}, "
        f"alpha = {fmt(p.alpha)}, gamma = {fmt(p.gamma)}, w = {fmt(p.w)}",
        f"# grid: {scenario.n_samples} samples on [0, {fmt(scenario.t_max)}], "
        f"step = {fmt(scenario.t_max / (scenario.n_samples - 1))}",
        "#",
        "# resolved scenario; this file is itself a valid --config",
    ]
    lines += [f"{k} = {v}" for k, v in scenario.resolved_entries()]
    return "\n".join(lines) + "\n"


def _apply_overrides(entries: dict, args) -> dict:
    entries = dict(entries)
    if getattr(args, "grid", None) is not None:
        entries["grid.n_samples"] = str(args.grid)
    if getattr(args, "tol_psd", None) is not None:
        entries["tol.psd"] = fmt(args.tol_psd)
    return entries


def run_simulation(scenario: Scenario, out: Path, command: str = "simulate") -> TrajectoryFindings:
    if scenario.initial is None:
        raise ConfigError("simulate needs an initial state (initial.* keys)")
    series = scan_trajectory(scenario.initial, scenario.effective_params, scenario.grid())
    tol = scenario.tolerances
    findings = analyze(series, rise=tol["rise"], alive=tol["alive"], psd_tol=tol["psd"])
    out.mkdir(parents=True, exist_ok=True)
    write_series(out / "series.csv", series)
    (out / "report.txt").write_text(format_report(scenario, findings, command))
    (out / "findings.json").write_text(json.dumps(findings_dict(findings), indent=2) + "\n")
    log.info("wrote %d samples to %s", len(series), out)
    return findings


def cmd_simulate(args) -> int:
    entries = _apply_overrides(load_entries(args.config), args)
    scenario = scenario_from_entries(entries, base_dir=Path(args.config).parent)
    run_simulation(scenario, Path(args.out))
    return EXIT_OK


def cmd_fig1(args) -> int:
    scenario = scenario_from_entries(_apply_overrides(parse_text(FIG1_CONFIG), args))
    f = run_simulation(scenario, Path(args.out), command="fig1")
    print(f"n_cycles = {f.n_cycles}, death_time = {f.death_time}, t_cp = {f.t_cp}")
    return EXIT_OK


def cmd_choi(args) -> int:
    entries = _apply_overrides(load_entries(args.config), args)
    scenario = scenario_from_entries(entries, base_dir=Path(args.config).parent)
    params = scenario.effective_params
    check_resolution(params, scenario.grid())
    tol = scenario.tolerances["psd"]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for t in scenario.grid():
        rep = choi_at(params, t, tol=tol)
        rows.append([_cell(t)] + [_cell(e) for e in rep.spectrum] + [_cell(rep.is_cp)])
    _write_csv(out / "choi.csv", ("t", "eig1", "eig2", "eig3", "eig4", "is_cp"), rows)
    if args.divisibility:
        scan = cp_divisibility_scan(params, scenario.taus())
        _write_csv(
            out / "divisibility.csv",
            ("tau", "min_eig", "is_cp"),
            ([_cell(tau), _cell(m), _cell(m >= -tol)] for tau, m in scan),
        )
    return EXIT_OK


def cmd_sweep(args) -> int:
    base = _apply_overrides(load_entries(args.config), args)
    base_dir = Path(args.config).parent
    points = sweep_points(base)
    names = [name for name, _ in sweep_axes(base)]
    base = {k: v for k, v in base.items() if not k.startswith("sweep.")}

    # validate every grid point before computing any of them
    scenarios = []
    for point in points:
        entries = dict(base)
        entries.update({k: fmt(v) for k, v in point.items()})
        try:
            scenarios.append(scenario_from_entries(entries, base_dir=base_dir))
        except RedfieldError as exc:
            raise type(exc)(f"sweep point {point}: {exc}") from None

    header = list(names) + ["initial_concurrence", "slope", "has_increase", "death_time"]
    rows = []
    for point, sc in zip(points, scenarios):
        if sc.initial is None:
            raise ConfigError("sweep needs an initial state (initial.* keys)")
        params = sc.effective_params
        series = scan_trajectory(sc.initial, params, sc.grid(), full=False)
        f = analyze(series, rise=sc.tolerances["rise"], alive=sc.tolerances["alive"], psd_tol=sc.tolerances["psd"])
        slope = None
        if sc.family is not None and sc.family.v != 0.0:
            try:
                slope = concurrence_slope_zero_T(params, sc.family)
            except WrongRegimeError:
                slope = None
        rows.append(
            [_cell(point[n]) for n in names]
            + [_cell(concurrence(sc.initial)), _cell(slope), _cell(bool(f.increase_intervals)), _cell(f.death_time)]
        )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "sweep.csv", header, rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="redfield", description="Redfield vs Davies qubit dynamics diagnostics")
    parser.add_argument("--version", action="version", version=f"%(prog)s {tool_version()}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="scenario file (key = value)")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--tol-psd", type=float, dest="tol_psd", help="Choi PSD slack")
        p.add_argument("--grid", type=int, help="number of time samples")

    p = sub.add_parser("simulate", help="scan one scenario, write series.csv and report.txt")
    common(p)
    p.set_defaults(func=cmd_simulate)
    p = sub.add_parser("fig1", help="run the built-in reference scenario")
    common(p, config=False)
    p.set_defaults(func=cmd_fig1)
    p = sub.add_parser("choi", help="Choi spectrum along the grid, write choi.csv")
    common(p)
    p.add_argument("--divisibility", action="store_true", help="also scan intermediate maps")
    p.set_defaults(func=cmd_choi)
    p = sub.add_parser("sweep", help="grid over parameters, write sweep.csv")
    common(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except ResolutionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOLUTION
    except (RedfieldError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
