"""Command-line front end.

Subcommands: solve, sweep, fleet, netopt, report.  Exit codes:
0 success, 2 usage error, 3 input validation error, 4 infeasible or
unbounded model, 5 file I/O error.

COPLANT_WORKERS sets the process count for fleet runs (default 1).
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

from coplant import configio, costing, dispatch, reports
from coplant.domain import Commodity, DomainError
from coplant.lp import LpStatusError, LpValidationError
from coplant.sinknet.network import (
    NetworkInfeasible,
    select_network,
)
from coplant.sinknet.raster import RasterFormatError, load_raster
from coplant.sinknet.routing import SinkNode, SourceNode, build_candidates

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_INFEASIBLE = 4
EXIT_IO = 5


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO) from None


def _load_scenario(path: str):
    return configio.parse_scenario(_read(path), source=path)


def _load_system(path: str, horizon: int):
    return configio.parse_system(_read(path), horizon,
                                 base_dir=Path(path).parent, source=path)


def _out_dir(path: str) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create output directory {path}: {exc}", EXIT_IO)
    return out


def _write_solution_reports(out: Path, spec, scenario, sol) -> None:
    breakdown = costing.cost_breakdown(sol, spec, scenario)
    reports.write_cost_breakdown_csv(out / "cost_breakdown.csv", breakdown)
    reports.write_electricity_allocation_csv(
        out / "electricity_allocation.csv", breakdown)
    reports.write_molecule_costs_csv(
        out / "molecule_costs.csv", costing.molecule_costs(sol, spec, scenario))
    reports.write_hourly_balances_csv(out / "hourly_balances.csv", spec, scenario, sol)
    reports.write_storage_cycles_csv(
        out / "storage_cycles.csv", costing.storage_cycle_counts(sol))

    metrics = costing.bundle_metrics(sol, spec, scenario)
    metrics["abatement_cost"] = costing.solution_abatement_cost(sol, spec, scenario)
    metrics["emission_reduction"] = costing.emission_reduction(sol, spec, scenario)
    reports._write_rows(out / "metrics.csv", ["metric", "value"],
                        [[k, float(v)] for k, v in sorted(metrics.items())])

    (out / "cost_waterfall.svg").write_text(reports.waterfall_svg(breakdown))
    if sol.horizon % 24 == 0:
        for uid, series in sorted(sol.activity.items()):
            (out / f"heatmap_{uid}.svg").write_text(
                reports.heatmap_svg(series, f"{uid} activity"))


def cmd_solve(args) -> int:
    scenario = _load_scenario(args.scenario)
    spec = _load_system(args.system, scenario.horizon_hours)
    out = _out_dir(args.out)
    if args.mps:
        from coplant.mps import export_lp
        lp = dispatch.build_lp(spec, scenario)
        Path(args.mps).write_text(export_lp(lp, rename=True))
    sol = dispatch.solve_dispatch(spec, scenario)
    reports.save_solution(out / "solution.json", sol)
    _write_solution_reports(out, spec, scenario, sol)
    print(f"objective {sol.objective:.6g} $/yr; reports in {out}")
    return EXIT_OK


def cmd_report(args) -> int:
    scenario = _load_scenario(args.scenario)
    spec = _load_system(args.system, scenario.horizon_hours)
    try:
        sol = reports.load_solution(args.solution)
    except OSError as exc:
        raise CliError(f"cannot read {args.solution}: {exc}", EXIT_IO) from None
    out = _out_dir(args.out)
    _write_solution_reports(out, spec, scenario, sol)
    print(f"reports regenerated in {out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    scenario = _load_scenario(args.scenario)
    spec = _load_system(args.system, scenario.horizon_hours)
    try:
        x_values = [float(v) for v in args.x.split(",") if v.strip()]
    except ValueError:
        raise CliError(f"bad --x list: {args.x!r}", EXIT_USAGE) from None
    if not x_values:
        raise CliError("--x needs at least one value", EXIT_USAGE)
    out = _out_dir(args.out)
    rows = costing.sweep_stoichiometry(spec, scenario, x_values)
    reports.write_sweep_csv(out / "stoichiometry_sweep.csv", rows)
    feasible = [(r.x, r.abatement) for r in rows if r.feasible]
    if len(feasible) >= 2:
        (out / "sweep_abatement.svg").write_text(reports.curves_svg(
            {"abatement": feasible}, "abatement cost vs cement:methanol ratio",
            x_label="t cement per t methanol", y_label="$/t CO2"))
    print(f"swept {len(rows)} ratios; {sum(r.feasible for r in rows)} feasible")
    return EXIT_OK


def cmd_fleet(args) -> int:
    from coplant import fleet as fleet_mod
    scenario = _load_scenario(args.scenario)
    template = _load_system(args.system, scenario.horizon_hours)
    try:
        plants = fleet_mod.load_plants(args.plants)
    except FileNotFoundError as exc:
        raise CliError(str(exc), EXIT_IO) from None
    workers = int(os.environ.get("COPLANT_WORKERS", "1"))
    out = _out_dir(args.out)
    result = fleet_mod.run_fleet(plants, template, scenario, args.profiles,
                                 workers=workers)
    reports.write_fleet_results_csv(out / "fleet_results.csv", result)
    reports.write_cost_capacity_curve_csv(out / "cost_capacity_curve.csv",
                                          result.curve)
    if result.curve:
        (out / "cost_capacity_curve.svg").write_text(reports.curves_svg(
            {"fleet": result.curve}, "fleet cost-capacity curve",
            x_label="cumulative t cement/yr", y_label="$/t CO2"))
    if args.sensitivity:
        sens = fleet_mod.sensitivity_sweep(plants, template, scenario, args.profiles)
        reports.write_sensitivity_csv(out / "sensitivity_curves.csv", sens)
        (out / "sensitivity_curves.svg").write_text(reports.curves_svg(
            {"baseline": sens.baseline, **sens.curves},
            "capex sensitivity", x_label="cumulative t cement/yr",
            y_label="$/t CO2"))
    failures = sum(1 for r in result.per_plant if r.error)
    print(f"fleet: {len(result.per_plant)} plants, {failures} failed")
    return EXIT_OK


def _load_nodes(path: str, kind: str):
    try:
        with Path(path).open(newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO) from None
    nodes = []
    for i, row in enumerate(rows, start=2):
        try:
            if kind == "source":
                nodes.append(dict(id=row["id"], row=int(row["row"]),
                                  col=int(row["col"]),
                                  amount=float(row["capturable"]),
                                  cost=float(row["capture_cost"])))
            else:
                nodes.append(dict(id=row["id"], row=int(row["row"]),
                                  col=int(row["col"]),
                                  amount=float(row["capacity"]),
                                  cost=float(row["sequestration_cost"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise CliError(f"{path}:{i}: bad {kind} row: {exc}",
                           EXIT_VALIDATION) from None
    return nodes


def cmd_netopt(args) -> int:
    try:
        surface = load_raster(args.surface)
    except OSError as exc:
        raise CliError(f"cannot read {args.surface}: {exc}", EXIT_IO) from None
    sources = [SourceNode(id=n["id"], cell=surface.index(n["row"], n["col"]),
                          capturable=n["amount"], eq_capture_cost=n["cost"])
               for n in _load_nodes(args.sources, "source")]
    sinks = [SinkNode(id=n["id"], cell=surface.index(n["row"], n["col"]),
                      capacity=n["amount"], sequestration_cost=n["cost"])
             for n in _load_nodes(args.sinks, "sink")]
    edges, report = build_candidates(surface, sources, sinks)
    if not report.ok:
        print(f"warning: unreachable sources {report.unreachable_sources}, "
              f"sinks {report.unreachable_sinks}", file=sys.stderr)
    sol = select_network(sources, sinks, edges, args.target, method=args.method)
    out = _out_dir(args.out)
    reports.write_network_csv(out / "network.csv", sol)
    reports.write_network_paths_csv(out / "network_paths.csv", sol, surface)
    (out / "network.svg").write_text(
        reports.network_svg(sol, surface, sources=sources, sinks=sinks))
    print(f"network: {len(sol.routes)} routes, "
          f"{sol.cost_per_tonne:.4g} $/t, reports in {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coplant",
        description="planning toolkit for renewable cement-methanol co-production")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--spec", "--system", dest="system", required=True,
                       help="system config file")
        p.add_argument("--scenario", required=True, help="scenario config file")
        p.add_argument("-o", "--out", dest="out", required=True,
                       help="output directory")

    p = sub.add_parser("solve", help="size and dispatch one plant")
    common(p)
    p.add_argument("--mps", help="also export the LP in MPS format to this path")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="sweep the cement:methanol ratio")
    common(p)
    p.add_argument("--x", required=True,
                   help="comma-separated list of ratios, e.g. 2.77,5,9.76")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fleet", help="batch-optimize a fleet of plant sites")
    common(p)
    p.add_argument("--plants", required=True, help="plants CSV")
    p.add_argument("--profiles", required=True, help="directory of profile CSVs")
    p.add_argument("--sensitivity", action="store_true",
                   help="also run +/-20%% capex sensitivity curves")
    p.set_defaults(func=cmd_fleet)

    p = sub.add_parser("netopt", help="select a source-sink CO2 network")
    p.add_argument("--surface", required=True, help="ESRI ASCII cost raster")
    p.add_argument("--sources", required=True, help="sources CSV")
    p.add_argument("--sinks", required=True, help="sinks CSV")
    p.add_argument("--target", required=True, type=float,
                   help="t CO2/yr to sequester")
    p.add_argument("--method", default="auto",
                   choices=["auto", "exact", "heuristic"])
    p.add_argument("-o", "--out", dest="out", required=True,
                   help="output directory")
    p.set_defaults(func=cmd_netopt)

    p = sub.add_parser("report", help="regenerate reports from a saved solution")
    common(p)
    p.add_argument("--solution", required=True, help="solution.json from solve")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (dispatch.StructuralInfeasibility, LpStatusError,
            NetworkInfeasible) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (configio.ConfigError, DomainError, LpValidationError,
            RasterFormatError, reports.ReportError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
