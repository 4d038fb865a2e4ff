"""Command-line front end: hourly runs, model export and heuristic/MILP comparison.

    nfvcache run --scenario scenarios/full.ini --hours 0-23 --out results/
    nfvcache export --scenario scenarios/reduced.ini --hours 19 --out models/
    nfvcache compare --scenario scenarios/reduced.ini --inter-traffic 0.1

Every CSV starts with a ``# nfvcache <table> v<N>`` line naming its schema.
Nothing depends on the environment or the clock, so identical arguments give
byte-identical files.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .heuristic import HeuristicOptions, PlacementInfeasible, placement_summary
from .heuristic import run as run_heuristic
from .milp import build_formulation, check_solution, decode_solution, encode_solution
from .milp.io import build_report_text, emit_lp, emit_mps
from .power import CATEGORIES, eval_total
from .scenario import Scenario, draw_cell_loads, load_scenario
from .solver import solve_milp
from .solver.bnb import MILP_FEASIBLE_GAP, MILP_OPTIMAL
from .topology import Topology, build_paper_topology, topology_from_section

SCHEMA_VERSION = 1
APPROACHES = ("integrated", "virt-only", "caching-only")
ENGINES = ("heuristic", "milp", "both")
POWER_COLUMNS = ("hour", "approach", "engine") + CATEGORIES + ("total",)
PLACEMENT_COLUMNS = ("hour", "approach", "engine", "node", "vm_servers", "cache_percent")
SAVINGS_COLUMNS = ("hour", "engine", "comparison", "saving_percent")
COMPARE_COLUMNS = ("hour", "approach", "heuristic", "milp", "bound", "gap_percent", "status")
SAVING_PAIRS = (("integrated", "virt-only"), ("integrated", "caching-only"),
                ("virt-only", "caching-only"))
FEASIBILITY_TOL = 1e-6


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    scenario_path: Path
    scenario: Scenario
    topology: Topology
    approaches: tuple[str, ...]
    hours: tuple[int, ...]
    seed: int
    engine: str
    inter_traffic_fraction: float
    out: Path
    gap_tol: float = 1e-4
    node_limit: int = 100_000


@dataclass
class Outcome:
    hour: int
    approach: str
    engine: str
    breakdown: object
    solution: object
    violations: int = 0
    status: str = "ok"
    bound: float = math.nan
    trace: object = None


# -- configuration ------------------------------------------------------------

def parse_hours(text: str) -> tuple[int, ...]:
    """``"0-23"``, ``"3"`` or ``"1,7,13-15"`` as a sorted tuple of hours."""
    hours = set()
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            a, b = (int(v) for v in part.split("-", 1))
            hours.update(range(a, b + 1))
        else:
            hours.add(int(part))
    if not hours:
        raise ConfigError("no hours selected")
    if min(hours) < 0 or max(hours) > 23:
        raise ConfigError("hours must lie in 0..23")
    return tuple(sorted(hours))


def parse_approaches(text: str) -> tuple[str, ...]:
    if text == "all":
        return APPROACHES
    picked = tuple(a.strip() for a in text.split(",") if a.strip())
    bad = [a for a in picked if a not in APPROACHES]
    if bad or not picked:
        raise ConfigError(f"unknown approach {', '.join(bad) or text!r}")
    return tuple(a for a in APPROACHES if a in picked)


def make_config(args: argparse.Namespace) -> RunConfig:
    try:
        if args.scenario:
            scenario, cp = load_scenario(args.scenario)
        else:
            scenario, cp = Scenario(), configparser.ConfigParser()
        run = cp["run"] if cp.has_section("run") else {}
        if cp.has_section("topology"):
            topology = topology_from_section(dict(cp["topology"]), scenario.power.span_km)
        else:
            topology = build_paper_topology()
        approaches = parse_approaches(args.approach or run.get("approach", "all"))
        hours = parse_hours(args.hours or run.get("hours", "0-23"))
        seed = args.seed if args.seed is not None else scenario.seed
        frac = (args.inter_traffic if args.inter_traffic is not None
                else scenario.inter_traffic_fraction)
        engine = args.engine or run.get("engine", "heuristic")
    except (OSError, KeyError, ValueError, configparser.Error) as exc:
        raise ConfigError(str(exc)) from exc
    if engine not in ENGINES:
        raise ConfigError(f"unknown engine {engine!r}")
    if not 0 <= frac <= 1:
        raise ConfigError("inter-traffic fraction must be in [0, 1]")
    if not args.gap_tol >= 0 or args.node_limit < 1:
        raise ConfigError("gap tolerance must be >= 0 and node limit >= 1")
    scenario = scenario.replace(seed=seed, inter_traffic_fraction=frac)
    return RunConfig(Path(args.scenario) if args.scenario else Path("-"), scenario, topology,
                     approaches, hours, seed, engine, frac, Path(args.out),
                     args.gap_tol, args.node_limit)


# -- solving ------------------------------------------------------------------

def _solve(cfg: RunConfig, hour: int, approach: str, engine: str) -> Outcome:
    sc, topo = cfg.scenario, cfg.topology
    demand = draw_cell_loads(sc.profile, hour, cfg.seed, topo, sc.radio)
    model = build_formulation(sc, topo, approach, demand)
    if engine == "heuristic":
        sol, trace = run_heuristic(sc, topo, demand, HeuristicOptions(approach=approach))
        status, bound = "ok", math.nan
    else:
        res = solve_milp(model, gap_tol=cfg.gap_tol, node_limit=cfg.node_limit)
        if not res.has_solution:
            return Outcome(hour, approach, engine, None, None, status=res.status)
        sol, trace = decode_solution(model, res.values), None
        status, bound = res.status, res.bound
    violations = check_solution(model, encode_solution(model, sol), FEASIBILITY_TOL)
    pb = eval_total(sol, sc, topo)
    return Outcome(hour, approach, engine, pb, sol, len(violations), status, bound, trace)


def _engines(engine: str) -> tuple[str, ...]:
    return ("heuristic", "milp") if engine == "both" else (engine,)


def _outcome_ok(o: Outcome) -> bool:
    return o.breakdown is not None and o.violations == 0 and o.status in ("ok", MILP_OPTIMAL,
                                                                          MILP_FEASIBLE_GAP)


# -- writing ------------------------------------------------------------------

def _fmt(v) -> str:
    return f"{v:.6f}" if isinstance(v, float) else str(v)


def _table(name: str, columns, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# nfvcache {name} v{SCHEMA_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _write_all(files: dict[Path, str]) -> None:
    """Write every file through a temporary name and an atomic rename."""
    for path, text in files.items():
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(text)
        os.replace(tmp, path)


def power_row(o: Outcome) -> list:
    cats = o.breakdown.as_dict()
    values = [cats[c] for c in CATEGORIES]
    total = o.breakdown.total
    if abs(math.fsum(values) - total) > 1e-6:
        raise RuntimeError(f"hour {o.hour} {o.approach}: categories do not add up to the total")
    return [o.hour, o.approach, o.engine] + values + [total]


def savings_rows(outcomes: list[Outcome]) -> list[list]:
    """Percent saving of the first approach of each pair over the second, per
    hour and engine, plus a daily mean row (hour ``mean``)."""
    tpc = {(o.hour, o.engine, o.approach): o.breakdown.total for o in outcomes if o.breakdown}
    rows, per = [], {}
    for hour, engine in sorted({(h, e) for h, e, _ in tpc}):
        for a, b in SAVING_PAIRS:
            if (hour, engine, a) in tpc and (hour, engine, b) in tpc:
                s = 100 * (tpc[(hour, engine, b)] - tpc[(hour, engine, a)]) / tpc[(hour, engine, b)]
                rows.append([hour, engine, f"{a}_vs_{b}", s])
                per.setdefault((engine, f"{a}_vs_{b}"), []).append(s)
    for (engine, name), vals in sorted(per.items()):
        rows.append(["mean", engine, name, math.fsum(vals) / len(vals)])
    return rows


def cmd_run(cfg: RunConfig, err=None) -> int:
    err = err or sys.stderr
    outcomes = []
    for hour in cfg.hours:
        for approach in cfg.approaches:
            for engine in _engines(cfg.engine):
                try:
                    outcomes.append(_solve(cfg, hour, approach, engine))
                except PlacementInfeasible as exc:
                    print(f"hour {hour} {approach}: {exc}", file=err)
                    outcomes.append(Outcome(hour, approach, engine, None, None, status="infeasible"))
    good = [o for o in outcomes if o.breakdown is not None]
    placement = []
    for o in good:
        for node, (vm, cache) in sorted(placement_summary(o.solution, cfg.topology).items()):
            placement.append([o.hour, o.approach, o.engine, node.label, vm, cache])
    files = {
        cfg.out / "power.csv": _table("power", POWER_COLUMNS, [power_row(o) for o in good]),
        cfg.out / "placement.csv": _table("placement", PLACEMENT_COLUMNS, placement),
        cfg.out / "savings.csv": _table("savings", SAVINGS_COLUMNS, savings_rows(good)),
    }
    for o in good:
        if o.trace is not None:
            files[cfg.out / "traces" / f"h{o.hour:02d}_{o.approach}.json"] = o.trace.to_text()
    _write_all(files)
    failed = [o for o in outcomes if not _outcome_ok(o)]
    for o in failed:
        print(f"hour {o.hour} {o.approach} {o.engine}: status {o.status}, "
              f"{o.violations} constraint violations", file=err)
    return 1 if failed else 0


def export_name(hour: int, approach: str, seed: int) -> str:
    return f"h{hour:02d}_{approach}_s{seed}"


def cmd_export(cfg: RunConfig, err=None) -> int:
    sc, topo = cfg.scenario, cfg.topology
    files = {}
    for hour in cfg.hours:
        demand = draw_cell_loads(sc.profile, hour, cfg.seed, topo, sc.radio)
        for approach in cfg.approaches:
            model = build_formulation(sc, topo, approach, demand)
            model.name = export_name(hour, approach, cfg.seed)
            stem = cfg.out / model.name
            files[stem.with_suffix(".mps")] = emit_mps(model)
            files[stem.with_suffix(".lp")] = emit_lp(model)
            files[stem.with_suffix(".report.txt")] = build_report_text(model)
    _write_all(files)
    return 0


def cmd_compare(cfg: RunConfig, out=None, err=None) -> int:
    """Heuristic against the MILP per hour; gaps are measured against the MILP
    incumbent, or against its bound (flagged) when the search stopped early."""
    out, err = out or sys.stdout, err or sys.stderr
    rows, gaps, code = [], {}, 0
    for hour in cfg.hours:
        for approach in cfg.approaches:
            h = _solve(cfg, hour, approach, "heuristic")
            m = _solve(cfg, hour, approach, "milp")
            if not (_outcome_ok(h) and m.breakdown is not None):
                print(f"hour {hour} {approach}: heuristic {h.status}/{h.violations} "
                      f"violations, MILP {m.status}", file=err)
                code = 1
                continue
            ref, status = m.breakdown.total, "optimal"
            if m.status != MILP_OPTIMAL:
                ref, status = m.bound, f"flagged:{m.status}"
            gap = 100 * (h.breakdown.total - ref) / ref
            rows.append([hour, approach, h.breakdown.total, m.breakdown.total, m.bound, gap, status])
            gaps.setdefault(approach, []).append(gap)
            if m.violations:
                code = 1
    _write_all({cfg.out / "compare.csv": _table("compare", COMPARE_COLUMNS, rows)})
    for approach, vals in gaps.items():
        print(f"{approach}: max gap {max(vals):.3f}%  mean gap {math.fsum(vals) / len(vals):.3f}%"
              f"  over {len(vals)} hours", file=out)
    return code


def cmd_report(cfg: RunConfig, out=None) -> int:
    """Print the heuristic trace of every selected hour and approach."""
    out = out or sys.stdout
    sc, topo = cfg.scenario, cfg.topology
    for hour in cfg.hours:
        demand = draw_cell_loads(sc.profile, hour, cfg.seed, topo, sc.radio)
        for approach in cfg.approaches:
            _, trace = run_heuristic(sc, topo, demand, HeuristicOptions(approach=approach))
            out.write(f"# hour {hour} {approach}\n{trace.to_text()}")
    return 0


# -- entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nfvcache", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext, default_out in (
            ("run", "solve hours and write power/placement/savings CSVs", "results"),
            ("export", "write MPS, LP and build report per hour and approach", "models"),
            ("compare", "heuristic against the MILP, per hour gap", "compare"),
            ("report", "print heuristic traces", "results")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--scenario", help="scenario file (INI); built-in defaults when omitted")
        p.add_argument("--approach", help="integrated, virt-only, caching-only, a comma list or all")
        p.add_argument("--hours", help="hours, e.g. 0-23 or 1,7,19")
        p.add_argument("--seed", type=int, help="cell-load draw seed")
        p.add_argument("--engine", help="heuristic, milp or both (run only)")
        p.add_argument("--inter-traffic", type=float, dest="inter_traffic",
                       help="share of backhaul exchanged between CNVMs, 0..1")
        p.add_argument("--out", default=default_out, help="output directory")
        p.add_argument("--gap-tol", type=float, default=1e-4, dest="gap_tol",
                       help="relative MILP optimality gap")
        p.add_argument("--node-limit", type=int, default=100_000, dest="node_limit",
                       help="branch-and-bound node limit")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = make_config(args)
    except ConfigError as exc:
        print(f"nfvcache: {exc}", file=sys.stderr)
        return 2
    if args.command == "run":
        return cmd_run(cfg)
    if args.command == "export":
        return cmd_export(cfg)
    if args.command == "compare":
        return cmd_compare(cfg)
    return cmd_report(cfg)


if __name__ == "__main__":
    sys.exit(main())
