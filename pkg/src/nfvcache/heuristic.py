"""Greedy placement of BBUVMs, CNVMs, the video server and caches, with routing.

The search works on a :class:`Plan` (who hosts what) and scores candidates
from aggregated link and node loads; only the final plan is expanded into a
full :class:`~nfvcache.solution.Solution` with every model variable set, so
it can be checked against the MILP row by row.
"""

from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .milp.formulation import big_m
from .milp.piecewise import PiecewiseSegments, build_piecewise_segments
from .power import PowerBreakdown, server_power
from .scenario import (CnvmInterTrafficSpec, DemandSet, Scenario, bbuvm_workload,
                       cnvm_inter_traffic, core_pairs)
from .solution import Solution
from .topology import Kind, NodeId, PathNotFound, Topology

LAYERS = ("olt", "core", "cell")
FRACTION_EPS = 1e-6


class PlacementInfeasible(RuntimeError):
    pass


@dataclass(frozen=True)
class HeuristicOptions:
    approach: str = "integrated"
    bbuvm_layer: str = "auto"     # "olt", "core", "cell" or "auto" (olt and core, cheaper kept)
    cnvm_mode: str = "auto"       # "core" sweep, "colocated" with BBUVMs, or "auto"
    cache_layer: str = "rule"     # "rule", "threshold", "core", "olt", "hosts" or "auto"
    delta_step: float = 0.01
    max_delta_passes: int = 3
    local_search: bool = True     # re-home whole OLT groups between OLT and core


@dataclass
class Plan:
    bbu_host: dict = field(default_factory=dict)        # rrh -> host
    cnvm_hosts: tuple = ()
    backhaul_src: dict = field(default_factory=dict)    # bbu host -> cnvm host
    server: NodeId | None = None
    caches: dict = field(default_factory=dict)          # cache node -> hit ratio
    cache_of: dict = field(default_factory=dict)        # rrh -> cache node

    def copy(self) -> "Plan":
        return Plan(dict(self.bbu_host), tuple(self.cnvm_hosts), dict(self.backhaul_src),
                    self.server, dict(self.caches), dict(self.cache_of))


@dataclass
class HeuristicTrace:
    approach: str = ""
    bbu_layer: str = ""
    bbu_host: dict = field(default_factory=dict)
    candidates: dict = field(default_factory=dict)
    popularity: list = field(default_factory=list)
    cnvm_mode: str = ""
    cnvm_tpc: list = field(default_factory=list)
    cnvm_count: int = 0
    cache_layer: str = ""
    cache_tpc: list = field(default_factory=list)
    cache_count: int = 0
    cache_hit_ratio: dict = field(default_factory=dict)
    group_moves: list = field(default_factory=list)
    server: str = ""
    total: float = math.nan

    def to_dict(self) -> dict:
        return {
            "approach": self.approach,
            "bbu_layer": self.bbu_layer,
            "bbu_host": {str(r): str(h) for r, h in sorted(self.bbu_host.items())},
            "candidates": {k: round(v, 9) for k, v in sorted(self.candidates.items())},
            "popularity": [str(n) for n in self.popularity],
            "cnvm_mode": self.cnvm_mode,
            "cnvm_tpc": [round(v, 9) for v in self.cnvm_tpc],
            "cnvm_count": self.cnvm_count,
            "cache_layer": self.cache_layer,
            "cache_tpc": [round(v, 9) for v in self.cache_tpc],
            "cache_count": self.cache_count,
            "cache_hit_ratio": {str(u): d for u, d in sorted(self.cache_hit_ratio.items())},
            "group_moves": [[str(o), round(v, 9)] for o, v in self.group_moves],
            "server": self.server,
            "total": round(self.total, 9),
        }

    def to_text(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"


class _Context:
    """Per-run constants: demand, parameters and memoised downstream paths."""

    def __init__(self, scenario: Scenario, topology: Topology, demand: DemandSet,
                 nabla: CnvmInterTrafficSpec, segments: PiecewiseSegments):
        self.sc, self.topo, self.demand, self.nabla, self.seg = scenario, topology, demand, nabla, segments
        self.p = scenario.power
        self.alpha = self.p.backhaul_ratio
        self.big_m = big_m(demand, scenario, nabla)
        self._paths: dict = {}
        self._hops: dict = {}

    def path(self, x: NodeId, y: NodeId) -> list[tuple[NodeId, NodeId]]:
        key = (x, y)
        if key not in self._paths:
            nodes = self.topo.shortest_path(x, y, downstream=True)
            self._paths[key] = list(zip(nodes, nodes[1:]))
        return self._paths[key]

    def reach(self, x: NodeId, y: NodeId) -> int | None:
        """Downstream hop count from x to y, None when unreachable."""
        if x == y:
            return 0
        if (x, y) not in self._hops:
            try:
                self._hops[(x, y)] = len(self.path(x, y))
            except PathNotFound:
                self._hops[(x, y)] = None
        return self._hops[(x, y)]


def make_context(scenario: Scenario, topology: Topology, demand: DemandSet,
                 nabla: CnvmInterTrafficSpec | None = None,
                 segments: PiecewiseSegments | None = None) -> _Context:
    if nabla is None:
        nabla = cnvm_inter_traffic(scenario.inter_traffic_fraction, demand, core_pairs(topology),
                                   scenario.power.backhaul_ratio)
    if segments is None:
        segments = build_piecewise_segments(scenario.cache.zipf_exponent,
                                            scenario.cache.catalog_size, scenario.cache.segments)
    return _Context(scenario, topology, demand, nabla, segments)


# -- power of a plan -------------------------------------------------------------

def _split(value: float) -> tuple[int, float]:
    i = math.floor(value)
    f = value - i
    if f > 1 - FRACTION_EPS:
        i, f = i + 1, 0.0
    return i, f


def _ceil(x):
    """Ceiling that ignores float noise; works on scalars and arrays."""
    return np.maximum(np.ceil(np.asarray(x) - 1e-9), 0.0)


def _flows(ctx: _Context, plan: Plan):
    """RRH-bound flows, host-to-host flows, server traffic and per-host BBU load."""
    d, a = ctx.demand, ctx.alpha
    rflows = {(h, r): d.fronthaul[r] for r, h in plan.bbu_host.items()}
    tflows: dict = defaultdict(float)
    load: dict = defaultdict(float)
    for r, h in plan.bbu_host.items():
        load[h] += d.fronthaul[r]
    for h, q in plan.backhaul_src.items():
        if q != h:
            tflows[(q, h)] += a * load[h]
    for p in plan.cnvm_hosts:
        for q in plan.cnvm_hosts:
            if p != q and ctx.nabla[(p, q)]:
                tflows[(p, q)] += ctx.nabla[(p, q)]
    server_traffic = 0.0
    for r, h in plan.bbu_host.items():
        u = plan.cache_of.get(r)
        hit = plan.caches.get(u, 0.0) if u is not None else 0.0
        cached = hit * d.video[r]
        served = d.video[r] - cached
        server_traffic += served
        if cached and u != h:
            tflows[(u, h)] += a * cached
        if served and plan.server != h:
            tflows[(plan.server, h)] += a * served
    return rflows, tflows, server_traffic, load


@dataclass
class _Meters:
    """Loads that drive power; each is linear in the flows."""
    core: dict          # directed core link -> Gbps
    agg: dict           # core node -> Gbps towards its OLTs
    out: dict           # ONU/OLT -> outgoing Gbps
    server_traffic: float
    servers: float      # VM server power (W), independent of caching


def _meters(ctx: _Context, plan: Plan) -> _Meters:
    p = ctx.p
    rflows, tflows, server_traffic, load = _flows(ctx, plan)
    core, agg, out = defaultdict(float), defaultdict(float), defaultdict(float)
    for flows in (rflows, tflows):
        for (s, t), v in flows.items():
            for x, y in ctx.path(s, t):
                if x.kind != Kind.CORE:
                    out[x] += v
                elif y.kind == Kind.CORE:
                    core[(x, y)] += v
                else:
                    agg[x] += v
    servers = 0.0
    for h in _vm_hosts(plan):
        wl = bbuvm_workload(load.get(h, 0.0), ctx.sc.radio)
        wl += p.cnvm_workload if h in plan.cnvm_hosts else 0.0
        i, f = _split(wl / p.server_workload)
        servers += server_power(i, f, 1, p)
    return _Meters(dict(core), dict(agg), dict(out), server_traffic, servers)


def _cache_power(ctx: _Context, delta):
    """Cache power at hit ratio(s) ``delta``: whole percents of the envelope size."""
    p = ctx.p
    d = np.asarray(delta, dtype=float)
    z = np.where(d > 0, ctx.seg.envelope(d), 0.0)
    zi = np.floor(z)
    zi = np.where(z - zi > 1 - FRACTION_EPS, zi + 1, zi)
    return p.cache_energy_per_gb * p.cache_capacity_gb * zi / 100


def _breakdown(ctx: _Context, m: _Meters, caches) -> PowerBreakdown:
    """Power categories from meters; fields may be arrays over a hit-ratio grid."""
    p, topo = ctx.p, ctx.topo
    w_phys = edfa = regen = 0.0
    for (x, y), v in m.core.items():
        w = _ceil(v / p.wavelength_rate)
        geo = topo.geometry(x, y)
        w_phys = w_phys + w
        edfa = edfa + geo.edfa_count * _ceil(w / p.wavelengths_per_fiber)
        regen = regen + geo.regenerator_count * w
    ports = 0.0
    for v in m.agg.values():
        ports = ports + _ceil(v / p.wavelength_rate)
    onu = sum(p.rrh_power + p.onu_max / p.onu_capacity * m.out.get(x, 0.0) for x in topo.onu_nodes)
    olt = sum(p.olt_idle + (p.olt_max - p.olt_idle) / p.olt_capacity * m.out.get(x, 0.0)
              for x in topo.olt_nodes)
    return PowerBreakdown(
        router_ports=p.router_port * (ports + w_phys), transponders=p.transponder * w_phys,
        edfas=p.edfa * edfa, regenerators=p.regenerator * regen, onu_rrh=onu, olt=olt,
        vm_servers=m.servers, video_server=p.video_energy_per_gb * ctx.alpha * m.server_traffic,
        caches=caches)


def evaluate(ctx: _Context, plan: Plan) -> PowerBreakdown:
    """Power of a plan, with the same accounting as :func:`power.eval_total`."""
    caches = sum(float(_cache_power(ctx, d)) for d in plan.caches.values())
    pb = _breakdown(ctx, _meters(ctx, plan), caches)
    return PowerBreakdown(*(float(v) for v in (pb.router_ports, pb.transponders, pb.edfas,
                                               pb.regenerators, pb.onu_rrh, pb.olt, pb.vm_servers,
                                               pb.video_server, pb.caches)))


def _vm_hosts(plan: Plan) -> list[NodeId]:
    return sorted(set(plan.bbu_host.values()) | set(plan.cnvm_hosts))


# -- BBUVMs -------------------------------------------------------------------------

def _fits(ctx: _Context, host: NodeId, gbps: float, cnvm: bool = False) -> bool:
    """Capacity check with the server power model against the host budget (W)."""
    p = ctx.p
    wl = bbuvm_workload(gbps, ctx.sc.radio) + (p.cnvm_workload if cnvm else 0.0)
    i, f = _split(wl / p.server_workload)
    return server_power(i, f, 1, p) <= p.hosting_budget(host) + 1e-9


def _nearest(ctx: _Context, r: NodeId, kind: Kind) -> list[NodeId]:
    """Nodes of ``kind`` that can feed ``r`` downstream, nearest first (ties by id)."""
    cands = [(ctx.reach(h, r), h) for h in ctx.topo.hosting_nodes if h.kind == kind]
    return [h for dist, h in sorted(c for c in cands if c[0] is not None)]


def place_bbuvms(demand: DemandSet, topology: Topology, scenario: Scenario,
                 layer: str = "olt", ctx: _Context | None = None,
                 group_layer: dict | None = None) -> Plan:
    """Host every RRH's BBUVM, RRHs in ascending id order.

    ``layer="olt"`` tries the nearest OLT with spare capacity and falls
    through to the nearest core node; ``"core"`` goes straight to the core;
    ``"cell"`` keeps each BBU at the RRH's own ONU.  ``group_layer`` overrides
    the layer for the RRHs under particular OLTs.
    """
    ctx = ctx or make_context(scenario, topology, demand)
    if layer not in LAYERS:
        raise ValueError(f"unknown BBUVM layer {layer!r}")
    group_layer = group_layer or {}
    plan = Plan()
    load: dict = defaultdict(float)
    order = {"olt": (Kind.OLT, Kind.CORE), "core": (Kind.CORE,), "cell": (Kind.ONU,)}
    for r in sorted(demand.users):
        own_olt = topology.parent(topology.parent(r))
        host = None
        for kind in order[group_layer.get(own_olt, layer)]:
            cands = [topology.parent(r)] if kind == Kind.ONU else _nearest(ctx, r, kind)
            host = next((h for h in cands if _fits(ctx, h, load[h] + demand.fronthaul[r])), None)
            if host is not None:
                break
        if host is None:
            raise PlacementInfeasible(f"no hosting node can take the BBUVM of {r}")
        plan.bbu_host[r] = host
        load[host] += demand.fronthaul[r]
    return plan


# -- CNVMs --------------------------------------------------------------------------

def popularity_order(topology: Topology, demand: DemandSet, kind: Kind = Kind.CORE) -> list[NodeId]:
    """Nodes of ``kind`` by users in their subtree, descending, ties by id."""
    nodes = [h for h in topology.hosting_nodes if h.kind == kind]
    users = {n: sum(demand.users[r] for r in topology.subtree_rrhs(n)) for n in nodes}
    return sorted(nodes, key=lambda n: (-users[n], n))


def _attach_cnvms(ctx: _Context, plan: Plan, hosts) -> Plan:
    plan = plan.copy()
    plan.cnvm_hosts = tuple(sorted(hosts))
    plan.backhaul_src = {}
    for h in sorted(set(plan.bbu_host.values())):
        cands = [c for c in ((ctx.reach(q, h), q) for q in plan.cnvm_hosts) if c[0] is not None]
        if not cands:
            raise PlacementInfeasible(f"no CNVM can reach BBUVM host {h}")
        plan.backhaul_src[h] = min(cands)[1]
    return plan


def _cnvms_usable(ctx: _Context, plan: Plan) -> bool:
    # every CNVM must feed some BBUVM (its location indicator needs traffic)
    # and every VM host must stay within budget
    if not set(plan.cnvm_hosts) <= set(plan.backhaul_src.values()):
        return False
    _, _, _, load = _flows(ctx, plan)
    return all(_fits(ctx, h, load.get(h, 0.0), h in plan.cnvm_hosts) for h in _vm_hosts(plan))


def sweep_cnvms(partial: Plan, topology: Topology, scenario: Scenario, demand: DemandSet,
                ctx: _Context | None = None, trace: HeuristicTrace | None = None) -> Plan:
    """Host CNVMs on the 1, 2, ... most popular core nodes; stop at the first
    count that does not lower total power and keep the previous one."""
    ctx = ctx or make_context(scenario, topology, demand)
    order = popularity_order(topology, demand)
    best, best_val, tpc = None, math.inf, []
    for i in range(1, len(order) + 1):
        cand = _attach_cnvms(ctx, partial, order[:i])
        cand.server = order[0]
        if not _cnvms_usable(ctx, cand):
            break
        val = evaluate(ctx, cand).total
        tpc.append(val)
        if val < best_val:
            best, best_val = cand, val
        else:
            break
    if best is None:
        raise PlacementInfeasible("no CNVM placement fits")
    if trace is not None:
        trace.popularity = order
        trace.cnvm_tpc = tpc
        trace.cnvm_count = len(best.cnvm_hosts)
    return best


def colocate_cnvms(partial: Plan, ctx: _Context, trace: HeuristicTrace | None = None) -> Plan:
    """One CNVM beside every BBUVM host, so backhaul never leaves the host."""
    plan = _attach_cnvms(ctx, partial, set(partial.bbu_host.values()))
    plan.server = popularity_order(ctx.topo, ctx.demand)[0]
    if not _cnvms_usable(ctx, plan):
        raise PlacementInfeasible("co-located CNVMs exceed a host budget")
    if trace is not None:
        trace.popularity = popularity_order(ctx.topo, ctx.demand)
        trace.cnvm_tpc = [evaluate(ctx, plan).total]
        trace.cnvm_count = len(plan.cnvm_hosts)
    return plan


# -- video server and caches --------------------------------------------------------

def _busy(topology: Topology, demand: DemandSet, scenario: Scenario) -> bool:
    """Active users at or above half of what the cells can hold."""
    capacity = len(topology.rrh_nodes) * scenario.radio.max_users_per_cell
    return demand.total_users >= 0.5 * capacity


def cache_layers(topology: Topology, demand: DemandSet, scenario: Scenario, layer: str) -> list[str]:
    """Concrete cache layers to try for option ``layer``.

    ``"threshold"`` is OLT when busy, core otherwise.  ``"rule"`` is OLT when
    busy; when quiet it tries the core and the BBUVM host nodes.
    """
    busy = _busy(topology, demand, scenario)
    if layer == "threshold":
        return ["olt" if busy else "core"]
    if layer == "rule":
        return ["olt"] if busy else ["core", "hosts"]
    if layer == "auto":
        return ["core", "olt", "hosts"]
    if layer in ("core", "olt", "hosts"):
        return [layer]
    raise ValueError(f"unknown cache layer {layer!r}")


def cache_candidates(topology: Topology, demand: DemandSet, layer: str,
                     plan: Plan | None = None) -> list[NodeId]:
    """Popularity-ordered cache sites of a concrete layer; ``"hosts"`` means the
    OLT and core nodes hosting BBUVMs in ``plan``, by users served."""
    if layer == "hosts":
        served: dict = defaultdict(int)
        for r, h in (plan.bbu_host.items() if plan else ()):
            if h.kind != Kind.ONU:
                served[h] += demand.users[r]
        return sorted(served, key=lambda n: (-served[n], n))
    return popularity_order(topology, demand, Kind.CORE if layer == "core" else Kind.OLT)


def _assign_caches(ctx: _Context, plan: Plan, sites) -> Plan:
    """Each RRH uses the nearest cache that can reach its BBUVM host."""
    plan = plan.copy()
    plan.caches = {u: 0.0 for u in sites}
    plan.cache_of = {}
    for r, h in sorted(plan.bbu_host.items()):
        cands = [c for c in ((ctx.reach(u, h), u) for u in sites) if c[0] is not None]
        if cands:
            plan.cache_of[r] = min(cands)[1]
    return plan


def _grid_totals(ctx: _Context, plan: Plan, u: NodeId, grid: np.ndarray) -> np.ndarray:
    """Total power over ``grid`` values of cache ``u``'s hit ratio, others fixed.

    Every load is linear in the hit ratio, so two evaluations give the whole line.
    """
    saved = plan.caches[u]
    plan.caches[u] = 0.0
    m0 = _meters(ctx, plan)
    plan.caches[u] = 1.0
    m1 = _meters(ctx, plan)
    plan.caches[u] = saved

    def line(a: dict, b: dict) -> dict:
        return {k: a.get(k, 0.0) + grid * (b.get(k, 0.0) - a.get(k, 0.0)) for k in set(a) | set(b)}

    st = m0.server_traffic + grid * (m1.server_traffic - m0.server_traffic)
    mg = _Meters(line(m0.core, m1.core), line(m0.agg, m1.agg), line(m0.out, m1.out), st, m0.servers)
    others = sum(float(_cache_power(ctx, d)) for k, d in plan.caches.items() if k != u)
    totals = np.broadcast_to(_breakdown(ctx, mg, others + _cache_power(ctx, grid)).total,
                             grid.shape).astype(float)
    # the video server's location indicator needs it to carry some traffic
    totals[st * ctx.big_m < 2.0] = np.inf
    return totals


def _tune_hit_ratios(ctx: _Context, plan: Plan, step: float, passes: int) -> tuple[Plan, float]:
    """Coordinate search of each cache's hit ratio on the grid 0, step, ..., 1,
    sweeping the caches forwards and backwards; the better end point is kept."""
    grid = np.round(np.arange(0.0, 1.0 + step / 2, step), 10)
    used = [u for u in plan.caches if u in plan.cache_of.values()]
    best_plan, best_val = plan, evaluate(ctx, plan).total
    for order in (used, used[::-1]):
        cand = plan.copy()
        val = evaluate(ctx, cand).total
        for _ in range(passes):
            changed = False
            for u in order:
                totals = _grid_totals(ctx, cand, u, grid)
                k = int(np.argmin(totals))
                if totals[k] < val - 1e-9:
                    cand.caches[u] = float(grid[k])
                    val = evaluate(ctx, cand).total
                    changed = True
            if not changed:
                break
        if val < best_val - 1e-9:
            best_plan, best_val = cand, val
    return best_plan, best_val


def place_video_and_caches(partial: Plan, topology: Topology, scenario: Scenario,
                           demand: DemandSet, ctx: _Context | None = None,
                           trace: HeuristicTrace | None = None, layer: str = "rule",
                           step: float = 0.01, passes: int = 3) -> Plan:
    """Pin the video server to the most popular core node, then place caches on
    the 1, 2, ... most popular nodes of the cache layer, tuning hit ratios at
    each count and stopping at the first count that does not lower power."""
    ctx = ctx or make_context(scenario, topology, demand)
    plan = partial.copy()
    plan.server = popularity_order(topology, demand)[0]
    layers = cache_layers(topology, demand, scenario, layer)
    best, best_val, best_j, best_layer, best_tpc = plan, evaluate(ctx, plan).total, 0, "", []
    for lay in layers:
        sites = cache_candidates(topology, demand, lay, plan)
        cur, cur_val, cur_j, tpc = None, math.inf, 0, []
        for j in range(1, len(sites) + 1):
            cand, val = _tune_hit_ratios(ctx, _assign_caches(ctx, plan, sites[:j]), step, passes)
            tpc.append(val)
            if val < cur_val:
                cur, cur_val, cur_j = cand, val, j
            else:
                break
        if cur is not None and (not best_layer or cur_val < best_val - 1e-9):
            best, best_val, best_j, best_layer, best_tpc = cur, cur_val, cur_j, lay, tpc
    best = best.copy()
    best.caches = {u: d for u, d in best.caches.items() if d > 0}
    best.cache_of = {r: u for r, u in best.cache_of.items() if u in best.caches}
    if trace is not None:
        trace.cache_layer = best_layer
        trace.cache_tpc = best_tpc
        trace.cache_count = best_j
        trace.cache_hit_ratio = dict(best.caches)
    return best


# -- composition -------------------------------------------------------------------

def _complete(ctx: _Context, layer: str, group_layer: dict, cnvm_mode: str, caching: bool,
              opts: HeuristicOptions) -> tuple[Plan, HeuristicTrace]:
    trace = HeuristicTrace(bbu_layer=layer, cnvm_mode=cnvm_mode)
    plan = place_bbuvms(ctx.demand, ctx.topo, ctx.sc, layer, ctx, group_layer)
    trace.bbu_host = dict(plan.bbu_host)
    if cnvm_mode == "core":
        plan = sweep_cnvms(plan, ctx.topo, ctx.sc, ctx.demand, ctx, trace)
    elif cnvm_mode == "colocated":
        plan = colocate_cnvms(plan, ctx, trace)
    else:
        raise ValueError(f"unknown CNVM mode {cnvm_mode!r}")
    plan.server = popularity_order(ctx.topo, ctx.demand)[0]
    if caching:
        plan = place_video_and_caches(plan, ctx.topo, ctx.sc, ctx.demand, ctx, trace,
                                      opts.cache_layer, opts.delta_step, opts.max_delta_passes)
    trace.server = str(plan.server)
    trace.total = evaluate(ctx, plan).total
    return plan, trace


def _config_key(layer: str, groups, mode: str) -> str:
    return f"{layer}/{mode}" + "".join(f"/{o}={g}" for o, g in sorted(dict(groups).items()))


def _search(ctx: _Context, opts: HeuristicOptions, caching: bool, starts=()):
    """Best uniform-layer candidate, then single OLT-group layer flips."""
    if opts.approach == "caching-only":
        # no shared baseband: BBUs stay at the cell site, core functions in the core
        layers = ["cell"] if opts.bbuvm_layer == "auto" else [opts.bbuvm_layer]
        modes = ["core"]
    else:
        layers = ["olt", "core"] if opts.bbuvm_layer == "auto" else [opts.bbuvm_layer]
        modes = ["core", "colocated"] if opts.cnvm_mode == "auto" else [opts.cnvm_mode]
    results, tried = [], {}
    configs = [(layer, (), mode) for layer in layers for mode in modes] + list(starts)
    for layer, groups, mode in configs:
        try:
            res = _complete(ctx, layer, dict(groups), mode, caching, opts)
        except PlacementInfeasible:
            continue
        tried[_config_key(layer, groups, mode)] = res[1].total
        results.append((res, (layer, groups, mode)))
    if not results:
        raise PlacementInfeasible("no BBUVM layer admits a placement")
    (plan, trace), cfg = min(results, key=lambda rc: rc[0][1].total)
    moves = []
    if opts.local_search and cfg[0] in ("olt", "core"):
        layer, groups, mode = cfg
        groups = dict(groups)
        olts = popularity_order(ctx.topo, ctx.demand, Kind.OLT)
        improved = True
        while improved:
            improved = False
            for o in olts:
                trial = dict(groups)
                trial[o] = "core" if groups.get(o, layer) == "olt" else "olt"
                try:
                    p2, t2 = _complete(ctx, layer, trial, mode, caching, opts)
                except PlacementInfeasible:
                    continue
                tried[_config_key(layer, trial, mode)] = t2.total
                if t2.total < trace.total - 1e-9:
                    plan, trace, groups, improved = p2, t2, trial, True
                    moves.append((o, t2.total))
        cfg = (layer, tuple(sorted(groups.items())), mode)
    trace.candidates = tried
    trace.group_moves = moves
    return plan, trace, cfg


def run(scenario: Scenario, topology: Topology, demand: DemandSet,
        options: HeuristicOptions | None = None, nabla: CnvmInterTrafficSpec | None = None,
        segments: PiecewiseSegments | None = None) -> tuple[Solution, HeuristicTrace]:
    """Heuristic for one hour: the expanded Solution and its trace.

    For the integrated approach the best cache-free configuration is also
    completed with caches, so integrated power never exceeds virtualisation-only.
    """
    opts = options or HeuristicOptions()
    if opts.approach not in ("integrated", "virt-only", "caching-only"):
        raise ValueError(f"unknown approach {opts.approach!r}")
    ctx = make_context(scenario, topology, demand, nabla, segments)
    starts = ()
    if opts.approach == "integrated":
        _, _, vcfg = _search(ctx, opts, caching=False)
        starts = (vcfg,)
    plan, trace, _ = _search(ctx, opts, caching=opts.approach != "virt-only", starts=starts)
    trace.approach = opts.approach
    return build_solution(ctx, plan), trace


# -- expansion to the full variable set ------------------------------------------

def build_solution(ctx: _Context, plan: Plan) -> Solution:
    """Every model variable implied by ``plan``, routed on downstream shortest paths."""
    p, d, a = ctx.p, ctx.demand, ctx.alpha
    rflows, tflows, _, load = _flows(ctx, plan)
    sol = Solution()
    for (h, r), v in rflows.items():
        sol.lam_r[(h, r)] = v
        sol.sig_b_hr[(h, r)] = 1.0
        sol.lam_g[(h, r)] = d.regular[r]
        sol.sig_b[(h,)] = 1.0
    for h, q in plan.backhaul_src.items():
        sol.lam_b[(q, h)] = a * load[h]
        sol.sig_e_ph[(q, h)] = 1.0
    for q in plan.cnvm_hosts:
        sol.sig_e[(q,)] = 1.0
        for q2 in plan.cnvm_hosts:
            if q != q2:
                sol.psi[(q, q2)] = 1.0
                if ctx.nabla[(q, q2)]:
                    sol.lam_e[(q, q2)] = ctx.nabla[(q, q2)]
    for h in _vm_hosts(plan):
        sol.sig_x[(h,)] = 1.0
    s = plan.server
    sol.sig_s[(s,)] = 1.0
    for r, h in sorted(plan.bbu_host.items()):
        u = plan.cache_of.get(r)
        hit = plan.caches.get(u, 0.0) if u is not None else 0.0
        cached = hit * d.video[r]
        served = d.video[r] - cached
        if hit > 0:
            sol.sig_c[(u, r)] = 1.0
            sol.theta[(u, r)] = hit
            sol.lam_c_ur[(u, r)] = cached
            sol.lam_c_uhr[(u, h, r)] = cached
        if served:
            sol.lam_s_sr[(s, r)] = served
            sol.lam_s_shr[(s, h, r)] = served
            sol.lam_s_sh[(s, h)] = sol.lam_s_sh.get((s, h), 0.0) + served
    for u, hit in plan.caches.items():
        if hit <= 0:
            continue
        zi, zf = _split(float(ctx.seg.envelope(hit)))
        sol.delta[(u,)] = hit
        sol.z_c[(u,)] = zi + zf
        if zi:
            sol.z_i[(u,)] = float(zi)
        if zf:
            sol.z_f[(u,)] = zf
    link = defaultdict(float)
    for (h, r), v in rflows.items():
        for x, y in ctx.path(h, r):
            sol.lam_r_link[(h, r, x, y)] = v
            link[(x, y)] += v
    for (s_, t), v in sorted(tflows.items()):
        sol.lam_t[(s_, t)] = v
        for x, y in ctx.path(s_, t):
            sol.lam_t_link[(s_, t, x, y)] = v
            link[(x, y)] += v
    for h in _vm_hosts(plan):
        b = bbuvm_workload(load.get(h, 0.0), ctx.sc.radio)
        if b:
            sol.psi_b[(h,)] = b
        wl = b + (p.cnvm_workload if h in plan.cnvm_hosts else 0.0)
        i, f = _split(wl / p.server_workload)
        if i:
            sol.psi_i[(h,)] = float(i)
        if f:
            sol.psi_f[(h,)] = f
    agg = defaultdict(float)
    for (x, y), v in sorted(link.items()):
        if x.kind != Kind.CORE:
            continue
        if y.kind == Kind.OLT:
            agg[x] += v
        elif y.kind == Kind.CORE:
            w = float(_ceil(v / p.wavelength_rate))
            if w:
                sol.w_virtual[(x, y)] = w
                sol.w_route[(x, y, x, y)] = w
                sol.w_physical[(x, y)] = w
                sol.fibers[(x, y)] = float(_ceil(w / p.wavelengths_per_fiber))
    for x, v in sorted(agg.items()):
        n = float(_ceil(v / p.wavelength_rate))
        if n:
            sol.agg_ports[(x,)] = n
    return sol


def placement_summary(solution: Solution, topology: Topology, scenario: Scenario | None = None) -> dict:
    """Per hosting node: VM workload in servers (integer plus fraction) and cache percent."""
    return {h: (solution.get("psi_i", h) + solution.get("psi_f", h),
                solution.get("z_i", h) + solution.get("z_f", h))
            for h in topology.hosting_nodes}
