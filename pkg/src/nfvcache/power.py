"""Power accounting for a placement/flow solution, independent of how it was found."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import astuple, dataclass, fields

from .scenario import PowerParams, Scenario
from .solution import SYMBOL_BY_NAME, Solution
from .topology import Kind, Topology


class CapacityError(ValueError):
    pass


CATEGORIES = ("router_ports", "transponders", "edfas", "regenerators",
              "onu_rrh", "olt", "vm_servers", "video_server", "caches")


@dataclass(frozen=True)
class PowerBreakdown:
    router_ports: float = 0.0
    transponders: float = 0.0
    edfas: float = 0.0
    regenerators: float = 0.0
    onu_rrh: float = 0.0
    olt: float = 0.0
    vm_servers: float = 0.0
    video_server: float = 0.0
    caches: float = 0.0

    @property
    def total(self) -> float:
        return sum(astuple(self))

    def as_dict(self) -> dict[str, float]:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["total"] = self.total
        return d

    @property
    def mobile_functions(self) -> float:
        """Power attributable to hosting VMs (servers)."""
        return self.vm_servers


def server_power(integer_part: float, fraction: float, active: float, params: PowerParams) -> float:
    """Hosting servers at one node: idle power for every full server plus the
    active flag, and the dynamic range for the partly used one."""
    if not 0 <= fraction < 1:
        raise ValueError(f"fractional workload {fraction} outside [0, 1)")
    if active not in (0, 1):
        raise ValueError("activity flag must be 0 or 1")
    if integer_part < 0:
        raise ValueError("negative server count")
    return _server(integer_part, fraction, active, params)


def _server(integer_part, fraction, active, p: PowerParams) -> float:
    return p.server_idle * (integer_part + active) + fraction * (p.server_max - p.server_idle)


def cache_power(percent: int, params: PowerParams) -> float:
    if not 0 <= percent <= 100:
        raise ValueError("cache percent outside [0, 100]")
    return params.cache_energy_per_gb * params.cache_capacity_gb * percent / 100


def olt_power(traffic_gbps: float, params: PowerParams) -> float:
    if traffic_gbps < 0:
        raise ValueError("negative traffic")
    if traffic_gbps > params.olt_capacity:
        raise CapacityError(f"{traffic_gbps} Gbps exceeds OLT capacity {params.olt_capacity}")
    return params.olt_idle + (params.olt_max - params.olt_idle) / params.olt_capacity * traffic_gbps


def onu_power(traffic_gbps: float, params: PowerParams) -> float:
    """ONU plus its attached RRH; the RRH draws power whether or not it is busy."""
    return params.rrh_power + params.onu_max / params.onu_capacity * traffic_gbps


def video_server_power(routed_server_traffic: float, params: PowerParams) -> float:
    if routed_server_traffic < 0:
        raise ValueError("negative traffic")
    return params.video_energy_per_gb * params.backhaul_ratio * routed_server_traffic


def _check_keys(solution: Solution, topology: Topology) -> None:
    known = set(topology.nodes)
    adj = topology.full_adjacency
    for name, key, _ in solution.items():
        if len(key) != SYMBOL_BY_NAME[name].arity:
            raise ValueError(f"{name}{key}: wrong index arity")
        bad = [k for k in key if k not in known]
        if bad:
            raise ValueError(f"{name}: node {bad[0]} not in topology")
        if name in ("lam_r_link", "lam_t_link", "w_route") and key[3] not in adj[key[2]]:
            raise ValueError(f"{name}: ({key[2]}, {key[3]}) is not a link")


def node_outflows(solution: Solution, topology: Topology) -> dict:
    """Traffic leaving each node, counted the way the ONU/OLT terms count it:
    all RRH-bound flows plus inter-host flows towards hosting neighbours."""
    hosting = set(topology.hosting_nodes)
    out = defaultdict(float)
    for (h, r, x, y), v in solution.lam_r_link.items():
        out[x] += v
    for (p, q, x, y), v in solution.lam_t_link.items():
        if p != q and y in hosting:
            out[x] += v
    return out


def eval_total(solution: Solution, scenario: Scenario, topology: Topology) -> PowerBreakdown:
    """Per-category power (W) of ``solution``."""
    _check_keys(solution, topology)
    p = scenario.power
    core_links = topology.core_directed_links()
    w_phys = sum(solution.w_physical.get(l, 0.0) for l in core_links)
    ports = sum(solution.agg_ports.get((m,), 0.0) for m in topology.core_nodes)
    edfa = sum(topology.geometry(*l).edfa_count * solution.fibers.get(l, 0.0) for l in core_links)
    regen = sum(topology.geometry(*l).regenerator_count * solution.w_physical.get(l, 0.0)
                for l in core_links)
    out = node_outflows(solution, topology)
    onu_total = sum(onu_power(out[x], p) for x in topology.onu_nodes)
    olt_total = sum(p.olt_idle + (p.olt_max - p.olt_idle) / p.olt_capacity * out[x]
                    for x in topology.olt_nodes)
    servers = sum(_server(solution.get("psi_i", h), solution.get("psi_f", h),
                          solution.get("sig_x", h), p) for h in topology.hosting_nodes)
    video = p.video_energy_per_gb * sum(p.backhaul_ratio * v for (s, h, r), v in solution.lam_s_shr.items()
                                        if s.kind == Kind.CORE)
    caches = sum(p.cache_energy_per_gb * p.cache_capacity_gb * solution.get("z_i", u) / 100
                 for u in topology.hosting_nodes)
    return PowerBreakdown(
        router_ports=p.router_port * (ports + w_phys),
        transponders=p.transponder * w_phys,
        edfas=p.edfa * edfa,
        regenerators=p.regenerator * regen,
        onu_rrh=onu_total,
        olt=olt_total,
        vm_servers=servers,
        video_server=video,
        caches=caches,
    )
