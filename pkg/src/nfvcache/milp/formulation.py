"""The joint VM-placement / content-caching MILP.

Row labels follow the constraint numbering used throughout the package
(``C11`` ... ``C63``); rows that only define a declared variable are labelled
``D...``.  Flow variables ``lam_*_link[..., x, y]`` carry traffic from ``x``
to ``y``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from ..scenario import (CnvmInterTrafficSpec, DemandSet, Scenario, cnvm_inter_traffic,
                        core_pairs)
from ..solution import SYMBOL_BY_NAME, Solution
from ..topology import Kind, Topology, validate
from .gadgets import (gadget_activity_link, gadget_and, gadget_gate, gadget_int_frac_split,
                      gadget_or, gadget_product)
from .model import EQ, GE, LE, Model, ModelError
from .piecewise import PiecewiseSegments, build_piecewise_segments

APPROACHES = ("integrated", "virt-only", "caching-only")
FRACTION_EPS = 1e-6


class BuildError(ModelError):
    pass


def _lbl(prefix, *key) -> str:
    return f"{prefix}({','.join(str(k) for k in key)})"


@dataclass(frozen=True)
class IndexSets:
    """Node sets and link lists the formulation is indexed over."""
    R: tuple
    U: tuple
    L: tuple
    N: tuple
    H: tuple
    T: tuple
    links: tuple          # every directed link of the full graph
    host_links: tuple     # directed links with both ends hosting nodes
    core_links: tuple     # directed physical core links
    host_pairs: tuple     # ordered (p, q), p != q, over H
    core_vpairs: tuple    # ordered (i, j), i != j, over N

    @classmethod
    def of(cls, topology: Topology) -> "IndexSets":
        H = topology.hosting_nodes
        N = tuple(sorted(topology.core_nodes))
        return cls(
            R=tuple(sorted(topology.rrh_nodes)), U=tuple(sorted(topology.onu_nodes)),
            L=tuple(sorted(topology.olt_nodes)), N=N, H=H, T=topology.nodes,
            links=tuple(topology.directed_links()),
            host_links=tuple(topology.directed_links(within=H)),
            core_links=tuple(topology.core_directed_links()),
            host_pairs=tuple((p, q) for p in H for q in H if p != q),
            core_vpairs=tuple((i, j) for i in N for j in N if i != j),
        )


def expected_variable_count(topology: Topology, segments: int = 5) -> dict[str, int]:
    """Closed-form variable count per symbol (the ``segments`` argument is unused
    but kept so callers can pass the build configuration through)."""
    s = IndexSets.of(topology)
    H, R, N = len(s.H), len(s.R), len(s.N)
    pairs = H * (H - 1)
    counts = {
        "lam_b": H * H, "lam_r": H * R, "sig_b_hr": H * R, "sig_b": H, "sig_e_ph": H * H,
        "sig_e": H, "psi": pairs, "sig_x": H, "lam_e": pairs, "lam_s_sr": N * R,
        "lam_c_ur": H * R, "sig_c": H * R, "lam_g": H * R, "lam_c_uhr": H * H * R,
        "lam_s_shr": N * H * R, "lam_s_sh": N * H, "sig_s": N, "lam_t": pairs,
        "lam_r_link": H * R * len(s.links), "lam_t_link": pairs * len(s.host_links),
        "psi_b": H, "psi_i": H, "psi_f": H, "delta": H, "theta": H * R, "z_c": H,
        "z_i": H, "z_f": H, "w_virtual": N * (N - 1),
        "w_route": N * (N - 1) * len(s.core_links), "fibers": len(s.core_links),
        "w_physical": len(s.core_links), "agg_ports": N,
    }
    return counts


def big_m(demand: DemandSet, scenario: Scenario, nabla: CnvmInterTrafficSpec | None) -> float:
    """10x the largest traffic the network can carry for this demand."""
    alpha = scenario.power.backhaul_ratio
    total = demand.total_fronthaul * (1 + 2 * alpha)
    if nabla is not None:
        total += nabla.total
    return 10.0 * max(total, 1.0)


def _fixed_zero_hosts(approach: str, s: IndexSets, caching_only_bbu: str):
    """Host sets that may NOT carry BBUVMs / CNVMs for an approach."""
    if approach == "caching-only":
        if caching_only_bbu == "cell":
            no_bbu = set(s.L) | set(s.N)
        elif caching_only_bbu == "core":
            no_bbu = set(s.U) | set(s.L)
        else:
            raise BuildError(f"unknown caching-only BBU placement {caching_only_bbu!r}")
        return no_bbu, set(s.U) | set(s.L)
    return set(), set()


def build_formulation(scenario: Scenario, topology: Topology, approach: str,
                      demand: DemandSet, nabla: CnvmInterTrafficSpec | None = None,
                      segments: PiecewiseSegments | None = None,
                      caching_only_bbu: str = "cell") -> Model:
    """Assemble objective and every constraint family for one hour's demand.

    ``approach`` is ``"integrated"``, ``"virt-only"`` (hit ratios and cache
    assignments fixed to zero) or ``"caching-only"`` (no shared, virtualised
    baseband: with ``caching_only_bbu="cell"`` each cell's BBU sits at its own
    ONU; ``"core"`` pins BBUVMs to core nodes instead; CNVMs stay in the core
    in both cases).  ``nabla`` defaults to the scenario's inter-traffic fraction
    spread over core node pairs.
    """
    if approach not in APPROACHES:
        raise BuildError(f"unknown approach {approach!r}")
    problems = validate(topology)
    if problems:
        raise BuildError("invalid topology: " + "; ".join(problems))
    if set(demand.users) != set(topology.rrh_nodes):
        raise BuildError("demand does not cover exactly the topology's RRHs")
    p = scenario.power
    radio = scenario.radio
    s = IndexSets.of(topology)
    if nabla is None:
        nabla = cnvm_inter_traffic(scenario.inter_traffic_fraction, demand, core_pairs(topology),
                                   p.backhaul_ratio)
    if segments is None:
        segments = build_piecewise_segments(scenario.cache.zipf_exponent,
                                            scenario.cache.catalog_size, scenario.cache.segments)
    alpha = p.backhaul_ratio
    M = big_m(demand, scenario, nabla)
    max_traffic = M / 10
    wl_ub = math.ceil(2 * max_traffic / p.wavelength_rate) + 1
    model = Model(f"{approach}-h{demand.hour}-s{demand.seed}")
    no_bbu, no_cnvm = _fixed_zero_hosts(approach, s, caching_only_bbu)
    onu_of = {r: topology.parent(r) for r in s.R}

    def var(sym, key, lo=0.0, hi=math.inf):
        kind = SYMBOL_BY_NAME[sym].kind
        return model.add_var(sym, key, kind, lo, hi)

    V = model.var

    # -- variables (declared in symbol-table order) --------------------------
    for ph in product(s.H, s.H):
        var("lam_b", ph)
    for h, r in product(s.H, s.R):
        var("lam_r", (h, r))
    for h, r in product(s.H, s.R):
        pinned = h in no_bbu or (approach == "caching-only" and caching_only_bbu == "cell"
                                 and h != onu_of[r])
        var("sig_b_hr", (h, r), 0, 0 if pinned else 1)
    for h in s.H:
        var("sig_b", (h,), 0, 0 if h in no_bbu else 1)
    for ph in product(s.H, s.H):
        var("sig_e_ph", ph, 0, 0 if ph[0] in no_cnvm else 1)
    for h in s.H:
        var("sig_e", (h,), 0, 0 if h in no_cnvm else 1)
    for pq in s.host_pairs:
        var("psi", pq)
    for h in s.H:
        var("sig_x", (h,))
    for pq in s.host_pairs:
        var("lam_e", pq)
    for n, r in product(s.N, s.R):
        var("lam_s_sr", (n, r))
    no_cache = approach == "virt-only"
    for u, r in product(s.H, s.R):
        var("lam_c_ur", (u, r))
    for u, r in product(s.H, s.R):
        var("sig_c", (u, r), 0, 0 if no_cache else 1)
    for h, r in product(s.H, s.R):
        var("lam_g", (h, r))
    for u, h, r in product(s.H, s.H, s.R):
        var("lam_c_uhr", (u, h, r))
    for n, h, r in product(s.N, s.H, s.R):
        var("lam_s_shr", (n, h, r))
    for n, h in product(s.N, s.H):
        var("lam_s_sh", (n, h))
    for n in s.N:
        var("sig_s", (n,))
    for pq in s.host_pairs:
        var("lam_t", pq)
    for h, r in product(s.H, s.R):
        for x, y in s.links:
            var("lam_r_link", (h, r, x, y))
    for pq in s.host_pairs:
        for x, y in s.host_links:
            var("lam_t_link", pq + (x, y))
    for h in s.H:
        var("psi_b", (h,))
    for h in s.H:
        budget = p.hosting_budget(h)
        var("psi_i", (h,), 0, max(0, math.floor(budget / p.server_idle)))
    for h in s.H:
        var("psi_f", (h,), 0, 1 - FRACTION_EPS)
    for u in s.H:
        var("delta", (u,), 0, 0 if no_cache else 1)
    for u, r in product(s.H, s.R):
        var("theta", (u, r), 0, 1)
    for u in s.H:
        var("z_c", (u,), 0, 100)
    for u in s.H:
        var("z_i", (u,), 0, 100)
    for u in s.H:
        var("z_f", (u,), 0, 1 - FRACTION_EPS)
    for ij in s.core_vpairs:
        var("w_virtual", ij, 0, wl_ub)
    for ij in s.core_vpairs:
        for mn in s.core_links:
            var("w_route", ij + mn, 0, wl_ub)
    fiber_ub = math.ceil(wl_ub * len(s.core_vpairs) / p.wavelengths_per_fiber) + 1
    for mn in s.core_links:
        var("fibers", mn, 0, fiber_ub)
    for mn in s.core_links:
        var("w_physical", mn, 0, wl_ub * len(s.core_vpairs))
    for m in s.N:
        var("agg_ports", (m,), 0, math.ceil(2 * max_traffic / p.wavelength_rate) + 1)

    add = model.add_constraint

    # CNVM backhaul to each BBUVM host, and regular traffic per RRH
    for h in s.H:
        add([(V("lam_b", q, h), 1) for q in s.H] + [(V("lam_r", h, r), -alpha) for r in s.R],
            EQ, 0, _lbl("C11", h))
    for r in s.R:
        add([(V("lam_g", h, r), 1) for h in s.H], EQ, demand.regular[r], _lbl("C12", r))
    # which host serves which RRH, and whether a host runs BBUVMs
    for h, r in product(s.H, s.R):
        gadget_activity_link(model, V("lam_g", h, r), V("sig_b_hr", h, r), M, (h, r), ("C13", "C14"))
    for h in s.H:
        gadget_activity_link(model, [(V("lam_r", h, r), 1) for r in s.R], V("sig_b", h), M, (h,),
                             ("C15", "C16"))
    # CNVM placement and co-hosting
    for q, h in product(s.H, s.H):
        gadget_activity_link(model, V("lam_b", q, h), V("sig_e_ph", q, h), M, (q, h), ("C17", "C18"))
    for q in s.H:
        gadget_activity_link(model, [(V("lam_b", q, h), 1) for h in s.H], V("sig_e", q), M, (q,),
                             ("C19", "C20"))
    for a, b in s.host_pairs:
        gadget_and(model, V("sig_e", a), V("sig_e", b), V("psi", a, b), (a, b))
    # inter-CNVM traffic
    for a, b in s.host_pairs:
        add([(V("lam_e", a, b), 1), (V("psi", a, b), -nabla[(a, b)])], EQ, 0, _lbl("C24", a, b))
    # host runs any VM
    for h in s.H:
        gadget_or(model, V("sig_b", h), V("sig_e", h), V("sig_x", h), (h,))
    # video sourcing and server location
    for r in s.R:
        add([(V("lam_s_sr", n, r), 1) for n in s.N] + [(V("lam_c_ur", u, r), 1) for u in s.H],
            EQ, demand.video[r], _lbl("C28", r))
    for r in s.R:
        add([(V("sig_c", u, r), 1) for u in s.H], LE, 1, _lbl("C29", r))
    for n in s.N:
        gadget_activity_link(model, [(V("lam_s_sr", n, r), 1) for r in s.R], V("sig_s", n), M, (n,),
                             ("C30", "C31"))
    add([(V("sig_s", n), 1) for n in s.N], EQ, 1, "C32()")
    # hit ratio product and cache traffic
    for u, r in product(s.H, s.R):
        gadget_product(model, V("sig_c", u, r), V("delta", u), V("theta", u, r), (u, r))
    for u in s.H:
        add([(V("delta", u), 1)], LE, 1, _lbl("C37", u))
    for u, r in product(s.H, s.R):
        add([(V("lam_c_ur", u, r), 1), (V("theta", u, r), -demand.video[r])], EQ, 0,
            _lbl("C38", u, r))
    # cache size from hit ratio, integer part charged
    for u in s.H:
        for k, (a_k, b_k) in enumerate(segments.pairs):
            add([(V("z_c", u), 1), (V("delta", u), -a_k)], GE, b_k, _lbl("C39", u, f"k{k}"))
        add([(V("z_c", u), 1), (V("z_i", u), -1), (V("z_f", u), -1)], EQ, 0, _lbl("C40", u))
    # cache and server traffic detours through the serving BBUVM
    for u, h, r in product(s.H, s.H, s.R):
        gadget_gate(model, V("lam_c_uhr", u, h, r), V("lam_c_ur", u, r), V("sig_b_hr", h, r), M,
                    (u, h, r), ("C41", "C42", "C43", "C44"))
    for n, h, r in product(s.N, s.H, s.R):
        gadget_gate(model, V("lam_s_shr", n, h, r), V("lam_s_sr", n, r), V("sig_b_hr", h, r), M,
                    (n, h, r), ("C45", "C46", "C47", "C48"))
    # download traffic of each BBUVM-RRH pair
    for h, r in product(s.H, s.R):
        add([(V("lam_r", h, r), 1), (V("lam_g", h, r), -1)]
            + [(V("lam_c_uhr", u, h, r), -1) for u in s.H]
            + [(V("lam_s_shr", n, h, r), -1) for n in s.N], EQ, 0, _lbl("C49", h, r))
    # traffic between hosting nodes
    for a, b in s.host_pairs:
        terms = [(V("lam_t", a, b), 1), (V("lam_e", a, b), -1), (V("lam_b", a, b), -1)]
        terms += [(V("lam_c_uhr", a, b, r), -alpha) for r in s.R]
        if a.kind == Kind.CORE:
            terms += [(V("lam_s_shr", a, b, r), -alpha) for r in s.R]
        add(terms, EQ, 0, _lbl("C51" if a.kind == Kind.CORE else "C50", a, b))
    for n, h in product(s.N, s.H):
        add([(V("lam_s_sh", n, h), 1)] + [(V("lam_s_shr", n, h, r), -1) for r in s.R], EQ, 0,
            _lbl("Dss", n, h))
    # workloads and host capacity
    gops_per_gbps = radio.bbu_workload_full / radio.cpri_rate
    for h in s.H:
        add([(V("psi_b", h), 1)] + [(V("lam_r", h, r), -gops_per_gbps) for r in s.R], EQ, 0,
            _lbl("C52", h))
    for h in s.H:
        gadget_int_frac_split(
            model, [(V("psi_b", h), 1 / p.server_workload),
                    (V("sig_e", h), p.cnvm_workload / p.server_workload)],
            upper=model.variables[V("psi_i", h)].upper,
            key=(h,), label="C53", int_var=V("psi_i", h), frac_var=V("psi_f", h))
    for h in s.H:
        add([(V("psi_i", h), p.server_idle), (V("sig_x", h), p.server_idle),
             (V("psi_f", h), p.server_max - p.server_idle)], LE, p.hosting_budget(h),
            _lbl("C54", h))
    # flow conservation: out - in = +supply at the source, -supply at the sink
    out_links = {x: [] for x in s.T}
    in_links = {x: [] for x in s.T}
    for x, y in s.links:
        out_links[x].append(y)
        in_links[y].append(x)
    for h, r in product(s.H, s.R):
        for x in s.T:
            terms = [(V("lam_r_link", h, r, x, y), 1) for y in out_links[x]]
            terms += [(V("lam_r_link", h, r, y, x), -1) for y in in_links[x]]
            if x == h:
                terms.append((V("lam_r", h, r), -1))
            if x == r:
                terms.append((V("lam_r", h, r), 1))
            add(terms, EQ, 0, _lbl("C55", h, r, x))
    hset = set(s.H)
    for a, b in s.host_pairs:
        for x in s.H:
            terms = [(V("lam_t_link", a, b, x, y), 1) for y in out_links[x] if y in hset]
            terms += [(V("lam_t_link", a, b, y, x), -1) for y in in_links[x] if y in hset]
            if x == a:
                terms.append((V("lam_t", a, b), -1))
            if x == b:
                terms.append((V("lam_t", a, b), 1))
            add(terms, EQ, 0, _lbl("C56", a, b, x))
    # nothing flows up a PON tree
    for label, nodes, upkind in (("C57", s.U, Kind.OLT), ("C58", s.L, Kind.CORE)):
        for i in nodes:
            ups = [j for j in out_links[i] if j.kind == upkind]
            terms = [(V("lam_r_link", h, r, i, j), 1) for h, r in product(s.H, s.R) for j in ups]
            terms += [(V("lam_t_link", a, b, i, j), 1) for a, b in s.host_pairs for j in ups]
            add(terms, EQ, 0, _lbl(label, i))
    # IP-layer capacity of virtual links
    for i, j in s.core_vpairs:
        terms = [(V("w_virtual", i, j), -p.wavelength_rate)]
        if j in out_links[i]:
            terms += [(V("lam_t_link", a, b, i, j), 1) for a, b in s.host_pairs]
            terms += [(V("lam_r_link", h, r, i, j), 1) for h, r in product(s.H, s.R)]
        add(terms, LE, 0, _lbl("C59", i, j))
    # lightpath conservation in the optical layer
    for i, j in s.core_vpairs:
        for m in s.N:
            terms = [(V("w_route", i, j, m, n), 1) for n in topology.core_adjacency[m]]
            terms += [(V("w_route", i, j, n, m), -1) for n in topology.core_adjacency[m]]
            if m == i:
                terms.append((V("w_virtual", i, j), -1))
            if m == j:
                terms.append((V("w_virtual", i, j), 1))
            add(terms, EQ, 0, _lbl("C60", i, j, m))
    # fibres and wavelengths per physical link
    for m, n in s.core_links:
        add([(V("w_route", i, j, m, n), 1) for i, j in s.core_vpairs]
            + [(V("fibers", m, n), -p.wavelengths_per_fiber)], LE, 0, _lbl("C61", m, n))
        add([(V("w_physical", m, n), 1)] + [(V("w_route", i, j, m, n), -1) for i, j in s.core_vpairs],
            EQ, 0, _lbl("C62", m, n))
    # aggregation ports towards the access network (integral, so >=)
    for i in s.N:
        olts = [j for j in out_links[i] if j.kind == Kind.OLT]
        terms = [(V("agg_ports", i), p.wavelength_rate)]
        terms += [(V("lam_t_link", a, b, i, j), -1) for a, b in s.host_pairs for j in olts]
        terms += [(V("lam_r_link", h, r, i, j), -1) for h, r in product(s.H, s.R) for j in olts]
        add(terms, GE, 0, _lbl("C63", i))

    # -- objective -------------------------------------------------------------
    obj: list[tuple[int, float]] = []
    for m in s.N:
        obj.append((V("agg_ports", m), p.router_port))
    for mn in s.core_links:
        geo = topology.geometry(*mn)
        obj.append((V("w_physical", *mn), p.router_port + p.transponder + p.regenerator * geo.regenerator_count))
        obj.append((V("fibers", *mn), p.edfa * geo.edfa_count))
    const = p.rrh_power * len(s.U) + p.olt_idle * len(s.L)
    for nodes, rate in ((s.U, p.onu_max / p.onu_capacity),
                        (s.L, (p.olt_max - p.olt_idle) / p.olt_capacity)):
        for x in nodes:
            for y in out_links[x]:
                obj += [(V("lam_r_link", h, r, x, y), rate) for h, r in product(s.H, s.R)]
                if y in hset:
                    obj += [(V("lam_t_link", a, b, x, y), rate) for a, b in s.host_pairs]
    for h in s.H:
        obj += [(V("psi_i", h), p.server_idle), (V("sig_x", h), p.server_idle),
                (V("psi_f", h), p.server_max - p.server_idle)]
    obj += [(V("lam_s_shr", n, h, r), p.video_energy_per_gb * alpha)
            for n, h, r in product(s.N, s.H, s.R)]
    obj += [(V("z_i", u), p.cache_energy_per_gb * p.cache_capacity_gb / 100) for u in s.H]
    model.set_objective(obj, const)

    model.report = {
        "approach": approach,
        "hour": demand.hour,
        "seed": demand.seed,
        "caching_only_bbu": caching_only_bbu if approach == "caching-only" else "",
        "variables": model.n_vars,
        "constraints": model.n_constraints,
        "integer_variables": len(model.integer_ids),
        "variables_by_symbol": model.counts_by_symbol(),
        "big_m": M,
        "inter_traffic_fraction": nabla.fraction,
        "inter_traffic_per_pair": dict(sorted((f"{a},{b}", v) for (a, b), v in nabla.pairs.items())),
        "zipf_exponent": scenario.cache.zipf_exponent,
        "catalog_size": scenario.cache.catalog_size,
        "piecewise": [{"a": a, "b": b} for a, b in segments.pairs],
        "piecewise_max_gap_percent": segments.max_gap,
    }
    return model


def decode_solution(model: Model, values) -> Solution:
    """Map a solver assignment back onto the named symbols (non-zeros only)."""
    sol = Solution()
    for (sym, key), vid in model.index.items():
        if sym in SYMBOL_BY_NAME:
            v = float(values[vid])
            if v != 0.0:
                getattr(sol, sym)[key] = v
    return sol


def encode_solution(model: Model, solution: Solution) -> np.ndarray:
    """Dense assignment for ``model`` from a :class:`Solution`; unknown keys raise."""
    x = np.zeros(model.n_vars)
    for name, key, v in solution.items():
        try:
            x[model.index[(name, key)]] = v
        except KeyError:
            raise ValueError(f"{name}{tuple(map(str, key))} is not a variable of this model") from None
    return x
