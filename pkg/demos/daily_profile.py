"""A day on the three-core network with the heuristic.

Run with ``python3 demos/daily_profile.py``.  Prints total power per hour for
the three approaches and where the integrated approach puts VMs and caches.
"""

from nfvcache.heuristic import HeuristicOptions, placement_summary, run
from nfvcache.scenario import Scenario, draw_cell_loads
from nfvcache.topology import build_paper_topology

APPROACHES = ("integrated", "virt-only", "caching-only")

topology = build_paper_topology()
scenario = Scenario()

# %% total power per hour
print(f"{'hour':>4} {'users':>5} " + " ".join(f"{a:>13}" for a in APPROACHES) + "  layers")
savings = {"virt-only": [], "caching-only": []}
for hour in range(24):
    demand = draw_cell_loads(scenario.profile, hour, scenario.seed, topology)
    totals = {}
    for approach in APPROACHES:
        sol, trace = run(scenario, topology, demand, HeuristicOptions(approach=approach))
        totals[approach] = trace.total
        if approach == "integrated":
            used = placement_summary(sol, topology, scenario)
            vm_layers = sorted({n.kind.name.lower() for n, (w, z) in used.items() if w > 0})
            cache_layers = sorted({n.kind.name.lower() for n, (w, z) in used.items() if z > 0})
    for other in savings:
        savings[other].append(100 * (1 - totals["integrated"] / totals[other]))
    row = " ".join(f"{totals[a]:13.1f}" for a in APPROACHES)
    print(f"{hour:4d} {demand.total_users:5d} {row}  vm={'/'.join(vm_layers)} cache={'/'.join(cache_layers) or '-'}")

# %% daily savings of the integrated approach
for other, vals in savings.items():
    print(f"saving over {other}: max {max(vals):.1f}%  mean {sum(vals) / len(vals):.1f}%")
