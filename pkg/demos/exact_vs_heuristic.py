"""One busy hour on the small two-core network, solved exactly and heuristically.

Run with ``python3 demos/exact_vs_heuristic.py [hour]``.  Takes a few seconds.
"""

import sys

from nfvcache.heuristic import placement_summary, run
from nfvcache.milp import build_formulation, check_solution, decode_solution, encode_solution
from nfvcache.power import CATEGORIES, eval_total
from nfvcache.scenario import Scenario, draw_cell_loads
from nfvcache.solver import solve_milp
from nfvcache.topology import build_reduced_topology

hour = int(sys.argv[1]) if len(sys.argv) > 1 else 19
topology = build_reduced_topology()
scenario = Scenario()
demand = draw_cell_loads(scenario.profile, hour, scenario.seed, topology)
print(f"hour {hour}: users per cell", {str(r): n for r, n in demand.users.items()})

model = build_formulation(scenario, topology, "integrated", demand)
print(f"model: {model.n_vars} variables, {model.n_constraints} rows, "
      f"{len(model.integer_ids)} integer")

exact = solve_milp(model)
exact_sol = decode_solution(model, exact.values)
heur_sol, trace = run(scenario, topology, demand)
print("heuristic violations:", len(check_solution(model, encode_solution(model, heur_sol))))

# %% power by category
e, h = eval_total(exact_sol, scenario, topology), eval_total(heur_sol, scenario, topology)
for c in CATEGORIES + ("total",):
    print(f"{c:>14} {e.as_dict()[c]:10.1f} {h.as_dict()[c]:10.1f}")
print(f"gap {100 * (h.total - e.total) / e.total:.2f}%  ({exact.status}, {exact.backend})")

# %% placement: server count and cache percent per node
for name, sol in (("milp", exact_sol), ("heuristic", heur_sol)):
    # solver output carries round-off around zero
    used = {str(n): (round(w, 3), round(z, 2))
            for n, (w, z) in placement_summary(sol, topology, scenario).items()
            if abs(w) > 1e-9 or abs(z) > 1e-9}
    print(name, used)
