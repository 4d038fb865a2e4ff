"""Full formulation on the reduced instance: shape, labels, consistency with the evaluator."""

import pytest

from nfvcache.heuristic import HeuristicOptions, run
from nfvcache.milp import (BuildError, big_m, build_formulation, check_solution, decode_solution,
                           emit_mps, encode_solution, expected_variable_count, parse_label,
                           read_mps)
from nfvcache.power import eval_total
from nfvcache.scenario import Scenario, demand_from_users, draw_cell_loads
from nfvcache.solution import Solution
from nfvcache.solver import solve_lp
from nfvcache.topology import Kind, Topology, build_reduced_topology, core, rrh

RED = build_reduced_topology()
SC = Scenario()
DEMAND = draw_cell_loads(SC.profile, 10, 0, RED)

# Reduced instance: |H| = 8, |R| = 4, |N| = 2, 22 directed links, 14 between
# hosting nodes, 2 directed core links.
HAND_COUNTS = {
    "lam_b": 64, "lam_r": 32, "sig_b_hr": 32, "sig_b": 8, "sig_e_ph": 64, "sig_e": 8,
    "psi": 56, "sig_x": 8, "lam_e": 56, "lam_s_sr": 8, "lam_c_ur": 32, "sig_c": 32,
    "lam_g": 32, "lam_c_uhr": 256, "lam_s_shr": 64, "lam_s_sh": 16, "sig_s": 2, "lam_t": 56,
    "lam_r_link": 704, "lam_t_link": 784, "psi_b": 8, "psi_i": 8, "psi_f": 8, "delta": 8,
    "theta": 32, "z_c": 8, "z_i": 8, "z_f": 8, "w_virtual": 2, "w_route": 4, "fibers": 2,
    "w_physical": 2, "agg_ports": 2,
}


@pytest.fixture(scope="module")
def model():
    return build_formulation(SC, RED, "integrated", DEMAND)


@pytest.fixture(scope="module")
def heuristic_solution():
    return run(SC, RED, DEMAND)[0]


def test_variable_counts(model):
    assert model.counts_by_symbol() == HAND_COUNTS
    assert expected_variable_count(RED) == HAND_COUNTS
    assert model.n_vars == sum(HAND_COUNTS.values()) == 2414


def test_labels_unique_and_parseable(model):
    labels = [c.label for c in model.constraints]
    assert len(set(labels)) == len(labels)
    for lab in labels:
        family, key = parse_label(lab)
        assert family and all(key)


def test_big_m(model):
    total = DEMAND.total_fronthaul * (1 + 2 * SC.power.backhaul_ratio)
    assert big_m(DEMAND, SC, None) == pytest.approx(10 * total)


@pytest.mark.parametrize("approach", ["integrated", "virt-only", "caching-only"])
def test_heuristic_point_is_feasible_and_priced_alike(approach):
    m = build_formulation(SC, RED, approach, DEMAND)
    sol, _ = run(SC, RED, DEMAND, HeuristicOptions(approach=approach))
    x = encode_solution(m, sol)
    assert check_solution(m, x) == []
    assert m.objective_value(x) == pytest.approx(eval_total(sol, SC, RED).total, abs=1e-6)


def test_relaxation_bounds_heuristic(model, heuristic_solution):
    lp = solve_lp(model, engine="highs")
    assert lp.objective <= eval_total(heuristic_solution, SC, RED).total + 1e-6


def test_virt_only_disables_caches():
    m = build_formulation(SC, RED, "virt-only", DEMAND)
    for h in RED.hosting_nodes:
        assert m.variables[m.var("delta", h)].upper == 0.0


def test_caching_only_keeps_baseband_at_cells():
    m = build_formulation(SC, RED, "caching-only", DEMAND)
    for h in RED.hosting_nodes:
        ub = m.variables[m.var("sig_b", h)].upper
        assert ub == (1.0 if h.kind == Kind.ONU else 0.0)


def _flow_rows(violations, family):
    return sorted(lab for lab, _ in violations if parse_label(lab)[0] == family)


def test_zeroing_a_flow_breaks_conservation_at_its_two_ends(model, heuristic_solution):
    for symbol, family in (("lam_r_link", "C55"), ("lam_t_link", "C56")):
        flows = getattr(heuristic_solution, symbol)
        for key in [k for k, v in sorted(flows.items()) if v > 0][:5]:
            s = heuristic_solution.copy()
            getattr(s, symbol)[key] = 0.0
            got = _flow_rows(check_solution(model, encode_solution(model, s)), family)
            src, dst, x, y = key
            want = sorted(f"{family}({src},{dst},{n})" for n in (x, y))
            assert got == want


def test_decode_inverts_encode(model, heuristic_solution):
    x = encode_solution(model, heuristic_solution)
    back = decode_solution(model, x)
    got = sorted((n, tuple(map(str, k)), v) for n, k, v in back.items())
    want = sorted((n, tuple(map(str, k)), v) for n, k, v in heuristic_solution.nonzero().items())
    assert got and got == want


def test_encode_rejects_foreign_keys(model):
    sol = Solution()
    sol.psi_i[(core(5),)] = 1.0
    with pytest.raises(ValueError):
        encode_solution(model, sol)


def test_build_errors():
    with pytest.raises(BuildError):
        build_formulation(SC, RED, "caching-plus", DEMAND)
    with pytest.raises(BuildError):
        build_formulation(SC, RED, "integrated", demand_from_users({rrh(0): 3}, SC.radio))
    broken = Topology(RED.rrh_nodes, RED.onu_nodes, RED.olt_nodes, RED.core_nodes,
                      RED.access_links, {})
    with pytest.raises(BuildError):
        build_formulation(SC, broken, "integrated", DEMAND)


def test_mps_round_trip_of_formulation(model):
    back = read_mps(emit_mps(model))
    assert back.n_vars == model.n_vars and back.n_constraints == model.n_constraints
    assert [c.label for c in back.constraints] == [c.label for c in model.constraints]
