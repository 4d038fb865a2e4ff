"""Per-device power formulas and the whole-network evaluator."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nfvcache.power import (CATEGORIES, CapacityError, cache_power, eval_total, olt_power,
                            onu_power, server_power, video_server_power)
from nfvcache.scenario import PowerParams, Scenario
from nfvcache.solution import Solution
from nfvcache.topology import build_paper_topology, core, olt, onu, rrh

P = PowerParams()
SC = Scenario()
FULL = build_paper_topology()


def test_empty_solution_draws_only_always_on_access(full):
    b = eval_total(Solution(), SC, full)
    assert b.onu_rrh == pytest.approx(18 * 1140)
    assert b.olt == pytest.approx(6 * 60)
    assert b.total == pytest.approx(18 * 1140 + 6 * 60)
    assert b.vm_servers == b.caches == b.video_server == 0


@pytest.mark.parametrize("i,f,a,w", [(0, 0.5, 1, 238.5), (2, 0.0, 1, 336.0), (0, 0, 0, 0.0),
                                     (1, 0.0, 1, 224.0)])
def test_server_power(i, f, a, w):
    assert server_power(i, f, a, P) == pytest.approx(w)


@pytest.mark.parametrize("args", [(0, 1.0, 1), (0, -0.1, 1), (0, 0.2, 2), (-1, 0.0, 1)])
def test_server_power_rejects(args):
    with pytest.raises(ValueError):
        server_power(*args, P)


@pytest.mark.parametrize("pct,w", [(100, 550.0), (50, 275.0), (0, 0.0)])
def test_cache_power(pct, w):
    assert cache_power(pct, P) == pytest.approx(w)
    with pytest.raises(ValueError):
        cache_power(101, P)


def test_olt_power():
    assert olt_power(0, P) == 60.0
    assert olt_power(8600, P) == 1940.0
    assert olt_power(4300, P) == pytest.approx(1000.0)
    with pytest.raises(CapacityError):
        olt_power(8600.1, P)
    with pytest.raises(ValueError):
        olt_power(-1, P)


def test_onu_and_video_power():
    assert onu_power(0, P) == 1140.0
    assert onu_power(10, P) == pytest.approx(1155.0)
    # 211.1 J/Gb * 0.1344 * 10 Gbps
    assert video_server_power(10, P) == pytest.approx(283.7184)


def test_one_full_server_at_a_core(full):
    sol = Solution()
    sol.psi_i[(core(0),)] = 1.0
    sol.sig_x[(core(0),)] = 1.0
    assert eval_total(sol, SC, full).vm_servers == pytest.approx(224.0)


def test_bad_keys_rejected(full):
    sol = Solution()
    sol.lam_r_link[(olt(0), rrh(0), olt(0), rrh(0))] = 1.0
    with pytest.raises(ValueError):
        eval_total(sol, SC, full)
    sol = Solution()
    sol.psi_i[(core(7),)] = 1.0
    with pytest.raises(ValueError):
        eval_total(sol, SC, full)


# RRH-bound flows on legal links, ending at each RRH's own ONU
_LINKS = [(olt(0), rrh(0), olt(0), onu(0)), (olt(0), rrh(0), onu(0), rrh(0)),
          (core(0), rrh(1), core(0), olt(0)), (core(0), rrh(1), olt(0), onu(1)),
          (core(1), rrh(5), core(1), core(0))]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0, 50), min_size=len(_LINKS), max_size=len(_LINKS)),
       st.integers(0, len(_LINKS) - 1), st.floats(0.01, 50))
def test_more_traffic_never_costs_less(flows, k, extra):
    sol = Solution()
    for key, v in zip(_LINKS, flows):
        sol.lam_r_link[key] = v
    base = eval_total(sol, SC, FULL)
    sol.lam_r_link[_LINKS[k]] += extra
    more = eval_total(sol, SC, FULL)
    assert more.total >= base.total
    if _LINKS[k][2].kind != core(0).kind:
        assert more.total > base.total
    assert sum(more.as_dict()[c] for c in CATEGORIES) == pytest.approx(more.total)


@given(st.integers(0, 5), st.floats(0, 0.999), st.floats(0, 0.999))
def test_server_power_monotone(i, f1, f2):
    lo, hi = sorted((f1, f2))
    assert server_power(i, lo, 1, P) <= server_power(i, hi, 1, P)
    assert server_power(i, lo, 1, P) < server_power(i + 1, lo, 1, P)
