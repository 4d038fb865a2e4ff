"""Radio demand, workloads, load draws, inter-VM traffic and scenario files."""

import configparser
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nfvcache.scenario import (DemandSet, DiurnalProfile, PowerParams, RadioParams, Scenario,
                               bbuvm_workload, cnvm_inter_traffic, core_pairs, draw_cell_loads,
                               load_scenario, rrh_demand, scenario_from_config, split_demand)
from nfvcache.topology import build_reduced_topology, rrh

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"
RADIO = RadioParams()


def test_full_cell_workload_is_400_gops():
    # 30A + 10A^2 + 20*Q*L*Y with A=2, Q=6, L=10/8, Y=2
    assert RADIO.bbu_workload_full == 400.0


def test_cache_energy_per_gb():
    assert PowerParams().cache_energy_per_gb == 550 / 14400


@pytest.mark.parametrize("users,gbps", [(10, 9.8304), (5, 4.9152), (0, 0.0), (1, 0.98304)])
def test_rrh_demand(users, gbps):
    assert rrh_demand(users, RADIO) == pytest.approx(gbps, abs=1e-12)


@pytest.mark.parametrize("users", [-1, 11])
def test_rrh_demand_out_of_range(users):
    with pytest.raises(ValueError):
        rrh_demand(users, RADIO)


def test_split_demand():
    video, regular = split_demand(10.0)
    assert video == pytest.approx(8.0) and regular == pytest.approx(2.0)
    with pytest.raises(ValueError):
        split_demand(-0.1)


@pytest.mark.parametrize("gbps,gops", [(9.8304, 400.0), (4.9152, 200.0), (0.0, 0.0)])
def test_bbuvm_workload(gbps, gops):
    assert bbuvm_workload(gbps, RADIO) == pytest.approx(gops, abs=1e-9)


def test_draw_is_deterministic(full):
    a = draw_cell_loads(DiurnalProfile(), 19, 7, full)
    b = draw_cell_loads(DiurnalProfile(), 19, 7, full)
    assert a.users == b.users
    assert a.users != draw_cell_loads(DiurnalProfile(), 19, 8, full).users


def test_draw_bounds_and_hour_check(full):
    for hour in range(24):
        d = draw_cell_loads(DiurnalProfile(), hour, 0, full)
        assert all(1 <= u <= 10 for u in d.users.values())
        assert sorted(d.users) == sorted(full.rrh_nodes)
    with pytest.raises(ValueError):
        draw_cell_loads(DiurnalProfile(), 24, 0, full)


@pytest.mark.parametrize("hour", [1, 8, 19])
def test_draw_mean_tracks_window(full, hour):
    profile = DiurnalProfile()
    m = profile[hour]
    # window of +-2 around the rounded mean, clamped to [1, 10]
    window = [min(10, max(1, v)) for v in range(round(m) - 2, round(m) + 3)]
    draws = []
    seed = 0
    while len(draws) < 10_000:
        draws.extend(draw_cell_loads(profile, hour, seed, full).users.values())
        seed += 1
    assert abs(np.mean(draws[:10_000]) - np.mean(window)) <= 0.2


def _demand_of(total):
    rs = [rrh(0), rrh(1)]
    fh = {rs[0]: total / 2, rs[1]: total / 2}
    return DemandSet({r: 0 for r in rs}, fh, {r: 0.8 * v for r, v in fh.items()},
                     {r: 0.2 * v for r, v in fh.items()})


def test_inter_traffic_total(full):
    nabla = cnvm_inter_traffic(0.1, _demand_of(100.0), core_pairs(full))
    assert nabla.total == pytest.approx(1.344)
    assert len(nabla.pairs) == 6
    assert all(v == pytest.approx(0.224) for v in nabla.pairs.values())


def test_inter_traffic_zero_fraction(full):
    nabla = cnvm_inter_traffic(0.0, _demand_of(100.0), core_pairs(full))
    assert nabla.total == 0.0
    with pytest.raises(ValueError):
        cnvm_inter_traffic(1.5, _demand_of(1.0), core_pairs(full))


@given(st.floats(0, 1), st.floats(0, 500))
def test_inter_traffic_linear(f, total):
    pairs = core_pairs(build_reduced_topology())
    nabla = cnvm_inter_traffic(f, _demand_of(total), pairs)
    assert nabla.total == pytest.approx(f * 0.1344 * total, rel=1e-9, abs=1e-12)


@given(st.floats(0, 1e4, allow_nan=False))
def test_split_partitions_demand(x):
    v, r = split_demand(x)
    assert v >= 0 and r >= 0
    assert math.isclose(v + r, x, rel_tol=1e-12, abs_tol=1e-12)


@given(st.integers(0, 10), st.integers(0, 10))
def test_demand_and_workload_linear(a, b):
    d = rrh_demand(a, RADIO) + rrh_demand(b, RADIO)
    assert bbuvm_workload(d, RADIO) == pytest.approx(40.0 * (a + b))


def test_full_scenario_file_matches_defaults():
    sc, _ = load_scenario(SCENARIOS / "full.ini")
    assert sc == Scenario()


def _cfg(text):
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    cp.read_string(text)
    return cp


def test_aliases_and_errors():
    sc = scenario_from_config(_cfg("[power]\nomega_olt_max = 2000\nalpha = 0.2\n"))
    assert sc.power.olt_max == 2000 and sc.power.backhaul_ratio == 0.2
    with pytest.raises(KeyError):
        scenario_from_config(_cfg("[power]\nolt_max = 1\nomega_olt_max = 2\n"))
    with pytest.raises((KeyError, ValueError, TypeError)):
        scenario_from_config(_cfg("[power]\nwarp_drive = 1\n"))


def test_profile_extremes():
    p = DiurnalProfile()
    assert p.peak_hour() == 19 and p.trough_hour() == 1
    with pytest.raises(ValueError):
        DiurnalProfile((1.0,) * 23)
