"""Topology construction, paths, amplifier counts and validation."""

from collections import deque

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nfvcache.topology import (CoreLinkGeometry, Kind, NodeId, PathNotFound, Topology,
                               build_paper_topology, build_topology, core, edfa_count, olt,
                               onu, rrh, shortest_path, topology_from_section, validate)

FULL = build_paper_topology()


def bfs_hops(adj, x, y):
    # plain BFS over the undirected adjacency, independent of the package's path code
    seen = {x: 0}
    q = deque([x])
    while q:
        v = q.popleft()
        for u in adj[v]:
            if u not in seen:
                seen[u] = seen[v] + 1
                q.append(u)
    return seen[y]


def test_full_counts(full):
    assert len(full.core_nodes) == 3
    assert len(full.olt_nodes) == 6
    assert len(full.onu_nodes) == 18
    assert len(full.rrh_nodes) == 18
    assert len(full.hosting_nodes) == 27
    assert len(full.core_links) == 3
    assert validate(full) == []


def test_reduced_counts(reduced):
    assert (len(reduced.core_nodes), len(reduced.olt_nodes), len(reduced.onu_nodes),
            len(reduced.rrh_nodes)) == (2, 2, 4, 4)
    assert validate(reduced) == []


def test_each_rrh_hangs_off_its_own_onu(full):
    for i, r in enumerate(sorted(full.rrh_nodes)):
        assert full.neighbors(r) == (onu(i),)


def test_hops_examples(full):
    assert full.hops(rrh(0), onu(0)) == 1
    assert full.hops(rrh(0), olt(0)) == 2
    assert full.hops(olt(0), core(0)) == 1
    # RRH under core 0 to an OLT under core 1 crosses one core link
    assert full.hops(rrh(0), olt(2)) == 5
    assert full.hops(rrh(0), olt(2)) == bfs_hops(full.full_adjacency, rrh(0), olt(2))


def test_tie_break_prefers_smallest_node():
    # square core: 0-1, 1-2, 2-3, 3-0; two equal routes from 0 to 2
    t = build_topology(4, 1, 1, core_edges=[(0, 1), (1, 2), (2, 3), (0, 3)])
    assert shortest_path(t, core(0), core(2)) == [core(0), core(1), core(2)]


def test_downstream_paths_never_climb(full):
    path = shortest_path(full, core(1), rrh(0), downstream=True)
    assert [n.kind for n in path] == [Kind.CORE, Kind.CORE, Kind.OLT, Kind.ONU, Kind.RRH]
    with pytest.raises(PathNotFound):
        shortest_path(full, rrh(0), core(0), downstream=True)


def test_unknown_node_raises(full):
    with pytest.raises(KeyError):
        full.hops(rrh(0), core(9))


@pytest.mark.parametrize("d,s,n", [(80, 80, 2), (160, 80, 3), (40, 80, 2), (400, 80, 6)])
def test_edfa_count(d, s, n):
    assert edfa_count(d, s) == n


@pytest.mark.parametrize("d,s", [(0, 80), (-5, 80), (80, 0)])
def test_edfa_count_rejects_non_positive(d, s):
    with pytest.raises(ValueError):
        edfa_count(d, s)


def test_validate_rrh_with_two_neighbours(full):
    access = full.access_links + ((rrh(0), onu(1)),)
    t = Topology(full.rrh_nodes, full.onu_nodes, full.olt_nodes, full.core_nodes,
                 access, full.core_links)
    problems = validate(t)
    assert len(problems) == 1 and "rrh0" in problems[0]


def test_validate_disconnected_core(full):
    links = {k: v for k, v in full.core_links.items() if core(2) not in k}
    t = Topology(full.rrh_nodes, full.onu_nodes, full.olt_nodes, full.core_nodes,
                 full.access_links, links)
    problems = validate(t)
    assert len(problems) == 1 and "disconnected" in problems[0]


def test_node_labels_round_trip():
    for n in (rrh(3), onu(0), olt(12), core(2)):
        assert NodeId.parse(n.label) == n


def test_section_presets_and_overrides():
    t = topology_from_section({"preset": "reduced"})
    assert len(t.rrh_nodes) == 4
    t = topology_from_section({"preset": "full", "core_edges": "0-1, 1-2",
                               "regenerators": "0-1:2", "core_link_km": "160"})
    assert len(t.core_links) == 2
    assert t.geometry(core(0), core(1)).regenerator_count == 2
    assert t.geometry(core(1), core(2)).edfa_count == 3
    with pytest.raises(KeyError):
        topology_from_section({"colour": "blue"})


def test_geometry_edfa_property():
    assert CoreLinkGeometry(160.0, 80.0).edfa_count == 3


nodes = st.sampled_from(FULL.nodes)


@settings(max_examples=200, deadline=None)
@given(nodes, nodes)
def test_hops_symmetric_and_match_bfs(x, y):
    h = FULL.hops(x, y)
    assert h == FULL.hops(y, x)
    assert h == bfs_hops(FULL.full_adjacency, x, y)
    path = FULL.shortest_path(x, y)
    assert path[0] == x and path[-1] == y
    assert all(b in FULL.full_adjacency[a] for a, b in zip(path, path[1:]))


@given(st.floats(1.0, 5000.0), st.floats(1.0, 5000.0), st.floats(20.0, 200.0))
def test_edfa_count_monotone(d1, d2, span):
    lo, hi = sorted((d1, d2))
    assert 2 <= edfa_count(lo, span) <= edfa_count(hi, span)
