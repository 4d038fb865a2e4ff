"""Three-layer network: IP-over-WDM core mesh, GPON trees and RRH leaves."""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence


class Kind(enum.IntEnum):
    RRH = 0
    ONU = 1
    OLT = 2
    CORE = 3


_PREFIX = {Kind.RRH: "rrh", Kind.ONU: "onu", Kind.OLT: "olt", Kind.CORE: "core"}
_BY_PREFIX = {v: k for k, v in _PREFIX.items()}


class PathNotFound(LookupError):
    pass


@dataclass(frozen=True, order=True)
class NodeId:
    kind: Kind
    index: int

    def __post_init__(self):
        if self.index < 0:
            raise ValueError(f"negative node index {self.index}")
        object.__setattr__(self, "kind", Kind(self.kind))

    @property
    def label(self) -> str:
        return f"{_PREFIX[self.kind]}{self.index}"

    @classmethod
    def parse(cls, label: str) -> "NodeId":
        for prefix, kind in _BY_PREFIX.items():
            if label.startswith(prefix) and label[len(prefix):].isdigit():
                return cls(kind, int(label[len(prefix):]))
        raise ValueError(f"not a node label: {label!r}")

    def __str__(self) -> str:
        return self.label


def rrh(i: int) -> NodeId:
    return NodeId(Kind.RRH, i)


def onu(i: int) -> NodeId:
    return NodeId(Kind.ONU, i)


def olt(i: int) -> NodeId:
    return NodeId(Kind.OLT, i)


def core(i: int) -> NodeId:
    return NodeId(Kind.CORE, i)


@dataclass(frozen=True)
class CoreLinkGeometry:
    distance_km: float
    span_km: float = 80.0
    regenerator_count: int = 0

    def __post_init__(self):
        if not self.distance_km > 0 or not self.span_km > 0:
            raise ValueError("core link distance and span must be positive")
        if self.regenerator_count < 0:
            raise ValueError("regenerator count must be non-negative")

    @property
    def edfa_count(self) -> int:
        return edfa_count(self.distance_km, self.span_km)


def edfa_count(distance_km: float, span_km: float) -> int:
    """Amplifiers on a core fibre: one per started span beyond the first, plus
    a booster and a pre-amplifier.  Partial spans round up."""
    if not distance_km > 0 or not span_km > 0:
        raise ValueError("distance and span must be positive")
    return math.ceil(distance_km / span_km) - 1 + 2


Edge = tuple[NodeId, NodeId]


@dataclass(frozen=True)
class Topology:
    """Immutable node sets plus adjacency.

    ``access_links`` are undirected (RRH-ONU, ONU-OLT, OLT-core) pairs;
    ``core_links`` maps an undirected core pair ``(m, n)`` with ``m < n`` to its
    geometry.  Neighbour maps and directed link lists are derived once.
    """

    rrh_nodes: tuple[NodeId, ...]
    onu_nodes: tuple[NodeId, ...]
    olt_nodes: tuple[NodeId, ...]
    core_nodes: tuple[NodeId, ...]
    access_links: tuple[Edge, ...]
    core_links: Mapping[Edge, CoreLinkGeometry]
    full_adjacency: Mapping[NodeId, tuple[NodeId, ...]] = field(init=False, repr=False)
    core_adjacency: Mapping[NodeId, tuple[NodeId, ...]] = field(init=False, repr=False)

    def __post_init__(self):
        adj: dict[NodeId, set[NodeId]] = {n: set() for n in self.nodes}
        for a, b in list(self.access_links) + list(self.core_links):
            adj.setdefault(a, set()).add(b)
            adj.setdefault(b, set()).add(a)
        object.__setattr__(self, "full_adjacency",
                           {n: tuple(sorted(v)) for n, v in sorted(adj.items())})
        cadj = {m: tuple(n for n in self.full_adjacency.get(m, ()) if n.kind == Kind.CORE)
                for m in self.core_nodes}
        object.__setattr__(self, "core_adjacency", cadj)

    # -- node sets --------------------------------------------------------
    @property
    def nodes(self) -> tuple[NodeId, ...]:
        return tuple(sorted(self.rrh_nodes + self.onu_nodes + self.olt_nodes + self.core_nodes))

    @property
    def hosting_nodes(self) -> tuple[NodeId, ...]:
        return tuple(sorted(self.onu_nodes + self.olt_nodes + self.core_nodes))

    def neighbors(self, x: NodeId) -> tuple[NodeId, ...]:
        return self.full_adjacency[x]

    def directed_links(self, within: Iterable[NodeId] | None = None) -> list[Edge]:
        """Every ordered neighbour pair, optionally restricted to a node subset."""
        keep = None if within is None else set(within)
        out = []
        for x, ys in self.full_adjacency.items():
            if keep is not None and x not in keep:
                continue
            out.extend((x, y) for y in ys if keep is None or y in keep)
        return out

    def core_directed_links(self) -> list[Edge]:
        return [(m, n) for m in self.core_nodes for n in self.core_adjacency[m]]

    def geometry(self, m: NodeId, n: NodeId) -> CoreLinkGeometry:
        return self.core_links[(m, n) if m < n else (n, m)]

    # -- tree queries -----------------------------------------------------
    def parent(self, x: NodeId) -> NodeId | None:
        """The next node towards the core (None for core nodes)."""
        if x.kind == Kind.CORE:
            return None
        up = Kind(x.kind + 1)
        for y in self.full_adjacency[x]:
            if y.kind == up:
                return y
        return None

    def ancestors(self, x: NodeId) -> list[NodeId]:
        out = []
        p = self.parent(x)
        while p is not None:
            out.append(p)
            p = self.parent(p)
        return out

    def subtree_rrhs(self, x: NodeId) -> list[NodeId]:
        return [r for r in self.rrh_nodes if r == x or x in self.ancestors(r)]

    # -- paths --------------------------------------------------------------
    def downstream_neighbors(self, x: NodeId) -> tuple[NodeId, ...]:
        """Neighbours reachable in the download direction: core->core, and
        one layer down otherwise (no traffic flows back up a PON tree)."""
        if x.kind == Kind.CORE:
            return tuple(y for y in self.full_adjacency[x] if y.kind in (Kind.CORE, Kind.OLT))
        return tuple(y for y in self.full_adjacency[x] if y.kind == x.kind - 1)

    def shortest_path(self, x: NodeId, y: NodeId, downstream: bool = False) -> list[NodeId]:
        return shortest_path(self, x, y, downstream=downstream)

    def hops(self, x: NodeId, y: NodeId, downstream: bool = False) -> int:
        return len(shortest_path(self, x, y, downstream=downstream)) - 1


def _bfs_dist(succ, target: NodeId, pred) -> dict[NodeId, int]:
    dist = {target: 0}
    queue = deque([target])
    while queue:
        v = queue.popleft()
        for u in pred(v):
            if u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def shortest_path(topology: Topology, x: NodeId, y: NodeId, downstream: bool = False) -> list[NodeId]:
    """Minimum-hop path from ``x`` to ``y`` as a node list.

    Among equal-length paths the one whose successive nodes are smallest in
    ``(kind, index)`` order wins.  With ``downstream=True`` only download
    direction moves are allowed (see :meth:`Topology.downstream_neighbors`).
    """
    for v in (x, y):
        if v not in topology.full_adjacency:
            raise KeyError(f"unknown node {v}")
    if downstream:
        succ = topology.downstream_neighbors
        preds: dict[NodeId, list[NodeId]] = {}
        for u in topology.full_adjacency:
            for v in succ(u):
                preds.setdefault(v, []).append(u)
        pred = lambda v: preds.get(v, ())  # noqa: E731
    else:
        succ = topology.neighbors
        pred = topology.neighbors
    dist = _bfs_dist(succ, y, pred)
    if x not in dist:
        raise PathNotFound(f"no path from {x} to {y}")
    path = [x]
    while path[-1] != y:
        d = dist[path[-1]]
        path.append(min(v for v in succ(path[-1]) if dist.get(v) == d - 1))
    return path


def build_topology(
    n_core: int = 3,
    olts_per_core: int = 2,
    onus_per_olt: int = 3,
    core_link_km: float = 400.0,
    span_km: float = 80.0,
    core_edges: Sequence[tuple[int, int]] | None = None,
    regenerators: Mapping[tuple[int, int], int] | None = None,
) -> Topology:
    """Regular tree-over-mesh topology; one RRH hangs off every ONU.

    The core graph is a full mesh unless ``core_edges`` are given.
    """
    if not core_link_km > 0:
        raise ValueError("core_link_km must be positive")
    cores = tuple(core(i) for i in range(n_core))
    olts = tuple(olt(i) for i in range(n_core * olts_per_core))
    onus = tuple(onu(i) for i in range(len(olts) * onus_per_olt))
    rrhs = tuple(rrh(i) for i in range(len(onus)))
    access: list[Edge] = []
    access += [(rrhs[i], onus[i]) for i in range(len(onus))]
    access += [(onus[i], olts[i // onus_per_olt]) for i in range(len(onus))]
    access += [(olts[i], cores[i // olts_per_core]) for i in range(len(olts))]
    if core_edges is None:
        core_edges = [(a, b) for a in range(n_core) for b in range(a + 1, n_core)]
    regenerators = dict(regenerators or {})
    links = {}
    for a, b in core_edges:
        a, b = min(a, b), max(a, b)
        links[(cores[a], cores[b])] = CoreLinkGeometry(
            core_link_km, span_km, regenerators.get((a, b), 0))
    return Topology(rrhs, onus, olts, cores, tuple(access), links)


def build_paper_topology(core_link_km: float = 400.0) -> Topology:
    """3 core nodes in a triangle, 2 GPONs per core node, 3 ONU/RRH per GPON."""
    return build_topology(3, 2, 3, core_link_km)


def build_reduced_topology(core_link_km: float = 400.0) -> Topology:
    """2 core nodes, 1 OLT each, 2 ONU/RRH per OLT: small enough for exact B&B."""
    return build_topology(2, 1, 2, core_link_km)


def validate(topology: Topology) -> list[str]:
    """Structural violations as human-readable strings (empty when valid)."""
    problems = []
    adj = topology.full_adjacency
    hosting = set(topology.hosting_nodes)
    for r in topology.rrh_nodes:
        if r in hosting:
            problems.append(f"{r}: RRH also listed as hosting node")
        nbrs = adj.get(r, ())
        if len(nbrs) != 1 or nbrs[0].kind != Kind.ONU:
            problems.append(f"{r}: RRH must have exactly one neighbour, an ONU (has {len(nbrs)})")
    for kind, nodes in ((Kind.OLT, topology.onu_nodes), (Kind.CORE, topology.olt_nodes)):
        for x in nodes:
            ups = [y for y in adj.get(x, ()) if y.kind == kind]
            if len(ups) != 1:
                problems.append(f"{x}: must attach to exactly one {kind.name} (has {len(ups)})")
    for (m, n), geo in topology.core_links.items():
        if m.kind != Kind.CORE or n.kind != Kind.CORE:
            problems.append(f"{m}-{n}: core link between non-core nodes")
        if not geo.distance_km > 0:
            problems.append(f"{m}-{n}: non-positive distance")
    if topology.core_nodes:
        seen = {topology.core_nodes[0]}
        stack = [topology.core_nodes[0]]
        while stack:
            for n in topology.core_adjacency[stack.pop()]:
                if n not in seen:
                    seen.add(n)
                    stack.append(n)
        missing = sorted(set(topology.core_nodes) - seen)
        if missing:
            problems.append("core graph disconnected: unreachable " + ", ".join(map(str, missing)))
    return problems


def _pair(text: str) -> tuple[int, int]:
    a, b = text.split("-")
    return int(a), int(b)


def topology_from_section(section: Mapping[str, str], span_km: float = 80.0) -> Topology:
    """Build from ``key = value`` pairs (a ``[topology]`` scenario section).

    Keys: ``preset`` (full | reduced), ``n_core``, ``olts_per_core``,
    ``onus_per_olt``, ``core_link_km``, ``core_edges`` (``0-1, 1-2``) and
    ``regenerators`` (``0-1:2, 1-2:1``).  Explicit keys override the preset.
    """
    known = {"preset", "n_core", "olts_per_core", "onus_per_olt", "core_link_km",
             "core_edges", "regenerators"}
    unknown = set(section) - known
    if unknown:
        raise KeyError(f"unknown [topology] keys: {', '.join(sorted(unknown))}")
    presets = {"full": (3, 2, 3), "reduced": (2, 1, 2)}
    preset = section.get("preset", "full").strip()
    if preset not in presets:
        raise ValueError(f"unknown topology preset {preset!r}")
    n_core, per_core, per_olt = presets[preset]
    edges = None
    if section.get("core_edges", "").strip():
        edges = [_pair(t.strip()) for t in section["core_edges"].split(",")]
    regen = {}
    if section.get("regenerators", "").strip():
        for item in section["regenerators"].split(","):
            link, count = item.strip().split(":")
            regen[_pair(link)] = int(count)
    return build_topology(int(section.get("n_core", n_core)),
                          int(section.get("olts_per_core", per_core)),
                          int(section.get("onus_per_olt", per_olt)),
                          float(section.get("core_link_km", 400.0)), span_km, edges, regen)
