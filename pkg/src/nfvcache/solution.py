"""Decision-variable container shared by the MILP decoder and the heuristic.

A :class:`Solution` holds one sparse mapping per model symbol.  Keys are tuples
of :class:`~nfvcache.topology.NodeId`; absent keys read as zero.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Iterator

from .topology import NodeId

CONTINUOUS, BINARY, INTEGER = "C", "B", "I"


@dataclass(frozen=True)
class Symbol:
    name: str
    kind: str
    arity: int
    doc: str


SYMBOLS: tuple[Symbol, ...] = (
    Symbol("lam_b", CONTINUOUS, 2, "CNVM traffic from host p to BBUVMs at h"),
    Symbol("lam_r", CONTINUOUS, 2, "download traffic from BBUVMs at h to RRH r"),
    Symbol("sig_b_hr", BINARY, 2, "h hosts a BBUVM serving r"),
    Symbol("sig_b", BINARY, 1, "h hosts a BBUVM"),
    Symbol("sig_e_ph", BINARY, 2, "CNVMs at p serve BBUVMs at h"),
    Symbol("sig_e", BINARY, 1, "p hosts CNVMs"),
    Symbol("psi", BINARY, 2, "both p and q host CNVMs"),
    Symbol("sig_x", BINARY, 1, "h hosts a VM of any type"),
    Symbol("lam_e", CONTINUOUS, 2, "inter-CNVM traffic p -> q"),
    Symbol("lam_s_sr", CONTINUOUS, 2, "video server s traffic for RRH r"),
    Symbol("lam_c_ur", CONTINUOUS, 2, "cache u traffic for RRH r"),
    Symbol("sig_c", BINARY, 2, "cache at u serves r"),
    Symbol("lam_g", CONTINUOUS, 2, "regular traffic from BBUVM h to r"),
    Symbol("lam_c_uhr", CONTINUOUS, 3, "cache u traffic for r through BBUVM h"),
    Symbol("lam_s_shr", CONTINUOUS, 3, "server s traffic for r through BBUVM h"),
    Symbol("lam_s_sh", CONTINUOUS, 2, "server s traffic to BBUVMs at h"),
    Symbol("sig_s", BINARY, 1, "video server attached to s"),
    Symbol("lam_t", CONTINUOUS, 2, "total traffic between hosting nodes p -> q"),
    Symbol("lam_r_link", CONTINUOUS, 4, "traffic h -> r on link (x, y)"),
    Symbol("lam_t_link", CONTINUOUS, 4, "traffic p -> q on link (x, y)"),
    Symbol("psi_b", CONTINUOUS, 1, "baseband workload at h (GOPS)"),
    Symbol("psi_i", INTEGER, 1, "integer part of normalised workload at h"),
    Symbol("psi_f", CONTINUOUS, 1, "fractional part of normalised workload at h"),
    Symbol("delta", CONTINUOUS, 1, "cache hit ratio at u"),
    Symbol("theta", CONTINUOUS, 2, "sig_c[u,r] * delta[u]"),
    Symbol("z_c", CONTINUOUS, 1, "cache size at u (% of a full cache)"),
    Symbol("z_i", INTEGER, 1, "integer part of cache size"),
    Symbol("z_f", CONTINUOUS, 1, "fractional part of cache size"),
    Symbol("w_virtual", INTEGER, 2, "wavelengths on virtual link (i, j)"),
    Symbol("w_route", INTEGER, 4, "wavelengths of virtual (i, j) on physical (m, n)"),
    Symbol("fibers", INTEGER, 2, "fibres on physical link (m, n)"),
    Symbol("w_physical", INTEGER, 2, "wavelengths on physical link (m, n)"),
    Symbol("agg_ports", INTEGER, 1, "aggregation ports of the router at m"),
)

SYMBOL_BY_NAME = {s.name: s for s in SYMBOLS}

Key = tuple[NodeId, ...]


@dataclass
class Solution:
    lam_b: dict[Key, float] = field(default_factory=dict)
    lam_r: dict[Key, float] = field(default_factory=dict)
    sig_b_hr: dict[Key, float] = field(default_factory=dict)
    sig_b: dict[Key, float] = field(default_factory=dict)
    sig_e_ph: dict[Key, float] = field(default_factory=dict)
    sig_e: dict[Key, float] = field(default_factory=dict)
    psi: dict[Key, float] = field(default_factory=dict)
    sig_x: dict[Key, float] = field(default_factory=dict)
    lam_e: dict[Key, float] = field(default_factory=dict)
    lam_s_sr: dict[Key, float] = field(default_factory=dict)
    lam_c_ur: dict[Key, float] = field(default_factory=dict)
    sig_c: dict[Key, float] = field(default_factory=dict)
    lam_g: dict[Key, float] = field(default_factory=dict)
    lam_c_uhr: dict[Key, float] = field(default_factory=dict)
    lam_s_shr: dict[Key, float] = field(default_factory=dict)
    lam_s_sh: dict[Key, float] = field(default_factory=dict)
    sig_s: dict[Key, float] = field(default_factory=dict)
    lam_t: dict[Key, float] = field(default_factory=dict)
    lam_r_link: dict[Key, float] = field(default_factory=dict)
    lam_t_link: dict[Key, float] = field(default_factory=dict)
    psi_b: dict[Key, float] = field(default_factory=dict)
    psi_i: dict[Key, float] = field(default_factory=dict)
    psi_f: dict[Key, float] = field(default_factory=dict)
    delta: dict[Key, float] = field(default_factory=dict)
    theta: dict[Key, float] = field(default_factory=dict)
    z_c: dict[Key, float] = field(default_factory=dict)
    z_i: dict[Key, float] = field(default_factory=dict)
    z_f: dict[Key, float] = field(default_factory=dict)
    w_virtual: dict[Key, float] = field(default_factory=dict)
    w_route: dict[Key, float] = field(default_factory=dict)
    fibers: dict[Key, float] = field(default_factory=dict)
    w_physical: dict[Key, float] = field(default_factory=dict)
    agg_ports: dict[Key, float] = field(default_factory=dict)

    def get(self, symbol: str, *key: NodeId) -> float:
        return getattr(self, symbol).get(tuple(key), 0.0)

    def items(self) -> Iterator[tuple[str, Key, float]]:
        for s in SYMBOLS:
            for k, v in getattr(self, s.name).items():
                yield s.name, k, v

    def nonzero(self, tol: float = 0.0) -> "Solution":
        out = Solution()
        for name, k, v in self.items():
            if abs(v) > tol:
                getattr(out, name)[k] = v
        return out

    def copy(self) -> "Solution":
        return Solution(**{f.name: dict(getattr(self, f.name)) for f in dataclasses.fields(self)})


assert [f.name for f in dataclasses.fields(Solution)] == [s.name for s in SYMBOLS]
