"""Input parameters, diurnal user profile and closed-form demand formulas.

Every default lives in a dataclass field, so a scenario file can override
any of them, including the assumed ones (core link distances, hosting
budgets, the diurnal profile, the Zipf catalogue).
"""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .topology import Kind, NodeId, Topology

# Hourly mean active users per cell, hour 0..23: synthetic, with a night
# trough and an evening peak.
SYNTHETIC_PROFILE: tuple[float, ...] = (
    2, 1, 1, 1, 1, 2, 3, 4, 6, 7, 8, 8, 9, 9, 8, 8, 7, 8, 9, 10, 9, 7, 5, 3)

VIDEO_SHARE = 0.8
LOAD_WINDOW_HALF_WIDTH = 2


@dataclass(frozen=True)
class RadioParams:
    line_coding: float = 10 / 8
    mimo_layers: int = 2
    qam_bits: int = 6
    antennas: int = 2
    cpri_rate: float = 9.8304          # Gbps, CPRI option 7
    prb_per_user: int = 5
    max_users_per_cell: int = 10

    def __post_init__(self):
        for f in dataclasses.fields(self):
            if not getattr(self, f.name) > 0:
                raise ValueError(f"radio parameter {f.name} must be positive")

    @property
    def cell_prb_total(self) -> int:
        # Total PRBs of a cell: enough for every user at the per-user allocation.
        return self.prb_per_user * self.max_users_per_cell

    @property
    def bbu_workload_full(self) -> float:
        """GOPS needed to process one fully loaded RRH."""
        a, q, l, y = self.antennas, self.qam_bits, self.line_coding, self.mimo_layers
        return 30 * a + 10 * a ** 2 + 20 * q * l * y


@dataclass(frozen=True)
class PowerParams:
    onu_max: float = 15.0              # W
    olt_max: float = 1940.0
    olt_idle: float = 60.0
    olt_capacity: float = 8600.0       # Gbps
    onu_capacity: float = 10.0
    rrh_power: float = 1140.0
    server_max: float = 365.0
    server_idle: float = 112.0
    cache_max: float = 550.0
    cache_capacity_gb: float = 14400.0
    video_energy_per_gb: float = 211.1  # J/Gb
    wavelength_rate: float = 40.0       # Gbps
    wavelengths_per_fiber: int = 32
    transponder: float = 167.0
    router_port: float = 825.0
    regenerator: float = 334.0
    edfa: float = 55.0
    span_km: float = 80.0
    server_workload: float = 368.0      # GOPS
    cnvm_workload: float = 26.17        # GOPS
    backhaul_ratio: float = 0.1344
    # Hosting budgets (W) per layer, assumed: chosen so an ONU fits one
    # fully loaded cell, an OLT a full GPON and a core node anything.
    hosting_budget_onu: float = 730.0
    hosting_budget_olt: float = 3650.0
    hosting_budget_core: float = 36500.0

    def __post_init__(self):
        if not self.olt_idle < self.olt_max:
            raise ValueError("OLT idle power must be below its maximum")
        if not self.server_idle < self.server_max:
            raise ValueError("server idle power must be below its maximum")
        if not 0 < self.backhaul_ratio < 1:
            raise ValueError("backhaul ratio must lie in (0, 1)")

    @property
    def cache_energy_per_gb(self) -> float:
        return self.cache_max / self.cache_capacity_gb

    def hosting_budget(self, node: NodeId) -> float:
        return {Kind.ONU: self.hosting_budget_onu, Kind.OLT: self.hosting_budget_olt,
                Kind.CORE: self.hosting_budget_core}[node.kind]


@dataclass(frozen=True)
class CacheParams:
    """Zipf popularity model behind the cache-size/hit-ratio curve."""
    zipf_exponent: float = 0.8
    catalog_size: int = 10_000
    segments: int = 5


@dataclass(frozen=True)
class DiurnalProfile:
    means: tuple[float, ...] = SYNTHETIC_PROFILE

    def __post_init__(self):
        object.__setattr__(self, "means", tuple(float(m) for m in self.means))
        if len(self.means) != 24:
            raise ValueError("diurnal profile needs 24 hourly values")
        if min(self.means) < 0:
            raise ValueError("profile values must be non-negative")

    def __getitem__(self, hour: int) -> float:
        return self.means[hour]

    def peak_hour(self) -> int:
        return int(np.argmax(self.means))

    def trough_hour(self) -> int:
        return int(np.argmin(self.means))


@dataclass(frozen=True)
class Scenario:
    radio: RadioParams = field(default_factory=RadioParams)
    power: PowerParams = field(default_factory=PowerParams)
    cache: CacheParams = field(default_factory=CacheParams)
    profile: DiurnalProfile = field(default_factory=DiurnalProfile)
    seed: int = 0
    inter_traffic_fraction: float = 0.0

    def replace(self, **changes) -> "Scenario":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class DemandSet:
    """Per-RRH users and the traffic derived from them (Gbps)."""
    users: Mapping[NodeId, int]
    fronthaul: Mapping[NodeId, float]
    video: Mapping[NodeId, float]
    regular: Mapping[NodeId, float]
    hour: int = 0
    seed: int = 0

    @property
    def rrhs(self) -> list[NodeId]:
        return sorted(self.users)

    @property
    def total_users(self) -> int:
        return sum(self.users.values())

    @property
    def total_fronthaul(self) -> float:
        return sum(self.fronthaul.values())


@dataclass(frozen=True)
class CnvmInterTrafficSpec:
    fraction: float
    pairs: Mapping[tuple[NodeId, NodeId], float]

    def __getitem__(self, pair: tuple[NodeId, NodeId]) -> float:
        return self.pairs.get(pair, 0.0)

    @property
    def total(self) -> float:
        return sum(self.pairs.values())


def rrh_demand(users: float, radio: RadioParams) -> float:
    """Fronthaul demand (Gbps) of a cell with ``users`` active users."""
    if not 0 <= users <= radio.max_users_per_cell:
        raise ValueError(f"user count {users} outside [0, {radio.max_users_per_cell}]")
    return radio.prb_per_user / radio.cell_prb_total * radio.cpri_rate * users


def split_demand(fronthaul: float) -> tuple[float, float]:
    """(video, regular) parts of an RRH demand."""
    if fronthaul < 0:
        raise ValueError("negative demand")
    video = VIDEO_SHARE * fronthaul
    return video, fronthaul - video


def bbuvm_workload(total_gbps: float, radio: RadioParams) -> float:
    """Baseband processing (GOPS) for ``total_gbps`` of RRH-bound traffic."""
    if total_gbps < 0:
        raise ValueError("negative traffic")
    return total_gbps / radio.cpri_rate * radio.bbu_workload_full


def demand_from_users(users: Mapping[NodeId, int], radio: RadioParams,
                      hour: int = 0, seed: int = 0) -> DemandSet:
    fh, vid, reg = {}, {}, {}
    for r, n in sorted(users.items()):
        fh[r] = rrh_demand(n, radio)
        vid[r], reg[r] = split_demand(fh[r])
    return DemandSet(dict(sorted(users.items())), fh, vid, reg, hour, seed)


def load_window(mean: float, radio: RadioParams) -> np.ndarray:
    """Integer support of the per-cell user draw for one hourly mean."""
    centre = int(round(mean))
    lo, hi = centre - LOAD_WINDOW_HALF_WIDTH, centre + LOAD_WINDOW_HALF_WIDTH
    return np.clip(np.arange(lo, hi + 1), 1, radio.max_users_per_cell)


def draw_cell_loads(profile: DiurnalProfile, hour: int, seed: int, topology: Topology,
                    radio: RadioParams | None = None) -> DemandSet:
    """Users per cell drawn uniformly from a window around the hourly mean.

    The draw is clamped to ``[1, max_users_per_cell]`` and depends only on
    ``(profile, hour, seed)``.
    """
    radio = radio or RadioParams()
    if not 0 <= hour <= 23:
        raise ValueError("hour must be in 0..23")
    rng = np.random.default_rng([seed, hour])
    support = load_window(profile[hour], radio)
    picks = rng.integers(0, len(support), size=len(topology.rrh_nodes))
    users = {r: int(support[k]) for r, k in zip(sorted(topology.rrh_nodes), picks)}
    return demand_from_users(users, radio, hour, seed)


def cnvm_inter_traffic(fraction: float, demand: DemandSet,
                       core_hosting_pairs: Sequence[tuple[NodeId, NodeId]],
                       backhaul_ratio: float = PowerParams.backhaul_ratio) -> CnvmInterTrafficSpec:
    """Spread ``fraction`` of the total backhaul evenly over ordered CNVM host pairs."""
    if not 0 <= fraction <= 1:
        raise ValueError("inter-traffic fraction must be in [0, 1]")
    pairs = [(p, q) for p, q in core_hosting_pairs if p != q]
    if not pairs:
        return CnvmInterTrafficSpec(fraction, {})
    per_pair = fraction * backhaul_ratio * demand.total_fronthaul / len(pairs)
    return CnvmInterTrafficSpec(fraction, {pq: per_pair for pq in pairs})


def core_pairs(topology: Topology) -> list[tuple[NodeId, NodeId]]:
    return [(p, q) for p in topology.core_nodes for q in topology.core_nodes if p != q]


# -- scenario files -----------------------------------------------------------

_SECTIONS = {"radio": RadioParams, "power": PowerParams, "cache": CacheParams}

# Symbol-style spellings accepted next to the field names.
KEY_ALIASES = {
    "l": "line_coding", "gamma": "mimo_layers", "q": "qam_bits", "a": "antennas",
    "c_p": "cpri_rate", "prb_user": "prb_per_user", "users_max": "max_users_per_cell",
    "omega_onu_max": "onu_max", "omega_olt_max": "olt_max", "omega_olt_idle": "olt_idle",
    "c_olt": "olt_capacity", "c_onu": "onu_capacity", "omega_rrh": "rrh_power",
    "omega_server_max": "server_max", "omega_server_idle": "server_idle",
    "omega_cache_max": "cache_max", "c_cache": "cache_capacity_gb",
    "epsilon_video": "video_energy_per_gb", "b": "wavelength_rate", "w": "wavelengths_per_fiber",
    "omega_transponder": "transponder", "omega_router_port": "router_port",
    "omega_regenerator": "regenerator", "omega_edfa": "edfa", "s_span": "span_km",
    "psi_server": "server_workload", "psi_cnvm": "cnvm_workload", "alpha": "backhaul_ratio",
    "omega_host_onu": "hosting_budget_onu", "omega_host_olt": "hosting_budget_olt",
    "omega_host_core": "hosting_budget_core", "zipf_s": "zipf_exponent",
}


def _coerce(cls, key: str, raw: str):
    ftypes = {f.name: f.type for f in dataclasses.fields(cls)}
    key = KEY_ALIASES.get(key, key) if key not in ftypes else key
    if key not in ftypes:
        raise KeyError(f"unknown key {key!r} in [{cls.__name__}]")
    if ftypes[key] in ("int", int):
        return int(raw)
    return float(eval_fraction(raw))


def eval_fraction(raw: str) -> float:
    """Parse ``"1.25"`` or ``"10/8"``."""
    raw = raw.strip()
    if "/" in raw:
        num, den = raw.split("/", 1)
        return float(num) / float(den)
    return float(raw)


def load_scenario(path: str | Path) -> tuple[Scenario, configparser.ConfigParser]:
    """Read a scenario file; returns the scenario and the raw parser (for the
    ``[topology]`` and ``[run]`` sections consumed elsewhere)."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    with open(path) as fh:
        cp.read_file(fh)
    return scenario_from_config(cp), cp


def scenario_from_config(cp: configparser.ConfigParser) -> Scenario:
    parts = {}
    for section, cls in _SECTIONS.items():
        values = {}
        if cp.has_section(section):
            for k, v in cp.items(section):
                name = k if k in {f.name for f in dataclasses.fields(cls)} else KEY_ALIASES.get(k, k)
                if name in values:
                    raise KeyError(f"[{section}] sets {name} twice")
                values[name] = _coerce(cls, k, v)
        parts[section] = cls(**values)
    profile = DiurnalProfile()
    if cp.has_section("profile") and cp.has_option("profile", "means"):
        profile = DiurnalProfile(tuple(float(v) for v in cp.get("profile", "means").split(",")))
    seed = cp.getint("run", "seed", fallback=0) if cp.has_section("run") else 0
    frac = cp.getfloat("run", "inter_traffic", fallback=0.0) if cp.has_section("run") else 0.0
    return Scenario(parts["radio"], parts["power"], parts["cache"], profile, seed, frac)
