"""Scenario model: domain types, TOML ingestion, validation, serialization.

A scenario describes the whole world under study: imaging geometry, the
detection workload, the constellation and its links, per-node compute
inventory, atmospheric turbulence, and the operating constraints.  Values
are immutable after load and safe to share across concurrent sweeps.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from typing import Any, Optional

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

from . import tomlout
from .compute import ComputeProfile, CpuProfile, GpuProfile
from .constellation import ConstellationParams, Topology, build_topology, default_links
from .errors import LeosemError, ScenarioError
from .links import LINK_KINDS, LinkProfile


@dataclass(frozen=True)
class ImagingParams:
    width_px: int = 600
    height_px: int = 600
    gsd_m: float = 0.5
    channels: int = 3
    bit_depth: int = 8
    fps: float = 1.0

    @property
    def raw_bits(self) -> int:
        """Uncompressed frame size in bits."""
        return self.width_px * self.height_px * self.channels * self.bit_depth


@dataclass(frozen=True)
class Workload:
    flops_per_image: float = 79.1e9
    semantic_bits_mean: float = 336.0
    name: str = "yolov8-ship-detection"


@dataclass(frozen=True)
class Constraints:
    max_latency_s: float = 5.0
    require_stability: bool = True
    min_recall: float = 0.0


@dataclass(frozen=True)
class TurbulenceParams:
    cn2: float = 1e-17  # refractive-index structure constant, m^(-2/3)
    path_length_m: float = 2000.0
    wavelength_m: float = 500e-9
    aperture_m: float = 1.1


@dataclass(frozen=True)
class RecallCurve:
    """Logistic mapping from aperture/r0 to detection recall."""

    recall_max: float = 1.0
    midpoint: float = 2.0  # in units of aperture/r0
    steepness: float = 3.0


@dataclass(frozen=True)
class SimParams:
    queue_capacity: int = 64
    detections_mean: Optional[float] = None  # None: derived from semantic_bits_mean


@dataclass(frozen=True)
class Scenario:
    imaging: ImagingParams = ImagingParams()
    workload: Workload = Workload()
    constellation: ConstellationParams = ConstellationParams()
    links: tuple[LinkProfile, ...] = ()
    compute: dict[str, tuple[ComputeProfile, ...]] = field(default_factory=dict)
    turbulence: TurbulenceParams = TurbulenceParams()
    recall_curve: RecallCurve = RecallCurve()
    constraints: Constraints = Constraints()
    sim: SimParams = SimParams()

    def build_topology(self) -> Topology:
        return build_topology(self.constellation, self.links)

    @property
    def ground_node(self) -> str:
        return self.constellation.ground_stations[0]

    @property
    def eo_node(self) -> str:
        return self.constellation.eo_source


# Edge/ground processor templates.  GPU throughputs and active powers follow
# the evaluated hardware (NVIDIA T1000 on the satellites, Quadro RTX 5000 at
# the ground station); CPU TDPs are calibration defaults, not measurements.
DEFAULT_PROFILES: dict[str, ComputeProfile] = {
    "edge_cpu": CpuProfile.from_tdp(cores=8, f_min_hz=5e8, f_max_hz=1.8e9, tdp_w=10.0),
    "edge_gpu": GpuProfile(throughput_fps=18.11, p_active_w=50.0, p_idle_w=0.0),
    "gs_cpu": CpuProfile.from_tdp(cores=64, f_min_hz=5e8, f_max_hz=2.6e9, tdp_w=205.0),
    "gs_gpu": GpuProfile(throughput_fps=80.812, p_active_w=110.0, p_idle_w=0.0),
}

DEFAULT_LINK_SETTINGS = {
    "isl_rate_bps": 10e9,
    "isl_tx_power_w": 30.0,
    "feeder_rate_bps": 500e6,
    "feeder_tx_power_w": 40.0,
    "overhead": 1.0,
}


@dataclass(frozen=True)
class Violation:
    code: str
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.code} at {self.path}: {self.message}"


# --------------------------------------------------------------------------
# Parsing
# --------------------------------------------------------------------------

_SCHEMA: dict[str, Any] = {
    "scenario": None,
    "links_mode": None,
    "imaging": {k: None for k in ("width_px", "height_px", "gsd_m", "channels", "bit_depth", "fps")},
    "workload": {k: None for k in ("flops_per_image", "semantic_bits_mean", "name")},
    "constellation": {
        k: None
        for k in (
            "n_sats", "altitude_m", "topology", "adjacency", "gs_attachment",
            "ground_stations", "eo_source", "eo_in_constellation", "eo_gateway",
            "eo_has_compute",
        )
    },
    "link_defaults": {k: None for k in DEFAULT_LINK_SETTINGS},
    "link": [{k: None for k in ("a", "b", "kind", "rate_bps", "tx_power_w", "distance_m", "overhead")}],
    "profiles": "any-table",
    "compute": {"edge_policy": None, "gs_profiles": None, "nodes": "any-table"},
    "turbulence": {k: None for k in ("cn2", "path_length_m", "wavelength_m", "aperture_m")},
    "recall": {k: None for k in ("recall_max", "midpoint", "steepness")},
    "constraints": {k: None for k in ("max_latency_s", "require_stability", "min_recall")},
    "simulation": {k: None for k in ("queue_capacity", "detections_mean")},
}

_PROFILE_KEYS = {
    "cpu": {"kind", "cores", "f_min_hz", "f_max_hz", "kappa", "tdp_w",
            "flops_per_cycle", "p_static_w", "power_exponent"},
    "gpu": {"kind", "throughput_fps", "p_active_w", "p_idle_w"},
}


def parse_config(text: str) -> dict:
    """Parse scenario TOML into a raw dict; rejects unknown fields."""
    try:
        raw = _toml.loads(text)
    except _toml.TOMLDecodeError as exc:
        raise ScenarioError(f"parse error: {exc}") from exc
    _check_unknown(raw, _SCHEMA, "")
    return raw


def _check_unknown(value: Any, schema: Any, path: str) -> None:
    if schema == "any-table":
        return
    if isinstance(schema, dict):
        if not isinstance(value, dict):
            raise ScenarioError(f"expected a table at {path or '<root>'}")
        for k, v in value.items():
            sub = path + "." + k if path else k
            if k not in schema:
                raise ScenarioError(f"unknown field {sub!r}")
            _check_unknown(v, schema[k], sub)
    elif isinstance(schema, list):
        if not isinstance(value, list):
            raise ScenarioError(f"expected an array of tables at {path}")
        for i, entry in enumerate(value):
            _check_unknown(entry, schema[0], f"{path}[{i}]")


def set_override(config: dict, dotted_key: str, raw_value: str) -> None:
    """Apply one ``--set section.key=value`` override onto a raw config dict."""
    try:
        value = _toml.loads(f"v = {raw_value}")["v"]
    except _toml.TOMLDecodeError:
        value = raw_value
    parts = dotted_key.split(".")
    node = config
    for p in parts[:-1]:
        node = node.setdefault(p, {})
        if not isinstance(node, dict):
            raise ScenarioError(f"cannot override through non-table {dotted_key!r}")
    node[parts[-1]] = value
    _check_unknown(config, _SCHEMA, "")


def _section(raw: dict, name: str) -> dict:
    sec = raw.get(name, {})
    if not isinstance(sec, dict):
        raise ScenarioError(f"section [{name}] must be a table")
    return dict(sec)


def _take(sec: dict, key: str, default, path: str, types) -> Any:
    if key not in sec:
        return default
    v = sec[key]
    if types is float and isinstance(v, int) and not isinstance(v, bool):
        v = float(v)
    if not isinstance(v, types) or (types is int and isinstance(v, bool)):
        raise ScenarioError(f"field {path}.{key} has the wrong type")
    return v


def _parse_profile(name: str, entry: Any) -> ComputeProfile:
    if not isinstance(entry, dict):
        raise ScenarioError(f"profile {name!r} must be a table")
    kind = entry.get("kind")
    if kind not in ("cpu", "gpu"):
        raise ScenarioError(f"profile {name!r}: kind must be 'cpu' or 'gpu'")
    unknown = set(entry) - _PROFILE_KEYS[kind]
    if unknown:
        raise ScenarioError(f"profile {name!r}: unknown field {sorted(unknown)[0]!r}")
    p = f"profiles.{name}"
    if kind == "cpu":
        cores = _take(entry, "cores", 8, p, int)
        f_min = _take(entry, "f_min_hz", 5e8, p, float)
        f_max = _take(entry, "f_max_hz", 1.8e9, p, float)
        fpc = _take(entry, "flops_per_cycle", 8.0, p, float)
        p_static = _take(entry, "p_static_w", 0.0, p, float)
        exponent = _take(entry, "power_exponent", 3.0, p, float)
        if "kappa" in entry:
            kappa = _take(entry, "kappa", None, p, float)
            return CpuProfile(cores=cores, f_min_hz=f_min, f_max_hz=f_max, kappa=kappa,
                              flops_per_cycle_per_core=fpc, p_static_w=p_static,
                              power_exponent=exponent)
        tdp = _take(entry, "tdp_w", 10.0, p, float)
        return CpuProfile.from_tdp(cores=cores, f_min_hz=f_min, f_max_hz=f_max, tdp_w=tdp,
                                   flops_per_cycle_per_core=fpc, p_static_w=p_static,
                                   power_exponent=exponent)
    return GpuProfile(
        throughput_fps=_take(entry, "throughput_fps", 18.11, p, float),
        p_active_w=_take(entry, "p_active_w", 50.0, p, float),
        p_idle_w=_take(entry, "p_idle_w", 0.0, p, float),
    )


def build_scenario(raw: dict) -> Scenario:
    """Construct a Scenario from a parsed config dict, applying defaults."""
    template = raw.get("scenario", "default")
    if template != "default":
        raise ScenarioError(f"unknown scenario template {template!r}")

    img_sec = _section(raw, "imaging")
    imaging = ImagingParams(
        width_px=_take(img_sec, "width_px", 600, "imaging", int),
        height_px=_take(img_sec, "height_px", 600, "imaging", int),
        gsd_m=_take(img_sec, "gsd_m", 0.5, "imaging", float),
        channels=_take(img_sec, "channels", 3, "imaging", int),
        bit_depth=_take(img_sec, "bit_depth", 8, "imaging", int),
        fps=_take(img_sec, "fps", 1.0, "imaging", float),
    )

    wl_sec = _section(raw, "workload")
    workload = Workload(
        flops_per_image=_take(wl_sec, "flops_per_image", 79.1e9, "workload", float),
        semantic_bits_mean=_take(wl_sec, "semantic_bits_mean", 336.0, "workload", float),
        name=_take(wl_sec, "name", "yolov8-ship-detection", "workload", str),
    )

    con_sec = _section(raw, "constellation")
    adjacency_raw = con_sec.get("adjacency", [])
    adjacency = []
    for edge in adjacency_raw:
        if not (isinstance(edge, list) and len(edge) == 2 and all(isinstance(e, str) for e in edge)):
            raise ScenarioError("constellation.adjacency entries must be [node, node] pairs")
        adjacency.append(tuple(sorted(edge)))
    gs_list = con_sec.get("ground_stations", ["gs"])
    if not (isinstance(gs_list, list) and all(isinstance(g, str) for g in gs_list)):
        raise ScenarioError("constellation.ground_stations must be a list of names")
    constellation = ConstellationParams(
        n_sats=_take(con_sec, "n_sats", 23, "constellation", int),
        altitude_m=_take(con_sec, "altitude_m", 617_000.0, "constellation", float),
        topology=_take(con_sec, "topology", "ring", "constellation", str),
        adjacency=tuple(sorted(set(adjacency))),
        gs_attachment=_take(con_sec, "gs_attachment", "sat0", "constellation", str),
        ground_stations=tuple(gs_list),
        eo_source=_take(con_sec, "eo_source", "sat0", "constellation", str),
        eo_in_constellation=_take(con_sec, "eo_in_constellation", True, "constellation", bool),
        eo_gateway=_take(con_sec, "eo_gateway", "sat0", "constellation", str),
        eo_has_compute=_take(con_sec, "eo_has_compute", True, "constellation", bool),
    )

    ld_sec = _section(raw, "link_defaults")
    link_settings = dict(DEFAULT_LINK_SETTINGS)
    for k in link_settings:
        link_settings[k] = _take(ld_sec, k, link_settings[k], "link_defaults", float)

    links_mode = raw.get("links_mode", "augment")
    if links_mode not in ("augment", "replace"):
        raise ScenarioError("links_mode must be 'augment' or 'replace'")
    explicit = []
    for i, entry in enumerate(raw.get("link", [])):
        path = f"link[{i}]"
        if "a" not in entry or "b" not in entry:
            raise ScenarioError(f"missing mandatory field {path}.a/{path}.b")
        kind = _take(entry, "kind", "fso_isl", path, str)
        explicit.append(
            LinkProfile(
                a=entry["a"],
                b=entry["b"],
                kind=kind,
                rate_bps=_take(entry, "rate_bps", link_settings["isl_rate_bps"]
                               if kind == "fso_isl" else link_settings["feeder_rate_bps"],
                               path, float),
                p_tx_w=_take(entry, "tx_power_w", link_settings["isl_tx_power_w"]
                             if kind == "fso_isl" else link_settings["feeder_tx_power_w"],
                             path, float),
                distance_m=_take(entry, "distance_m", constellation.altitude_m, path, float),
                overhead=_take(entry, "overhead", link_settings["overhead"], path, float),
            )
        )
    if links_mode == "replace":
        links = tuple(explicit)
    else:
        auto = default_links(
            constellation,
            isl_rate_bps=link_settings["isl_rate_bps"],
            isl_p_tx_w=link_settings["isl_tx_power_w"],
            feeder_rate_bps=link_settings["feeder_rate_bps"],
            feeder_p_tx_w=link_settings["feeder_tx_power_w"],
            overhead=link_settings["overhead"],
        )
        by_pair = {tuple(sorted((l.a, l.b))): l for l in auto}
        for l in explicit:
            by_pair[tuple(sorted((l.a, l.b)))] = l
        links = tuple(by_pair[k] for k in sorted(by_pair))

    profiles = dict(DEFAULT_PROFILES)
    for name, entry in _section(raw, "profiles").items():
        profiles[name] = _parse_profile(name, entry)

    comp_sec = _section(raw, "compute")
    edge_policy = _take(comp_sec, "edge_policy", "alternate", "compute", str)
    if edge_policy not in ("alternate", "cpu", "gpu", "both", "none"):
        raise ScenarioError(f"unknown compute.edge_policy {edge_policy!r}")
    gs_profile_names = comp_sec.get("gs_profiles", ["gs_cpu", "gs_gpu"])
    explicit_nodes = comp_sec.get("nodes", {})
    if not isinstance(explicit_nodes, dict):
        raise ScenarioError("compute.nodes must be a table of node -> profile-name lists")

    def resolve(names, where) -> tuple[ComputeProfile, ...]:
        out = []
        for n in names:
            if n not in profiles:
                raise ScenarioError(f"{where} references unknown profile {n!r}")
            out.append(profiles[n])
        return tuple(out)

    compute_map: dict[str, tuple[ComputeProfile, ...]] = {}
    sats = constellation.sat_names()
    for i, s in enumerate(sats):
        if edge_policy == "alternate":
            names = ["edge_cpu"] if i % 2 == 0 else ["edge_gpu"]
        elif edge_policy == "cpu":
            names = ["edge_cpu"]
        elif edge_policy == "gpu":
            names = ["edge_gpu"]
        elif edge_policy == "both":
            names = ["edge_cpu", "edge_gpu"]
        else:
            names = []
        compute_map[s] = resolve(names, "compute.edge_policy")
    if not constellation.eo_in_constellation:
        compute_map[constellation.eo_source] = (
            resolve(["edge_cpu"], "eo profile") if constellation.eo_has_compute else ()
        )
    elif not constellation.eo_has_compute and constellation.eo_source in compute_map:
        compute_map[constellation.eo_source] = ()
    for g in constellation.ground_stations:
        compute_map[g] = resolve(gs_profile_names, "compute.gs_profiles")
    for node, names in explicit_nodes.items():
        if not (isinstance(names, list) and all(isinstance(n, str) for n in names)):
            raise ScenarioError(f"compute.nodes.{node} must be a list of profile names")
        compute_map[node] = resolve(names, f"compute.nodes.{node}")

    tur_sec = _section(raw, "turbulence")
    turbulence = TurbulenceParams(
        cn2=_take(tur_sec, "cn2", 1e-17, "turbulence", float),
        path_length_m=_take(tur_sec, "path_length_m", 2000.0, "turbulence", float),
        wavelength_m=_take(tur_sec, "wavelength_m", 500e-9, "turbulence", float),
        aperture_m=_take(tur_sec, "aperture_m", 1.1, "turbulence", float),
    )

    rec_sec = _section(raw, "recall")
    recall_curve = RecallCurve(
        recall_max=_take(rec_sec, "recall_max", 1.0, "recall", float),
        midpoint=_take(rec_sec, "midpoint", 2.0, "recall", float),
        steepness=_take(rec_sec, "steepness", 3.0, "recall", float),
    )

    cst_sec = _section(raw, "constraints")
    constraints = Constraints(
        max_latency_s=_take(cst_sec, "max_latency_s", 5.0, "constraints", float),
        require_stability=_take(cst_sec, "require_stability", True, "constraints", bool),
        min_recall=_take(cst_sec, "min_recall", 0.0, "constraints", float),
    )

    sim_sec = _section(raw, "simulation")
    sim = SimParams(
        queue_capacity=_take(sim_sec, "queue_capacity", 64, "simulation", int),
        detections_mean=_take(sim_sec, "detections_mean", None, "simulation", float),
    )

    return Scenario(
        imaging=imaging, workload=workload, constellation=constellation, links=links,
        compute=compute_map, turbulence=turbulence, recall_curve=recall_curve,
        constraints=constraints, sim=sim,
    )


def load_scenario(text: str) -> Scenario:
    """Parse, build, and validate; raises ScenarioError on any violation."""
    s = build_scenario(parse_config(text))
    violations = validate_scenario(s)
    if violations:
        raise ScenarioError("; ".join(v.message for v in violations))
    return s


def load_scenario_file(path: str) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return load_scenario(fh.read())


# --------------------------------------------------------------------------
# Validation
# --------------------------------------------------------------------------

def validate_scenario(s: Scenario) -> list[Violation]:
    """Return every invariant violation; an empty list means valid."""
    out: list[Violation] = []

    def bad(code: str, path: str, message: str) -> None:
        out.append(Violation(code=code, path=path, message=message))

    img = s.imaging
    for name in ("width_px", "height_px", "channels", "bit_depth"):
        if getattr(img, name) < 1:
            bad("invalid-field", f"imaging.{name}", f"{name} must be >= 1")
    if img.gsd_m <= 0:
        bad("invalid-field", "imaging.gsd_m", "gsd_m must be positive")
    if img.fps <= 0:
        bad("invalid-field", "imaging.fps", "fps must be positive")

    if s.workload.flops_per_image <= 0:
        bad("invalid-field", "workload.flops_per_image", "flops_per_image must be positive")
    if s.workload.semantic_bits_mean <= 0:
        bad("invalid-field", "workload.semantic_bits_mean", "semantic_bits_mean must be positive")

    cst = s.constraints
    if cst.max_latency_s <= 0:
        bad("invalid-field", "constraints.max_latency_s", "max_latency_s must be positive")
    if not 0.0 <= cst.min_recall <= 1.0:
        bad("invalid-field", "constraints.min_recall", "min_recall must lie in [0, 1]")

    tur = s.turbulence
    for name in ("cn2", "path_length_m", "wavelength_m", "aperture_m"):
        if getattr(tur, name) <= 0:
            bad("invalid-field", f"turbulence.{name}", f"{name} must be positive")

    con = s.constellation
    if con.n_sats < 1:
        bad("invalid-field", "constellation.n_sats", "n_sats must be >= 1")
    if con.altitude_m <= 0:
        bad("invalid-field", "constellation.altitude_m", "altitude_m must be positive")
    if len(con.ground_stations) == 0:
        bad("no-ground-station", "constellation.ground_stations", "exactly one ground station required")
    elif len(con.ground_stations) > 1:
        bad("multiple-ground-stations", "constellation.ground_stations",
            f"multiple ground stations: {', '.join(con.ground_stations)}")

    nodes = set(con.node_names())
    if con.gs_attachment not in nodes:
        bad("dangling-node", "constellation.gs_attachment",
            f"gs_attachment {con.gs_attachment!r} is not a known node")
    if con.eo_source not in nodes:
        bad("dangling-node", "constellation.eo_source",
            f"eo_source {con.eo_source!r} is not a known node")
    if con.eo_in_constellation and con.eo_source not in con.sat_names():
        bad("dangling-node", "constellation.eo_source",
            "eo_source must name a constellation satellite when eo_in_constellation")

    for prof_list_node in s.compute:
        if prof_list_node not in nodes:
            bad("dangling-node", f"compute.nodes.{prof_list_node}",
                f"compute entry references unknown node {prof_list_node!r}")
    for node, profs in s.compute.items():
        for i, p in enumerate(profs):
            path = f"compute.nodes.{node}[{i}]"
            if isinstance(p, CpuProfile):
                if not 0 < p.f_min_hz <= p.f_max_hz:
                    bad("invalid-field", path, "requires 0 < f_min_hz <= f_max_hz")
                if p.cores < 1:
                    bad("invalid-field", path, "cores must be >= 1")
                if p.kappa <= 0:
                    bad("invalid-field", path, "kappa must be positive")
                if p.p_static_w < 0:
                    bad("invalid-field", path, "p_static_w must be nonnegative")
            else:
                if p.throughput_fps <= 0:
                    bad("invalid-field", path, "throughput_fps must be positive")
                if not p.p_active_w > p.p_idle_w >= 0:
                    bad("invalid-field", path, "requires p_active_w > p_idle_w >= 0")

    feeders = 0
    for i, link in enumerate(s.links):
        path = f"link[{i}]"
        if link.kind not in LINK_KINDS:
            bad("invalid-field", f"{path}.kind", f"unknown link kind {link.kind!r}")
        if link.rate_bps <= 0:
            bad("invalid-field", f"{path}.rate_bps", "rate_bps must be positive")
        if link.p_tx_w < 0:
            bad("invalid-field", f"{path}.tx_power_w", "tx_power_w must be nonnegative")
        if link.distance_m <= 0:
            bad("invalid-field", f"{path}.distance_m", "distance_m must be positive")
        if link.overhead < 1.0:
            bad("invalid-field", f"{path}.overhead", "overhead must be >= 1")
        for end in (link.a, link.b):
            if end not in nodes:
                bad("dangling-endpoint", path, f"link endpoint {end!r} is not a known node")
        if link.kind == "rf_feeder":
            feeders += 1
    if feeders == 0 and len(con.ground_stations) >= 1:
        bad("no-feeder", "link", "no feeder link to the ground segment")

    if not out:
        try:
            topo = s.build_topology()
        except LeosemError as exc:
            bad("disconnected", "constellation", str(exc))
        else:
            reachable = topo.connected_from(s.ground_node)
            if s.eo_node not in reachable:
                bad("disconnected", "constellation.eo_source",
                    "EO source cannot reach the ground station")
    return out


# --------------------------------------------------------------------------
# Serialization
# --------------------------------------------------------------------------

def _profile_dict(p: ComputeProfile) -> dict:
    if isinstance(p, CpuProfile):
        return {
            "kind": "cpu", "cores": p.cores, "f_min_hz": p.f_min_hz,
            "f_max_hz": p.f_max_hz, "kappa": p.kappa,
            "flops_per_cycle": p.flops_per_cycle_per_core,
            "p_static_w": p.p_static_w, "power_exponent": p.power_exponent,
        }
    return {
        "kind": "gpu", "throughput_fps": p.throughput_fps,
        "p_active_w": p.p_active_w, "p_idle_w": p.p_idle_w,
    }


def serialize_scenario(s: Scenario) -> str:
    """Emit a fully explicit TOML document; load_scenario round-trips it."""
    con = s.constellation
    named: dict[ComputeProfile, str] = {v: k for k, v in DEFAULT_PROFILES.items()}
    extra = 0
    profiles_out: dict[str, dict] = {}
    nodes_out: dict[str, list[str]] = {}
    for node in sorted(s.compute):
        names = []
        for p in s.compute[node]:
            if p not in named:
                named[p] = f"p{extra}"
                extra += 1
            name = named[p]
            if name not in DEFAULT_PROFILES or DEFAULT_PROFILES.get(name) != p:
                profiles_out[name] = _profile_dict(p)
            names.append(name)
        nodes_out[node] = names

    doc: dict[str, Any] = {
        "scenario": "default",
        "links_mode": "replace",
        "imaging": {
            "width_px": s.imaging.width_px, "height_px": s.imaging.height_px,
            "gsd_m": s.imaging.gsd_m, "channels": s.imaging.channels,
            "bit_depth": s.imaging.bit_depth, "fps": s.imaging.fps,
        },
        "workload": {
            "flops_per_image": s.workload.flops_per_image,
            "semantic_bits_mean": s.workload.semantic_bits_mean,
            "name": s.workload.name,
        },
        "constellation": {
            "n_sats": con.n_sats, "altitude_m": con.altitude_m,
            "topology": con.topology,
            "adjacency": [list(e) for e in con.adjacency],
            "gs_attachment": con.gs_attachment,
            "ground_stations": list(con.ground_stations),
            "eo_source": con.eo_source,
            "eo_in_constellation": con.eo_in_constellation,
            "eo_gateway": con.eo_gateway,
            "eo_has_compute": con.eo_has_compute,
        },
        "link": [
            {
                "a": l.a, "b": l.b, "kind": l.kind, "rate_bps": l.rate_bps,
                "tx_power_w": l.p_tx_w, "distance_m": l.distance_m,
                "overhead": l.overhead,
            }
            for l in s.links
        ],
        "turbulence": {
            "cn2": s.turbulence.cn2, "path_length_m": s.turbulence.path_length_m,
            "wavelength_m": s.turbulence.wavelength_m, "aperture_m": s.turbulence.aperture_m,
        },
        "recall": {
            "recall_max": s.recall_curve.recall_max, "midpoint": s.recall_curve.midpoint,
            "steepness": s.recall_curve.steepness,
        },
        "constraints": {
            "max_latency_s": s.constraints.max_latency_s,
            "require_stability": s.constraints.require_stability,
            "min_recall": s.constraints.min_recall,
        },
        "simulation": {"queue_capacity": s.sim.queue_capacity},
    }
    if s.sim.detections_mean is not None:
        doc["simulation"]["detections_mean"] = s.sim.detections_mean
    if profiles_out:
        doc["profiles"] = profiles_out
    doc["compute"] = {"nodes": nodes_out}
    return tomlout.dumps(doc)


def default_scenario(**overrides: Any) -> Scenario:
    """The evaluated 23-satellite scenario; keyword args replace top-level fields."""
    s = build_scenario({})
    return replace(s, **overrides) if overrides else s
