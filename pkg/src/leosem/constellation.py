"""Constellation geometry, the ISL/feeder topology graph, and path queries."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import LeosemError
from .links import LinkProfile, propagation_delay

EARTH_RADIUS_M = 6_371_000.0


@dataclass(frozen=True)
class ConstellationParams:
    n_sats: int = 23
    altitude_m: float = 617_000.0
    topology: str = "ring"  # "ring" or "custom"
    adjacency: tuple[tuple[str, str], ...] = ()  # used when topology == "custom"
    gs_attachment: str = "sat0"  # satellite holding the active feeder
    ground_stations: tuple[str, ...] = ("gs",)
    eo_source: str = "sat0"
    eo_in_constellation: bool = True
    eo_gateway: str = "sat0"  # entry satellite for an out-of-constellation EO node
    eo_has_compute: bool = True

    def sat_names(self) -> list[str]:
        return [f"sat{i}" for i in range(self.n_sats)]

    def node_names(self) -> list[str]:
        nodes = self.sat_names()
        if not self.eo_in_constellation:
            nodes.append(self.eo_source)
        nodes.extend(self.ground_stations)
        return nodes


@dataclass(frozen=True)
class RoutePath:
    nodes: tuple[str, ...]
    total_distance_m: float
    hop_count: int


class UnreachableError(LeosemError):
    pass


def inter_sat_distance(n_sats: int, altitude_m: float) -> float:
    """Chord length between adjacent satellites on a circular orbit."""
    if n_sats < 2:
        raise ValueError("need at least two satellites")
    return 2.0 * (EARTH_RADIUS_M + altitude_m) * math.sin(math.pi / n_sats)


@dataclass
class Topology:
    """Undirected graph of nodes joined by LinkProfiles; immutable after build."""

    nodes: tuple[str, ...]
    _adj: dict[str, dict[str, LinkProfile]] = field(default_factory=dict)

    def add_link(self, link: LinkProfile) -> None:
        self._adj.setdefault(link.a, {})[link.b] = link
        self._adj.setdefault(link.b, {})[link.a] = link

    def neighbors(self, node: str) -> list[str]:
        return sorted(self._adj.get(node, {}))

    def link(self, a: str, b: str) -> LinkProfile:
        try:
            return self._adj[a][b]
        except KeyError:
            raise KeyError(f"no link between {a} and {b}") from None

    def links_on(self, path: RoutePath) -> list[LinkProfile]:
        return [self.link(u, v) for u, v in zip(path.nodes, path.nodes[1:])]

    def all_links(self) -> list[LinkProfile]:
        seen = {}
        for a, nbrs in self._adj.items():
            for b, link in nbrs.items():
                seen[tuple(sorted((a, b)))] = link
        return [seen[k] for k in sorted(seen)]

    def connected_from(self, src: str) -> set[str]:
        seen = {src}
        stack = [src]
        while stack:
            u = stack.pop()
            for v in self._adj.get(u, {}):
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen


def build_topology(params: ConstellationParams, links: Iterable[LinkProfile]) -> Topology:
    """Assemble the graph and check every satellite can reach the feeder holder."""
    topo = Topology(nodes=tuple(params.node_names()))
    known = set(topo.nodes)
    for link in links:
        if link.a not in known or link.b not in known:
            raise LeosemError(f"link {link.a}-{link.b} references an unknown node")
        topo.add_link(link)
    reachable = topo.connected_from(params.gs_attachment)
    missing = [s for s in params.sat_names() if s not in reachable]
    if missing:
        raise LeosemError(f"disconnected topology: {', '.join(missing)} cannot reach {params.gs_attachment}")
    return topo


def default_links(
    params: ConstellationParams,
    isl_rate_bps: float,
    isl_p_tx_w: float,
    feeder_rate_bps: float,
    feeder_p_tx_w: float,
    overhead: float = 1.0,
) -> list[LinkProfile]:
    """Auto-generate the link list: ring/custom ISLs plus one feeder edge."""
    from .links import FSO_ISL, RF_FEEDER

    out: list[LinkProfile] = []
    sats = params.sat_names()

    def isl(a: str, b: str, dist: float) -> LinkProfile:
        return LinkProfile(a=a, b=b, kind=FSO_ISL, rate_bps=isl_rate_bps,
                           p_tx_w=isl_p_tx_w, distance_m=dist, overhead=overhead)

    if params.topology == "ring":
        if params.n_sats >= 2:
            chord = inter_sat_distance(params.n_sats, params.altitude_m)
            n = params.n_sats
            pairs = {tuple(sorted((sats[i], sats[(i + 1) % n]))) for i in range(n)}
            for a, b in sorted(pairs):
                out.append(isl(a, b, chord))
    elif params.topology == "custom":
        chord = (
            inter_sat_distance(params.n_sats, params.altitude_m)
            if params.n_sats >= 2
            else 2.0 * (EARTH_RADIUS_M + params.altitude_m)
        )
        pairs = {tuple(sorted(edge)) for edge in params.adjacency}
        for a, b in sorted(pairs):
            out.append(isl(a, b, chord))
    else:
        raise LeosemError(f"unknown topology {params.topology!r}")

    if not params.eo_in_constellation:
        chord = (
            inter_sat_distance(params.n_sats, params.altitude_m)
            if params.n_sats >= 2
            else 2.0 * (EARTH_RADIUS_M + params.altitude_m)
        )
        out.append(isl(params.eo_source, params.eo_gateway, chord))

    out.append(
        LinkProfile(
            a=params.gs_attachment,
            b=params.ground_stations[0] if params.ground_stations else "gs",
            kind=RF_FEEDER,
            rate_bps=feeder_rate_bps,
            p_tx_w=feeder_p_tx_w,
            distance_m=params.altitude_m,  # nadir pass assumption
            overhead=overhead,
        )
    )
    return out


def shortest_path(topo: Topology, src: str, dst: str, metric: str = "hops") -> RoutePath:
    """Minimal path under the metric; ties broken by lexicographically
    smallest node-id sequence."""
    if src not in topo.nodes or dst not in topo.nodes:
        raise KeyError(f"unknown endpoint {src!r} or {dst!r}")
    if metric not in ("hops", "latency"):
        raise ValueError(f"unknown metric {metric!r}")

    def weight(link: LinkProfile) -> float:
        if metric == "hops":
            return 1.0
        return propagation_delay(link.distance_m)

    best: dict[str, tuple[float, tuple[str, ...]]] = {}
    heap: list[tuple[float, tuple[str, ...]]] = [(0.0, (src,))]
    while heap:
        cost, path = heapq.heappop(heap)
        node = path[-1]
        if node in best:
            continue
        best[node] = (cost, path)
        if node == dst:
            break
        for nbr in topo.neighbors(node):
            if nbr in best:
                continue
            link = topo.link(node, nbr)
            heapq.heappush(heap, (cost + weight(link), path + (nbr,)))
    if dst not in best:
        raise UnreachableError(f"no path from {src} to {dst}")
    _, nodes = best[dst]
    dist = sum(topo.link(u, v).distance_m for u, v in zip(nodes, nodes[1:]))
    return RoutePath(nodes=nodes, total_distance_m=dist, hop_count=len(nodes) - 1)
