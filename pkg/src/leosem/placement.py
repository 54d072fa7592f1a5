"""Energy-time-accuracy placement: split the frame stream across processors.

The optimizer minimizes total average power (processing plus transport)
subject to per-site stability, the end-to-end deadline, link capacities,
and the recall threshold.  It uses marginal-cost greedy water-filling over
a discretized stream, which is exact on the grid because every per-site
cost is convex in its load (CPU piecewise linear/cubic, GPU and links
linear).  ``brute_force`` enumerates the fraction simplex as an
independent oracle.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .compute import (
    ComputeProfile,
    CpuProfile,
    GpuProfile,
    ServicePoint,
    cpu_service,
    cpu_service_at,
    gpu_service,
)
from .constellation import RoutePath, shortest_path
from .errors import InfeasibleError, LeosemError, PlanError
from .links import LinkProfile, propagation_delay, transmission_time
from .scenario import Scenario
from .turbulence import recall_from_turbulence

BRUTE_FORCE_MAX_SITES = 4
FRACTION_SUM_TOL = 1e-9


class TooLargeError(LeosemError):
    """Site count exceeds the brute-force enumeration guard."""


@dataclass(frozen=True)
class ProcessorSite:
    site_id: str
    node: str
    profile: ComputeProfile
    role: str  # "edge" or "ground"

    @property
    def is_cpu(self) -> bool:
        return isinstance(self.profile, CpuProfile)


@dataclass(frozen=True)
class SiteRoutes:
    raw: RoutePath  # EO -> processing node (EO -> GS for ground sites)
    semantic: Optional[RoutePath]  # node -> GS for edge sites


@dataclass(frozen=True)
class PlacementPlan:
    fractions: dict[str, float]
    cpu_frequencies: dict[str, float]
    routes: dict[str, SiteRoutes]

    def active_site_ids(self) -> list[str]:
        return [k for k in sorted(self.fractions) if self.fractions[k] > 0.0]


@dataclass(frozen=True)
class PlanEvaluation:
    total_power_w: float
    site_power_w: dict[str, float]
    link_power_w: dict[str, float]
    per_site_latency_s: dict[str, float]
    worst_case_latency_s: float
    stable: bool
    feasible: bool
    recall: float
    reasons: tuple[str, ...] = ()


def enumerate_sites(s: Scenario) -> list[ProcessorSite]:
    """All processor sites (node, profile) in deterministic order."""
    out = []
    grounds = set(s.constellation.ground_stations)
    for node in sorted(s.compute):
        kind_counts: dict[str, int] = {}
        for profile in s.compute[node]:
            kind = "cpu" if isinstance(profile, CpuProfile) else "gpu"
            idx = kind_counts.get(kind, 0)
            kind_counts[kind] = idx + 1
            site_id = f"{node}:{kind}" if idx == 0 else f"{node}:{kind}{idx}"
            role = "ground" if node in grounds else "edge"
            out.append(ProcessorSite(site_id=site_id, node=node, profile=profile, role=role))
    return out


# --------------------------------------------------------------------------
# Per-site cost model
# --------------------------------------------------------------------------

@dataclass
class _SiteModel:
    site: ProcessorSite
    routes: SiteRoutes
    flops_per_image: float
    raw_bits: float
    semantic_bits: float
    deadline_budget_s: float  # deadline minus fixed transport latency
    # (directed link key, link, bits per frame) for every hop this site loads
    hop_bits: list[tuple[tuple[str, str], LinkProfile, float]] = field(default_factory=list)
    transport_w_per_fps: float = 0.0
    transport_latency_s: float = 0.0

    @property
    def max_load_fps(self) -> float:
        """Largest sustainable load honoring capacity and the deadline."""
        p = self.site.profile
        if isinstance(p, GpuProfile):
            cap = p.throughput_fps
            return cap if 1.0 / p.throughput_fps <= self.deadline_budget_s else 0.0
        cap = p.capacity_fps(self.flops_per_image)
        return cap if 1.0 / cap <= self.deadline_budget_s else 0.0

    def service(self, load_fps: float) -> ServicePoint:
        p = self.site.profile
        if isinstance(p, GpuProfile):
            if 1.0 / p.throughput_fps > self.deadline_budget_s:
                raise InfeasibleError("GPU service time exceeds the deadline budget",
                                      certificate="deadline")
            return gpu_service(p, load_fps)
        return cpu_service(p, self.flops_per_image, load_fps, self.deadline_budget_s)

    def power(self, load_fps: float) -> float:
        """Processing plus attributable transport power at the load; raises
        InfeasibleError beyond this site's sustainable range."""
        if load_fps == 0.0:
            return 0.0
        return self.service(load_fps).power_w + self.transport_w_per_fps * load_fps

    def latency(self, load_fps: float) -> float:
        return self.transport_latency_s + self.service(load_fps).time_per_image_s


def _directed_hops(path: RoutePath) -> list[tuple[str, str]]:
    return list(zip(path.nodes, path.nodes[1:]))


def _build_models(s: Scenario, sites: Optional[list[ProcessorSite]] = None) -> list[_SiteModel]:
    topo = s.build_topology()
    eo = s.eo_node
    gs = s.ground_node
    raw_bits = float(s.imaging.raw_bits)
    sem_bits = s.workload.semantic_bits_mean
    models = []
    for site in sites if sites is not None else enumerate_sites(s):
        if site.role == "ground":
            raw_route = shortest_path(topo, eo, site.node, metric="hops")
            routes = SiteRoutes(raw=raw_route, semantic=None)
        else:
            raw_route = shortest_path(topo, eo, site.node, metric="hops")
            sem_route = shortest_path(topo, site.node, gs, metric="hops")
            routes = SiteRoutes(raw=raw_route, semantic=sem_route)
        m = _SiteModel(
            site=site, routes=routes, flops_per_image=s.workload.flops_per_image,
            raw_bits=raw_bits, semantic_bits=sem_bits,
            deadline_budget_s=s.constraints.max_latency_s,
        )
        legs: list[tuple[RoutePath, float]] = [(routes.raw, raw_bits)]
        if routes.semantic is not None:
            legs.append((routes.semantic, sem_bits))
        for path, bits in legs:
            for (u, v) in _directed_hops(path):
                link = topo.link(u, v)
                m.hop_bits.append(((u, v), link, bits))
                m.transport_w_per_fps += link.p_tx_w * bits * link.overhead / link.rate_bps
                m.transport_latency_s += transmission_time(bits, link) + propagation_delay(link.distance_m)
        m.deadline_budget_s = s.constraints.max_latency_s - m.transport_latency_s
        models.append(m)
    return models


def make_plan(
    s: Scenario,
    fractions: dict[str, float],
    cpu_frequencies: Optional[dict[str, float]] = None,
) -> PlacementPlan:
    """Assemble a plan from fractions: derive routes and, unless given,
    per-site CPU frequencies (minimum feasible, f_max as a best-effort
    fallback for unsustainable loads)."""
    sites = {st.site_id: st for st in enumerate_sites(s)}
    unknown = set(fractions) - set(sites)
    if unknown:
        raise PlanError(f"unknown site id {sorted(unknown)[0]!r}")
    models = {m.site.site_id: m for m in _build_models(s)}
    fps = s.imaging.fps
    freqs: dict[str, float] = dict(cpu_frequencies or {})
    routes: dict[str, SiteRoutes] = {}
    for sid, x in fractions.items():
        if x <= 0.0:
            continue
        m = models[sid]
        routes[sid] = m.routes
        if sites[sid].is_cpu and sid not in freqs:
            try:
                freqs[sid] = m.service(x * fps).chosen_f_hz
            except InfeasibleError:
                freqs[sid] = sites[sid].profile.f_max_hz
    return PlacementPlan(fractions=dict(fractions), cpu_frequencies=freqs, routes=routes)


# --------------------------------------------------------------------------
# Plan evaluation
# --------------------------------------------------------------------------

def evaluate_plan(s: Scenario, plan: PlacementPlan) -> PlanEvaluation:
    """Analytic power/latency/stability audit of a plan.

    Structural problems raise PlanError; infeasibility (instability, link
    overload, deadline, recall) is reported as data.
    """
    sites = {st.site_id: st for st in enumerate_sites(s)}
    unknown = set(plan.fractions) - set(sites)
    if unknown:
        raise PlanError(f"unknown site id {sorted(unknown)[0]!r}")
    total = 0.0
    for sid, x in plan.fractions.items():
        if x < -1e-12:
            raise PlanError(f"negative fraction for {sid}")
        total += x
    if abs(total - 1.0) > FRACTION_SUM_TOL:
        raise PlanError(f"fractions must sum to 1 (got {total:.12g})")

    topo = s.build_topology()
    fps = s.imaging.fps
    raw_bits = float(s.imaging.raw_bits)
    sem_bits = s.workload.semantic_bits_mean
    recall = recall_from_turbulence(s.turbulence, s.recall_curve)

    reasons: list[str] = []
    site_power: dict[str, float] = {}
    latencies: dict[str, float] = {}
    link_loads: dict[tuple[str, str], float] = {}
    stable = True

    for sid in plan.active_site_ids():
        x = plan.fractions[sid]
        st = sites[sid]
        if sid not in plan.routes:
            raise PlanError(f"active site {sid} has no route")
        routes = plan.routes[sid]
        load = x * fps
        if st.is_cpu:
            if sid not in plan.cpu_frequencies:
                raise PlanError(f"active CPU site {sid} has no chosen frequency")
            f = plan.cpu_frequencies[sid]
            sp = cpu_service_at(st.profile, s.workload.flops_per_image, f, load)
        else:
            sp = gpu_service(st.profile, load, strict=False)
        if load > sp.service_rate_fps * (1.0 + 1e-9):
            stable = False
            reasons.append(f"unstable-site:{sid}")
        site_power[sid] = sp.power_w

        latency = sp.time_per_image_s  # D/D/1 residual queueing is 0 when stable
        legs: list[tuple[RoutePath, float]] = [(routes.raw, raw_bits)]
        if routes.semantic is not None:
            legs.append((routes.semantic, sem_bits))
        for path, bits in legs:
            for (u, v) in _directed_hops(path):
                link = topo.link(u, v)
                link_loads[(u, v)] = link_loads.get((u, v), 0.0) + bits * load
                latency += transmission_time(bits, link) + propagation_delay(link.distance_m)
        latencies[sid] = latency

    link_power: dict[str, float] = {}
    for (u, v), load_bps in sorted(link_loads.items()):
        link = topo.link(u, v)
        duty = load_bps * link.overhead / link.rate_bps
        if duty > 1.0 + 1e-9:
            stable = False
            reasons.append(f"link-overload:{u}->{v}")
        link_power[f"{u}->{v}"] = link.p_tx_w * min(duty, 1.0)

    worst = max(latencies.values()) if latencies else 0.0
    latency_ok = worst <= s.constraints.max_latency_s * (1.0 + 1e-12)
    if not latency_ok:
        reasons.append("deadline-exceeded")
    recall_ok = recall >= s.constraints.min_recall
    if not recall_ok:
        reasons.append("recall-below-minimum")
    feasible = stable and latency_ok and recall_ok
    return PlanEvaluation(
        total_power_w=sum(site_power.values()) + sum(link_power.values()),
        site_power_w=site_power,
        link_power_w=link_power,
        per_site_latency_s=latencies,
        worst_case_latency_s=worst,
        stable=stable,
        feasible=feasible,
        recall=recall,
        reasons=tuple(reasons),
    )


# --------------------------------------------------------------------------
# Optimization
# --------------------------------------------------------------------------

def _eligible_models(s: Scenario) -> tuple[list[_SiteModel], float]:
    """Recall- and deadline-filtered site models plus the total service
    capacity the deadline filter left behind (for certificate attribution)."""
    models = _build_models(s)
    if not models:
        raise InfeasibleError("scenario has no processing sites", certificate="capacity")
    recall = recall_from_turbulence(s.turbulence, s.recall_curve)
    eligible = [m for m in models if recall >= s.constraints.min_recall]
    if not eligible:
        raise InfeasibleError(
            f"recall {recall:.4f} below minimum {s.constraints.min_recall:.4f}",
            certificate="recall",
        )
    with_deadline = [m for m in eligible if m.max_load_fps > 0.0]
    if not with_deadline:
        raise InfeasibleError(
            "no site can finish one image within the latency budget",
            certificate="deadline",
        )
    cap_ignoring_deadline = sum(
        m.site.profile.capacity_fps(m.flops_per_image) for m in eligible
    )
    return with_deadline, cap_ignoring_deadline


def optimize(s: Scenario, grid_steps: int = 1000) -> PlacementPlan:
    """Minimum-power plan via marginal-cost greedy water-filling.

    Raises InfeasibleError with a certificate ("capacity", "deadline", or
    "recall") when no feasible allocation exists.
    """
    if grid_steps < 1:
        raise ValueError("grid_steps must be >= 1")
    fps = s.imaging.fps
    models, hint = _eligible_models(s)
    total_cap = sum(m.max_load_fps for m in models)
    if total_cap < fps * (1.0 - 1e-12):
        raise InfeasibleError(
            f"total service capacity {total_cap:.6g} fps is below the frame rate {fps:.6g} fps",
            certificate=hint,
        )

    delta = fps / grid_steps
    counts = [0] * len(models)
    max_counts = [int(m.max_load_fps / delta + 1e-9) for m in models]
    link_loads: dict[tuple[str, str], float] = {}

    def marginal(i: int) -> Optional[float]:
        m = models[i]
        n = counts[i]
        if n + 1 > max_counts[i]:
            return None
        try:
            return m.power((n + 1) * delta) - m.power(n * delta)
        except InfeasibleError:
            return None

    heap: list[tuple[float, int, int]] = []
    for i in range(len(models)):
        mg = marginal(i)
        if mg is not None:
            heapq.heappush(heap, (mg, i, 0))

    assigned = 0
    while assigned < grid_steps:
        if not heap:
            raise InfeasibleError(
                "stream cannot be fully placed: processing or link capacity saturated",
                certificate="capacity",
            )
        mg, i, n_snapshot = heapq.heappop(heap)
        if n_snapshot != counts[i]:
            mg2 = marginal(i)
            if mg2 is not None:
                heapq.heappush(heap, (mg2, i, counts[i]))
            continue
        m = models[i]
        blocked = False
        for key, link, bits in m.hop_bits:
            new_load = link_loads.get(key, 0.0) + bits * delta
            if new_load * link.overhead > link.rate_bps * (1.0 + 1e-9):
                blocked = True
                break
        if blocked:
            continue  # permanently exhausted: link loads only grow
        for key, link, bits in m.hop_bits:
            link_loads[key] = link_loads.get(key, 0.0) + bits * delta
        counts[i] += 1
        assigned += 1
        mg2 = marginal(i)
        if mg2 is not None:
            heapq.heappush(heap, (mg2, i, counts[i]))

    fractions = {
        models[i].site.site_id: counts[i] / grid_steps
        for i in range(len(models))
        if counts[i] > 0
    }
    return make_plan(s, fractions)


def brute_force(s: Scenario, grid_steps: int = 1000) -> PlacementPlan:
    """Exhaustive simplex-grid enumeration; the optimizer's testing oracle.

    Guards at four sites: the grid has O(steps^(k-1)) cells.
    """
    models, hint = _eligible_models(s)
    k = len(models)
    if k > BRUTE_FORCE_MAX_SITES:
        raise TooLargeError(f"{k} sites exceed the brute-force guard of {BRUTE_FORCE_MAX_SITES}")
    fps = s.imaging.fps
    g = grid_steps
    delta = fps / g

    cost = np.full((k, g + 1), np.inf)
    for i, m in enumerate(models):
        top = min(g, int(m.max_load_fps / delta + 1e-9))
        for n in range(top + 1):
            try:
                cost[i, n] = m.power(n * delta)
            except InfeasibleError:
                break

    # Shared links only need checking when they could saturate.
    link_caps: dict[tuple[str, str], float] = {}
    link_bits: dict[tuple[str, str], np.ndarray] = {}
    for i, m in enumerate(models):
        for key, link, bits in m.hop_bits:
            link_caps[key] = link.rate_bps / link.overhead
            arr = link_bits.setdefault(key, np.zeros((k, g + 1)))
            arr[i, :] += bits * delta * np.arange(g + 1)
    checked = {
        key: (link_bits[key], cap)
        for key, cap in link_caps.items()
        if sum(link_bits[key][i, min(g, max_n)] for i, max_n in
               enumerate(int(m.max_load_fps / delta + 1e-9) for m in models))
        > cap * (1.0 + 1e-9)
    }

    best_cost = np.inf
    best_counts: Optional[tuple[int, ...]] = None

    def consider(counts_arrs: list[np.ndarray], total: np.ndarray) -> None:
        nonlocal best_cost, best_counts
        if not np.isfinite(total).any():
            return
        idx = int(np.argmin(total))
        val = float(total.flat[idx])
        if val < best_cost:
            pos = np.unravel_index(idx, total.shape)
            best_cost = val
            best_counts = tuple(int(arr[pos]) for arr in counts_arrs)

    if k == 1:
        total = np.where(np.arange(g + 1) == g, cost[0], np.inf)
        for key, (bits, cap) in checked.items():
            total = np.where(bits[0] <= cap * (1 + 1e-9), total, np.inf)
        consider([np.arange(g + 1)], total)
    elif k == 2:
        n1 = np.arange(g + 1)
        n2 = g - n1
        total = cost[0][n1] + cost[1][n2]
        for key, (bits, cap) in checked.items():
            total = np.where(bits[0][n1] + bits[1][n2] <= cap * (1 + 1e-9), total, np.inf)
        consider([n1, n2], total)
    else:
        inner = k - 1  # vectorize over the last two axes, loop the rest
        loop_dims = k - 3
        loop_ranges = [range(g + 1)] * loop_dims
        for head in itertools.product(*loop_ranges):
            used = sum(head)
            if used > g:
                continue
            rem = g - used
            na = np.arange(rem + 1)
            nb = np.arange(rem + 1)
            NA = na[:, None]
            NB = nb[None, :]
            NC = rem - NA - NB
            valid = NC >= 0
            NCc = np.clip(NC, 0, g)
            total = cost[k - 3][NA] + cost[k - 2][NB] + cost[k - 1][NCc]
            head_cost = sum(cost[i][h] for i, h in enumerate(head))
            total = np.where(valid, total + head_cost, np.inf)
            for key, (bits, cap) in checked.items():
                load = bits[k - 3][NA] + bits[k - 2][NB] + bits[k - 1][NCc]
                load = load + sum(bits[i][h] for i, h in enumerate(head))
                total = np.where(load <= cap * (1 + 1e-9), total, np.inf)
            head_arrs = [np.full(total.shape, h) for h in head]
            consider(head_arrs + [NA + 0 * NB, NB + 0 * NA, NCc], total)

    if best_counts is None or not math.isfinite(best_cost):
        raise InfeasibleError("no feasible point on the enumeration grid", certificate=hint)
    fractions = {
        models[i].site.site_id: best_counts[i] / g
        for i in range(k)
        if best_counts[i] > 0
    }
    return make_plan(s, fractions)


# --------------------------------------------------------------------------
# Baselines and sweeps
# --------------------------------------------------------------------------

def baseline_plans(s: Scenario) -> dict[str, PlacementPlan]:
    """Conventional cloud baselines: everything raw to ground, processed on
    the GS CPU or the GS GPU."""
    gs = s.ground_node
    sites = enumerate_sites(s)
    cpu_site = next((st for st in sites if st.node == gs and st.is_cpu), None)
    gpu_site = next((st for st in sites if st.node == gs and not st.is_cpu), None)
    if cpu_site is None or gpu_site is None:
        raise PlanError("ground station must host both a CPU and a GPU profile")
    return {
        "gs_cpu": make_plan(s, {cpu_site.site_id: 1.0}),
        "gs_gpu": make_plan(s, {gpu_site.site_id: 1.0}),
    }


@dataclass(frozen=True)
class SweepRow:
    fps: float
    power_optimized_w: float  # nan when infeasible
    power_gs_cpu_w: float
    power_gs_gpu_w: float
    active_sites: int
    optimized_feasible: bool
    gs_cpu_feasible: bool
    gs_gpu_feasible: bool
    certificate: str = ""


def _with_fps(s: Scenario, fps: float) -> Scenario:
    return replace(s, imaging=replace(s.imaging, fps=fps))


def sweep_point(s: Scenario, fps: float, grid_steps: int = 1000) -> SweepRow:
    sf = _with_fps(s, fps)
    baselines = baseline_plans(sf)
    evals = {name: evaluate_plan(sf, plan) for name, plan in baselines.items()}
    try:
        plan = optimize(sf, grid_steps=grid_steps)
        ev = evaluate_plan(sf, plan)
        opt_power = ev.total_power_w
        opt_feasible = ev.feasible
        active = len(plan.active_site_ids())
        certificate = "" if ev.feasible else ";".join(ev.reasons)
    except InfeasibleError as exc:
        opt_power = math.nan
        opt_feasible = False
        active = 0
        certificate = exc.certificate

    feasible_baselines = [evals[n].total_power_w for n in evals if evals[n].feasible]
    if opt_feasible and feasible_baselines:
        assert opt_power <= min(feasible_baselines) + 1e-6, (
            f"optimizer dominance violated at fps={fps}"
        )
    return SweepRow(
        fps=fps,
        power_optimized_w=opt_power,
        power_gs_cpu_w=evals["gs_cpu"].total_power_w if evals["gs_cpu"].feasible else math.nan,
        power_gs_gpu_w=evals["gs_gpu"].total_power_w if evals["gs_gpu"].feasible else math.nan,
        active_sites=active,
        optimized_feasible=opt_feasible,
        gs_cpu_feasible=evals["gs_cpu"].feasible,
        gs_gpu_feasible=evals["gs_gpu"].feasible,
        certificate=certificate,
    )


def sweep_fps(s: Scenario, fps_list: list[float], grid_steps: int = 1000) -> list[SweepRow]:
    if not fps_list:
        raise ValueError("fps list must be nonempty")
    return [sweep_point(s, fps, grid_steps=grid_steps) for fps in fps_list]
