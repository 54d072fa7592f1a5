"""Analytic service models for frequency-scalable CPUs and fixed-rate GPUs.

A CPU serves ``cores * flops_per_cycle_per_core * f`` FLOPs per second and
draws ``p_static + cores * kappa * f**exponent`` watts while busy; the
dynamic term is scaled by the duty cycle.  A GPU serves a fixed number of
images per second and its power interpolates linearly between idle and
active with the duty cycle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

from .errors import InfeasibleError


@dataclass(frozen=True)
class CpuProfile:
    cores: int
    f_min_hz: float
    f_max_hz: float
    kappa: float  # W / Hz**power_exponent per core
    flops_per_cycle_per_core: float = 8.0
    p_static_w: float = 0.0
    power_exponent: float = 3.0

    @classmethod
    def from_tdp(
        cls,
        cores: int,
        f_min_hz: float,
        f_max_hz: float,
        tdp_w: float,
        flops_per_cycle_per_core: float = 8.0,
        p_static_w: float = 0.0,
        power_exponent: float = 3.0,
    ) -> "CpuProfile":
        """Calibrate kappa so full-duty power at f_max equals the TDP."""
        kappa = (tdp_w - p_static_w) / (cores * f_max_hz**power_exponent)
        return cls(
            cores=cores,
            f_min_hz=f_min_hz,
            f_max_hz=f_max_hz,
            kappa=kappa,
            flops_per_cycle_per_core=flops_per_cycle_per_core,
            p_static_w=p_static_w,
            power_exponent=power_exponent,
        )

    def flops_per_second(self, f_hz: float) -> float:
        return self.cores * self.flops_per_cycle_per_core * f_hz

    def capacity_fps(self, flops_per_image: float) -> float:
        """Sustainable throughput at the maximum frequency."""
        return self.flops_per_second(self.f_max_hz) / flops_per_image

    def dynamic_power_w(self, f_hz: float) -> float:
        return self.cores * self.kappa * f_hz**self.power_exponent


@dataclass(frozen=True)
class GpuProfile:
    throughput_fps: float
    p_active_w: float
    p_idle_w: float = 0.0

    def capacity_fps(self, flops_per_image: float) -> float:
        return self.throughput_fps


ComputeProfile = Union[CpuProfile, GpuProfile]


@dataclass(frozen=True)
class ServicePoint:
    time_per_image_s: float
    power_w: float
    chosen_f_hz: Optional[float]  # None for GPUs

    @property
    def service_rate_fps(self) -> float:
        return 1.0 / self.time_per_image_s


_REL_TOL = 1e-9


def cpu_service(
    p: CpuProfile,
    flops_per_image: float,
    load_fps: float,
    per_image_deadline_s: float = math.inf,
) -> ServicePoint:
    """Operating point at the minimum frequency that sustains the load.

    The frequency must satisfy both the stability condition
    (service rate >= load) and the per-image deadline.  Raises
    InfeasibleError when even f_max cannot.
    """
    if load_fps < 0:
        raise ValueError("load_fps must be nonnegative")
    per_core = p.cores * p.flops_per_cycle_per_core
    f_for_load = load_fps * flops_per_image / per_core
    f_for_deadline = 0.0
    if per_image_deadline_s != math.inf:
        if per_image_deadline_s <= 0:
            raise InfeasibleError("per-image deadline is nonpositive", certificate="deadline")
        f_for_deadline = flops_per_image / (per_core * per_image_deadline_s)
    f_star = max(p.f_min_hz, f_for_load, f_for_deadline)
    if f_star > p.f_max_hz * (1.0 + _REL_TOL):
        if f_for_deadline > p.f_max_hz * (1.0 + _REL_TOL) and f_for_load <= p.f_max_hz * (1.0 + _REL_TOL):
            raise InfeasibleError(
                f"deadline {per_image_deadline_s:.6g} s needs f={f_for_deadline:.4g} Hz > f_max",
                certificate="deadline",
            )
        raise InfeasibleError(
            f"load {load_fps:.6g} fps needs f={f_for_load:.4g} Hz > f_max "
            f"(capacity {p.capacity_fps(flops_per_image):.6g} fps)",
            certificate="capacity",
        )
    f_star = min(f_star, p.f_max_hz)
    return cpu_service_at(p, flops_per_image, f_star, load_fps)


def cpu_service_at(
    p: CpuProfile, flops_per_image: float, f_hz: float, load_fps: float
) -> ServicePoint:
    """Operating point at an explicitly chosen frequency (no feasibility check)."""
    time_per_image = flops_per_image / (p.cores * p.flops_per_cycle_per_core * f_hz)
    duty = min(1.0, load_fps * time_per_image)
    power = p.p_static_w + p.dynamic_power_w(f_hz) * duty
    return ServicePoint(time_per_image_s=time_per_image, power_w=power, chosen_f_hz=f_hz)


def gpu_service(p: GpuProfile, load_fps: float, strict: bool = True) -> ServicePoint:
    """Operating point of a fixed-rate GPU under the given load.

    With strict=True an offered load above the throughput raises
    InfeasibleError; with strict=False the duty cycle saturates at 1
    (used when evaluating externally supplied, possibly unstable plans).
    """
    if load_fps < 0:
        raise ValueError("load_fps must be nonnegative")
    if strict and load_fps > p.throughput_fps * (1.0 + _REL_TOL):
        raise InfeasibleError(
            f"load {load_fps:.6g} fps exceeds GPU throughput {p.throughput_fps:.6g} fps",
            certificate="capacity",
        )
    duty = min(1.0, load_fps / p.throughput_fps)
    power = p.p_idle_w + (p.p_active_w - p.p_idle_w) * duty
    return ServicePoint(
        time_per_image_s=1.0 / p.throughput_fps, power_w=power, chosen_f_hz=None
    )


def service_point(
    profile: ComputeProfile,
    flops_per_image: float,
    load_fps: float,
    per_image_deadline_s: float = math.inf,
) -> ServicePoint:
    if isinstance(profile, CpuProfile):
        return cpu_service(profile, flops_per_image, load_fps, per_image_deadline_s)
    return gpu_service(profile, load_fps)


def energy_per_image(sp: ServicePoint, load_fps: float) -> float:
    """Marginal energy attributable to one image at the given load, in joules."""
    if load_fps <= 0:
        raise ValueError("energy per image is undefined at zero load")
    return sp.power_w / load_fps
