"""Capacity, delay, and power models for FSO inter-satellite and RF feeder links.

Links are lossless rate pipes; an optional overhead factor (>= 1) inflates
the effective airtime to cover retransmissions of residually corrupted
frames.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import OverloadError

LIGHT_SPEED_M_S = 299_792_458.0

FSO_ISL = "fso_isl"
RF_FEEDER = "rf_feeder"
LINK_KINDS = (FSO_ISL, RF_FEEDER)


@dataclass(frozen=True)
class LinkProfile:
    a: str
    b: str
    kind: str  # FSO_ISL or RF_FEEDER
    rate_bps: float
    p_tx_w: float
    distance_m: float
    overhead: float = 1.0  # retransmission overhead factor, >= 1

    @property
    def endpoints(self) -> tuple[str, str]:
        return (self.a, self.b)

    def other(self, node: str) -> str:
        return self.b if node == self.a else self.a


def transmission_time(bits: float, link: LinkProfile) -> float:
    """Airtime to push ``bits`` through the link (store-and-forward per hop)."""
    if bits < 0:
        raise ValueError("bits must be nonnegative")
    return bits * link.overhead / link.rate_bps


def propagation_delay(distance_m: float) -> float:
    if distance_m < 0:
        raise ValueError("distance must be nonnegative")
    return distance_m / LIGHT_SPEED_M_S


def link_power(load_bps: float, link: LinkProfile) -> float:
    """Average transmit power at the offered load; raises OverloadError above rate."""
    if load_bps < 0:
        raise ValueError("load must be nonnegative")
    duty = load_bps * link.overhead / link.rate_bps
    if duty > 1.0 + 1e-9:
        raise OverloadError(
            f"link {link.a}-{link.b} offered {load_bps:.6g} bps exceeds rate {link.rate_bps:.6g} bps"
        )
    return link.p_tx_w * min(duty, 1.0)
