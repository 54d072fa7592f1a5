"""Exception types shared across the package."""

from __future__ import annotations


class LeosemError(Exception):
    """Base class for all package errors."""


class ScenarioError(LeosemError):
    """Scenario text could not be parsed or violates an invariant."""


class InfeasibleError(LeosemError):
    """No feasible operating point exists for the requested load.

    ``certificate`` names the binding constraint: "capacity", "deadline",
    "recall", or "link".
    """

    def __init__(self, message: str, certificate: str = "capacity"):
        super().__init__(message)
        self.certificate = certificate


class OverloadError(LeosemError):
    """Offered load exceeds a link's rate."""


class CodecError(LeosemError):
    """Semantic payload could not be encoded or decoded."""


class PlanError(LeosemError):
    """Placement plan is structurally invalid for the scenario."""
