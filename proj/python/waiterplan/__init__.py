"""Set-based tray-carrying trajectory planner (pybind11 bindings)."""

from ._core import (
    ControllerConfig,
    Interval,
    PlanLog,
    PolyZonotope,
    Scenario,
    VarTag,
    contact_residuals,
    containment_audit,
    load_scenario,
    mass_matrix,
    plan,
    rnea,
    tracking_bounds,
)

__all__ = [
    "ControllerConfig",
    "Interval",
    "PlanLog",
    "PolyZonotope",
    "Scenario",
    "VarTag",
    "contact_residuals",
    "containment_audit",
    "load_scenario",
    "mass_matrix",
    "plan",
    "rnea",
    "tracking_bounds",
]
