"""Action-angle charts and impact maps written in chart coordinates."""

from .base import ActionAngleChart, conjugate_impact
from .disk_chart import (
    disk_backward,
    disk_chart,
    disk_forward,
    disk_impact_closed_form,
    disk_impact_in_chart,
    in_surface_image,
    surface_residuals,
)
from .pendulum_libration_chart import (
    action_from_kappa,
    frequency,
    kappa_from_action,
    pendulum_backward,
    pendulum_chart,
    pendulum_forward,
    pendulum_impact_in_chart,
)

__all__ = [
    "ActionAngleChart",
    "conjugate_impact",
    "disk_backward",
    "disk_chart",
    "disk_forward",
    "disk_impact_closed_form",
    "disk_impact_in_chart",
    "in_surface_image",
    "surface_residuals",
    "action_from_kappa",
    "frequency",
    "kappa_from_action",
    "pendulum_backward",
    "pendulum_chart",
    "pendulum_forward",
    "pendulum_impact_in_chart",
]
