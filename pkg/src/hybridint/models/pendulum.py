"""Planar pendulum mounted on the floor, bouncing off it at cos(theta) = 0."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from ..core import EITHER, GuardedImpact, HybridSystem, Observable, PhaseState, make_state, wrap_angle
from ..symplectic import IntegralSet
from .base import Model


@dataclass(frozen=True)
class PendulumParams:
    m: float = 1.0
    g: float = 1.0
    l: float = 1.0
    e: float = 1.0

    def __post_init__(self):
        for name in ("m", "g", "l"):
            if not getattr(self, name) > 0:
                raise ValueError(f"pendulum parameter {name} must be positive, got {getattr(self, name)!r}")
        if not 0.0 <= self.e <= 1.0:
            raise ValueError(f"restitution e must lie in [0, 1], got {self.e!r}")

    @property
    def normalized(self) -> bool:
        return self.m == self.g == self.l == 1.0


def pendulum_energy(theta, p, m=1.0, g=1.0, l=1.0):
    # 1 - cos(theta) written as 2 sin^2(theta/2) to keep precision near the bottom
    s = math.sin(0.5 * theta)
    return p * p / (2 * m * l * l) + 2.0 * m * g * l * s * s


def pendulum_hamiltonian(params: PendulumParams) -> Observable:
    m, g, l = params.m, params.g, params.l

    def fn(x):
        return pendulum_energy(x.q[0], x.p[0], m, g, l)

    def grad(x):
        return np.array([m * g * l * math.sin(x.q[0]), x.p[0] / (m * l * l)])

    return Observable("H", fn, grad)


def pendulum_impact(e: float):
    """(theta, p) -> (theta, -e p)."""

    def impact(x: PhaseState) -> PhaseState:
        return make_state(x.q, -e * x.p, x.angular)

    return impact


def floor_component(params: PendulumParams) -> GuardedImpact:
    guard = Observable(
        "cos(theta)",
        lambda x: math.cos(x.q[0]),
        lambda x: np.array([-math.sin(x.q[0]), 0.0]),
    )

    def project(x):
        th = wrap_angle(x.q[0])
        return make_state([0.5 * math.pi if th < math.pi else 1.5 * math.pi], [abs(x.p[0])], x.angular)

    return GuardedImpact(
        component_id=0,
        guard=guard,
        impact=pendulum_impact(params.e),
        admissible=lambda x: x.p[0] >= 0,
        approach=EITHER,
        project=project,
        label="floor",
    )


def pendulum_system(params: PendulumParams, wall: bool = True) -> HybridSystem:
    return HybridSystem(
        n=1,
        hamiltonian=pendulum_hamiltonian(params),
        components=(floor_component(params),) if wall else (),
        parameters=asdict(params),
        angular=(True,),
        separable=True,
        q_names=("theta",),
        p_names=("p",),
        name="pendulum",
    )


def build_pendulum(params: PendulumParams = PendulumParams(), wall: bool = True) -> Model:
    """Pendulum system with F = (H) and, for m=g=l=1, the libration chart.

    ``wall=False`` drops the impact component, leaving the smooth pendulum.
    """
    chart = None
    if params.normalized:
        from ..charts.pendulum_libration_chart import pendulum_chart

        chart = pendulum_chart()
    system = pendulum_system(params, wall)
    return Model(
        name="pendulum",
        params=params,
        system=system,
        integrals=IntegralSet((system.hamiltonian,)),
        chart=chart,
        box=(np.array([0.0, -2.5]), np.array([2.0 * math.pi, 2.5])),
    )
