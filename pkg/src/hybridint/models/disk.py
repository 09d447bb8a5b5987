"""Rolling disk in a harmonic potential between two rough walls.

Phase space coordinates are (x, y, theta, p_x, p_y, p_theta). The wall contact
loci are y = R (lower wall, reached from above) and y = h - R (upper wall,
reached from below).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..core import FROM_NEGATIVE, FROM_POSITIVE, GuardedImpact, HybridSystem, Observable, PhaseState, make_state
from ..symplectic import IntegralSet
from .base import Model

LOWER, UPPER = 0, 1


@dataclass(frozen=True)
class DiskParams:
    m: float = 1.0
    R: float = 1.0
    k: float = 1.0
    Omega: float = 1.0
    h: float = 3.0
    e: float = 0.5

    def __post_init__(self):
        for name in ("m", "R", "k", "Omega", "h"):
            if not getattr(self, name) > 0:
                raise ValueError(f"disk parameter {name} must be positive, got {getattr(self, name)!r}")
        if not 0.0 <= self.e <= 1.0:
            raise ValueError(f"restitution e must lie in [0, 1], got {self.e!r}")
        if not self.h > 2.0 * self.R:
            raise ValueError(f"wall separation h={self.h} must exceed 2R={2 * self.R}")

    @property
    def normalized(self) -> bool:
        return self.m == self.R == self.k == self.Omega == 1.0

    def wall(self, component_id: int) -> float:
        return self.R if component_id == LOWER else self.h - self.R


def _unpack(x: PhaseState):
    (qx, qy, th), (px, py, pth) = x.q, x.p
    return qx, qy, th, px, py, pth


def disk_hamiltonian(params: DiskParams) -> Observable:
    m, k, w2 = params.m, params.k, params.Omega**2

    def fn(x):
        qx, qy, _, px, py, pth = _unpack(x)
        return (px * px + py * py) / (2 * m) + pth * pth / (2 * m * k * k) + 0.5 * w2 * (qx * qx + qy * qy)

    def grad(x):
        qx, qy, _, px, py, pth = _unpack(x)
        return np.array([w2 * qx, w2 * qy, 0.0, px / m, py / m, pth / (m * k * k)])

    return Observable("H", fn, grad)


def disk_integrals(params: DiskParams) -> IntegralSet:
    """f_1, f_2 (the two oscillator energies) and f_3 (rotational energy); H = f_1 + f_2 + f_3."""
    m, k, w2 = params.m, params.k, params.Omega**2

    def f1(x):
        qx, _, _, px, _, _ = _unpack(x)
        return px * px / (2 * m) + 0.5 * w2 * qx * qx

    def g1(x):
        qx, _, _, px, _, _ = _unpack(x)
        return np.array([w2 * qx, 0, 0, px / m, 0, 0], dtype=float)

    def f2(x):
        _, qy, _, _, py, _ = _unpack(x)
        return py * py / (2 * m) + 0.5 * w2 * qy * qy

    def g2(x):
        _, qy, _, _, py, _ = _unpack(x)
        return np.array([0, w2 * qy, 0, 0, py / m, 0], dtype=float)

    def f3(x):
        pth = x.p[2]
        return pth * pth / (2 * m * k * k)

    def g3(x):
        return np.array([0, 0, 0, 0, 0, x.p[2] / (m * k * k)], dtype=float)

    return IntegralSet((Observable("f1", f1, g1), Observable("f2", f2, g2), Observable("f3", f3, g3)))


def disk_impact_momenta(px, py, pth, R, k, e):
    """Post-impact momenta for rolling contact without sliding and normal restitution e."""
    s = k * k + R * R
    return (R * R * px + k * k * R * pth) / s, -e * py, (R * px + k * k * pth) / s


def disk_impact(params: DiskParams):
    def impact(x: PhaseState) -> PhaseState:
        px, py, pth = disk_impact_momenta(*x.p, params.R, params.k, params.e)
        return make_state(x.q, [px, py, pth], x.angular)

    return impact


def rolling_constraint(params: DiskParams) -> Observable:
    """p_theta - k^2 p_x / R, which vanishes on the exact switching surface."""
    c = params.k**2 / params.R

    def fn(x):
        return x.p[2] - c * x.p[0]

    def grad(x):
        return np.array([0, 0, 0, -c, 0, 1.0])

    return Observable("rolling", fn, grad)


def _wall_component(params: DiskParams, component_id: int) -> GuardedImpact:
    a = params.wall(component_id)
    lower = component_id == LOWER
    rolling = rolling_constraint(params)
    c = params.k**2 / params.R

    guard = Observable(
        f"y-{a:g}",
        lambda x: x.q[1] - a,
        lambda x: np.array([0, 1.0, 0, 0, 0, 0]),
    )

    def admissible(x):
        return x.p[1] < 0 if lower else x.p[1] > 0

    def project(x):
        qx, _, th, px, py, _ = _unpack(x)
        py = -abs(py) if lower else abs(py)
        return make_state([qx, a, th], [px, py, c * px], x.angular)

    return GuardedImpact(
        component_id=component_id,
        guard=guard,
        impact=disk_impact(params),
        admissible=admissible,
        approach=FROM_POSITIVE if lower else FROM_NEGATIVE,
        constraints=(rolling,),
        project=project,
        label="lower wall" if lower else "upper wall",
    )


def disk_system(params: DiskParams) -> HybridSystem:
    return HybridSystem(
        n=3,
        hamiltonian=disk_hamiltonian(params),
        components=(_wall_component(params, LOWER), _wall_component(params, UPPER)),
        parameters=asdict(params),
        angular=(False, False, False),
        separable=True,
        q_names=("x", "y", "theta"),
        p_names=("p_x", "p_y", "p_theta"),
        name="disk",
    )


def build_disk(params: DiskParams = DiskParams()) -> Model:
    """Disk system, its three integrals, and the action-angle chart when m=R=k=Omega=1."""
    chart = None
    if params.normalized:
        from ..charts.disk_chart import disk_chart

        chart = disk_chart(params)
    top = params.h - params.R
    box = (
        np.array([-2.0, -top - 1.0, -3.0, -2.0, -2.0, -2.0]),
        np.array([2.0, top + 1.0, 3.0, 2.0, 2.0, 2.0]),
    )
    return Model(
        name="disk",
        params=params,
        system=disk_system(params),
        integrals=disk_integrals(params),
        chart=chart,
        box=box,
        walls={LOWER: params.wall(LOWER), UPPER: params.wall(UPPER)},
    )
