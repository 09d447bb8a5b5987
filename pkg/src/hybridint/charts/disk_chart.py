"""Closed-form action-angle chart of the rolling disk (m = R = k = Omega = 1).

Actions are f = ((p_x^2 + x^2)/2, (p_y^2 + y^2)/2, p_theta^2/2). The first two
angles use the two-argument angle(x, p_x) in [0, 2pi), which agrees with
arctan(x/p_x) for p_x > 0; the third, theta/p_theta, is a line coordinate.
"""

from __future__ import annotations

import math

import numpy as np

from ..core import DomainError, PhaseState, make_state, wrap_angle
from ..models.disk import DiskParams, disk_impact_momenta
from .base import ActionAngleChart

ANGULAR = (False, False, False)


def _angle(a, b):
    return wrap_angle(math.atan2(a, b))


def disk_chart_domain(x: PhaseState) -> bool:
    (qx, qy, _), (px, py, pth) = x.q, x.p
    return pth != 0.0 and (qx, px) != (0.0, 0.0) and (qy, py) != (0.0, 0.0)


def disk_forward(x: PhaseState) -> tuple:
    """(x, y, theta, p_x, p_y, p_theta) -> (phi, f)."""
    if not disk_chart_domain(x):
        raise DomainError(f"disk chart needs p_theta != 0, (x, p_x) != 0, (y, p_y) != 0; got z={x.z}")
    (qx, qy, th), (px, py, pth) = x.q, x.p
    f = np.array([0.5 * (px * px + qx * qx), 0.5 * (py * py + qy * qy), 0.5 * pth * pth])
    phi = np.array([_angle(qx, px), _angle(qy, py), th / pth])
    return phi, f


def disk_backward(phi, f, p_theta_sign: float = 1.0) -> PhaseState:
    """(phi, f) -> canonical state on the branch sign(p_theta) = p_theta_sign."""
    phi = np.asarray(phi, dtype=float)
    f = np.asarray(f, dtype=float)
    if np.any(f <= 0):
        raise DomainError(f"disk chart needs all actions positive, got f={f}")
    r1, r2 = math.sqrt(2 * f[0]), math.sqrt(2 * f[1])
    pth = math.copysign(math.sqrt(2 * f[2]), p_theta_sign)
    q = [r1 * math.sin(phi[0]), r2 * math.sin(phi[1]), phi[2] * pth]
    p = [r1 * math.cos(phi[0]), r2 * math.cos(phi[1]), pth]
    return make_state(q, p, ANGULAR)


def surface_residuals(phi, f, a: float) -> tuple:
    """Residuals of the impact-surface equations in chart coordinates for wall height a.

    On the surface y = a and p_theta = p_x, so 2 f_2 sin^2(phi_2) = a^2 and
    f_3 = f_1 cos^2(phi_1).
    """
    return (
        2.0 * f[1] * math.sin(phi[1]) ** 2 - a * a,
        f[2] - f[0] * math.cos(phi[0]) ** 2,
    )


def in_surface_image(phi, f, a: float, tol: float = 1e-9) -> bool:
    r_wall, r_roll = surface_residuals(phi, f, a)
    return (
        abs(r_wall) <= tol * max(1.0, a * a)
        and abs(r_roll) <= tol * max(1.0, f[0])
        and math.sin(phi[1]) > 0.0
    )


def disk_impact_in_chart(phi, f, a: float, e: float, tol: float = 1e-9) -> tuple:
    """Impact at the wall of height a, in chart coordinates, by conjugation.

    On the surface p_theta = p_x, so the p_theta branch is sign(cos phi_1).
    """
    phi = np.asarray(phi, dtype=float)
    f = np.asarray(f, dtype=float)
    if not in_surface_image(phi, f, a, tol):
        raise DomainError(f"(phi, f) = ({phi}, {f}) is not on the impact surface y = {a}")
    x = disk_backward(phi, f, math.copysign(1.0, math.cos(phi[0])))
    px, py, pth = disk_impact_momenta(*x.p, 1.0, 1.0, e)
    return disk_forward(make_state(x.q, [px, py, pth], ANGULAR))


def disk_impact_closed_form(phi, f, a: float, e: float) -> tuple:
    """Closed-form chart impact: phi_1, phi_3, f_1, f_3 unchanged, f_2 -> e^2 f_2 + (1-e^2) a^2 / 2,
    phi_2 -> -arctan(tan(phi_2)/e), the branch fixed by y = a > 0 so that phi_2 lies in (0, pi).
    """
    phi = np.array(phi, dtype=float)
    f = np.array(f, dtype=float)
    t = math.tan(phi[1])
    principal = -math.atan(t / e) if e > 0 else -math.copysign(0.5 * math.pi, t)
    phi[1] = principal % math.pi
    f[1] = e * e * f[1] + 0.5 * (1.0 - e * e) * a * a
    return phi, f


def disk_chart(params: DiskParams = DiskParams(), p_theta_sign: float = 1.0) -> ActionAngleChart:
    if not params.normalized:
        raise ValueError("the closed-form disk chart needs m = R = k = Omega = 1")

    def domain(x):
        return disk_chart_domain(x) and math.copysign(1.0, x.p[2]) == math.copysign(1.0, p_theta_sign)

    return ActionAngleChart(
        name="disk",
        n=3,
        forward=disk_forward,
        backward=lambda phi, f: disk_backward(phi, f, p_theta_sign),
        domain=domain,
        periodic_angles=(True, True, False),
        frequencies=lambda f: np.ones(3),
        angular=ANGULAR,
        angle_names=("phi1", "phi2", "phi3"),
        action_names=("f1", "f2", "f3"),
    )
