"""Action-angle chart of the pendulum in the libration regime (units m = g = l = 1).

With kappa = H/2 in (0, 1):

    theta = 2 arcsin(sqrt(kappa) sn(2 K(kappa) zeta / pi | kappa))
    p     = 2 sqrt(kappa) cn(2 K(kappa) zeta / pi | kappa)
    J     = (8/pi) [E(kappa) - (1 - kappa) K(kappa)]

(zeta, J) is the Darboux pair; kappa is kept as the convenient level label.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from ..core import DomainError, PhaseState, make_state, wrap_angle, wrap_symmetric
from ..elliptic import complete_E, complete_K, inverse_amplitude, jacobi_sn_cn_dn
from ..models.pendulum import pendulum_energy, pendulum_impact
from .base import ActionAngleChart

ANGULAR = (True,)
J_MAX = 8.0 / math.pi  # action at the separatrix kappa -> 1


def _check_kappa(kappa):
    if not 0.0 < kappa < 1.0:
        raise DomainError(f"libration chart needs 0 < kappa < 1, got kappa={kappa!r}")


def action_from_kappa(kappa: float) -> float:
    _check_kappa(kappa)
    return 8.0 / math.pi * (complete_E(kappa) - (1.0 - kappa) * complete_K(kappa))


def kappa_from_action(J: float) -> float:
    if not 0.0 < J < J_MAX:
        raise DomainError(f"libration action must lie in (0, 8/pi), got J={J!r}")
    hi = 1.0 - 1e-16
    return brentq(lambda k: action_from_kappa(k) - J, 1e-300, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps)


def frequency(kappa: float) -> float:
    """d zeta / dt = pi / (2 K(kappa)); also dH/dJ."""
    _check_kappa(kappa)
    return math.pi / (2.0 * complete_K(kappa))


def pendulum_forward(x: PhaseState) -> tuple:
    """(theta, p) -> (kappa, zeta, J).

    The amplitude am(u) is recovered as atan2(sn, cn) with sn = sin(theta/2)/sqrt(kappa)
    and cn = p/(2 sqrt(kappa)); this picks the branch where cn has the sign of p and
    stays well conditioned at the turning points.
    """
    theta = wrap_symmetric(x.q[0])
    p = float(x.p[0])
    kappa = 0.5 * pendulum_energy(theta, p)
    _check_kappa(kappa)
    rk = math.sqrt(kappa)
    sn = math.sin(0.5 * theta) / rk
    if abs(sn) > 1.0 + 1e-12:
        raise DomainError(f"|sin(theta/2)| exceeds sqrt(kappa) at theta={theta}, kappa={kappa}")
    cn = p / (2.0 * rk)
    u = inverse_amplitude(math.atan2(sn, cn), kappa)
    zeta = wrap_angle(math.pi * u / (2.0 * complete_K(kappa)))
    return kappa, zeta, action_from_kappa(kappa)


def pendulum_backward(kappa: float, zeta: float) -> PhaseState:
    _check_kappa(kappa)
    u = 2.0 * complete_K(kappa) * zeta / math.pi
    sn, cn, _ = jacobi_sn_cn_dn(u, kappa)
    rk = math.sqrt(kappa)
    return make_state([2.0 * math.asin(max(-1.0, min(1.0, rk * sn)))], [2.0 * rk * cn], ANGULAR)


def on_floor(kappa: float, zeta: float, tol: float = 1e-9) -> bool:
    x = pendulum_backward(kappa, zeta)
    return abs(math.cos(x.q[0])) <= tol and x.p[0] >= -tol


def pendulum_impact_in_chart(kappa: float, zeta: float, e: float, check_surface: bool = True, tol: float = 1e-9) -> tuple:
    """Floor impact in (kappa, zeta) coordinates.

    e = 1: kappa is unchanged and zeta+ = pi - zeta- (mod 2pi), the angle with the
    same sn and opposite cn. Otherwise the map is conjugated through (theta, p).
    ``check_surface=False`` evaluates the chart relation off the floor as well.
    """
    if check_surface and not on_floor(kappa, zeta, tol):
        raise DomainError(f"(kappa, zeta) = ({kappa}, {zeta}) is not on the floor cos(theta) = 0, p >= 0")
    if e == 1.0:
        _check_kappa(kappa)
        return kappa, wrap_angle(math.pi - zeta)
    x_post = pendulum_impact(e)(pendulum_backward(kappa, zeta))
    k_post, z_post, _ = pendulum_forward(x_post)
    return k_post, z_post


def pendulum_chart() -> ActionAngleChart:
    def forward(x):
        _, zeta, J = pendulum_forward(x)
        return np.array([zeta]), np.array([J])

    def backward(phi, s):
        return pendulum_backward(kappa_from_action(float(s[0])), float(phi[0]))

    def domain(x):
        return 0.0 < 0.5 * pendulum_energy(x.q[0], x.p[0]) < 1.0

    return ActionAngleChart(
        name="pendulum",
        n=1,
        forward=forward,
        backward=backward,
        domain=domain,
        periodic_angles=(True,),
        frequencies=lambda s: np.array([frequency(kappa_from_action(float(s[0])))]),
        angular=ANGULAR,
        angle_names=("zeta",),
        action_names=("J",),
    )
