"""Time integration of the smooth flow, impact-event localization, hybrid simulation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import (
    ERROR,
    FROM_NEGATIVE,
    FROM_POSITIVE,
    TIME_LIMIT,
    TOL_GUARD,
    ZENO_GUARD,
    Arc,
    GuardedImpact,
    HybridSystem,
    HybridTrajectory,
    ImpactEvent,
    ImpactSurfaceError,
    PhaseState,
    raw_state,
    state_from_z,
)
from .symplectic import gradient

STORMER_VERLET = "stormer_verlet"
RK4 = "rk4"
SCHEMES = (STORMER_VERLET, RK4)


class SimultaneousImpactError(RuntimeError):
    """Two impact components fire within the event tolerance of each other."""


@dataclass(frozen=True)
class IntegratorConfig:
    scheme: str = RK4
    h: float = 1e-3
    t_max: float = 10.0
    event_tol: float = 1e-10
    delta_min: float = 1e-6
    max_impacts: int = 10**6
    tol_guard: float = TOL_GUARD

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if not self.h > 0:
            raise ValueError("step h must be positive")
        if not self.t_max >= 0:
            raise ValueError("t_max must be non-negative")
        if not 0 < self.event_tol < self.h:
            raise ValueError("need 0 < event_tol < h")
        if not self.delta_min > self.event_tol:
            raise ValueError("need delta_min > event_tol")
        if self.max_impacts < 1:
            raise ValueError("max_impacts must be at least 1")


def _grad_z(system: HybridSystem, z: np.ndarray) -> np.ndarray:
    return gradient(system.hamiltonian, raw_state(z, system.angular))


def _step_z(system: HybridSystem, z: np.ndarray, h: float, scheme: str) -> np.ndarray:
    n = system.n
    if scheme == STORMER_VERLET:
        if not system.separable:
            raise ValueError("stormer_verlet needs a separable Hamiltonian H = T(p) + V(q)")
        q, p = z[:n], z[n:]
        p_half = p - 0.5 * h * _grad_z(system, z)[:n]
        q_new = q + h * _grad_z(system, np.concatenate([q, p_half]))[n:]
        p_new = p_half - 0.5 * h * _grad_z(system, np.concatenate([q_new, p_half]))[:n]
        out = np.concatenate([q_new, p_new])
    elif scheme == RK4:

        def field(y):
            g = _grad_z(system, y)
            return np.concatenate([g[n:], -g[:n]])

        k1 = field(z)
        k2 = field(z + 0.5 * h * k1)
        k3 = field(z + 0.5 * h * k2)
        k4 = field(z + h * k3)
        out = z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    if not np.all(np.isfinite(out)):
        raise FloatingPointError(f"integration produced a non-finite state from z={z}")
    return state_from_z(out, system.angular).z


def step(system: HybridSystem, x: PhaseState, h: float, scheme: str = RK4) -> PhaseState:
    """One step of the chosen scheme for Hamilton's equations. Negative h runs backward."""
    return state_from_z(_step_z(system, x.z, h, scheme), system.angular)


def _crosses(g_a: float, g_b: float, approach: str) -> bool:
    down = g_a > 0.0 and g_b <= 0.0
    up = g_a < 0.0 and g_b >= 0.0
    if approach == FROM_POSITIVE:
        return down
    if approach == FROM_NEGATIVE:
        return up
    return down or up


def bisect_crossing(
    system: HybridSystem,
    x_a: PhaseState,
    h: float,
    g: Callable[[PhaseState], float],
    scheme: str = RK4,
    tol: float = 1e-10,
) -> tuple:
    """Shrink [0, h] around a sign change of g along the step from x_a.

    Each probe re-integrates from x_a with a single step of the probe length, so
    the returned state lies on a numerical trajectory. Returns (tau, state) at the
    left end of the final bracket, i.e. still on the approach side of the guard;
    the post-impact state then starts on the physical side, and a later crossing
    that begins and ends inside one step is not lost.
    """
    g_a = g(x_a)
    lo, hi = 0.0, h
    x_lo = x_a
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        x_mid = step(system, x_a, mid, scheme)
        g_mid = g(x_mid)
        if g_mid != 0.0 and math.copysign(1.0, g_mid) == math.copysign(1.0, g_a):
            lo, x_lo = mid, x_mid
        else:
            hi = mid
    return lo, x_lo


def locate_event(
    system: HybridSystem,
    x_a: PhaseState,
    t_a: float,
    x_b: PhaseState,
    t_b: float,
    component: GuardedImpact,
    cfg: IntegratorConfig = IntegratorConfig(),
) -> Optional[tuple]:
    """Earliest admissible crossing of ``component``'s guard inside [t_a, t_b].

    Returns (t_star, x_star) or None. A sign change whose located state is not
    admissible is not an impact and yields None.
    """
    g = component.guard
    if not _crosses(g(x_a), g(x_b), component.approach):
        return None
    tau, x_star = bisect_crossing(system, x_a, t_b - t_a, g, cfg.scheme, cfg.event_tol)
    if not component.admissible(x_star):
        return None
    return t_a + tau, x_star


class _ArcBuilder:
    def __init__(self, angular):
        self.angular = angular
        self.t = []
        self.z = []

    def add(self, t, x: PhaseState):
        self.t.append(float(t))
        self.z.append(x.z)

    def close(self) -> Arc:
        return Arc(np.array(self.t), np.array(self.z), self.angular)


def simulate(system: HybridSystem, x0: PhaseState, cfg: IntegratorConfig = IntegratorConfig()) -> HybridTrajectory:
    """Run the hybrid flow from x0 up to cfg.t_max.

    If x0 already sits on an admissible guard the impact is applied at t = 0.
    Impacts closer than cfg.delta_min, or more than cfg.max_impacts of them,
    end the run with termination ``zeno_guard``; an impact whose image is again
    on the surface ends it with ``error``.
    """
    arcs, events = [], []
    arc = _ArcBuilder(system.angular)
    t = 0.0
    x = x0
    arc.add(t, x)
    termination, message = TIME_LIMIT, ""

    def fire(t_star, comp, x_pre):
        nonlocal arc, x, t
        try:
            x_post = comp.apply(x_pre, cfg.tol_guard)
            failure = None
        except ImpactSurfaceError as err:
            x_post = comp.impact(x_pre)
            failure = str(err)
        events.append(ImpactEvent(t_star, comp.component_id, x_pre, x_post))
        arcs.append(arc.close())
        arc = _ArcBuilder(system.angular)
        arc.add(t_star, x_post)
        x, t = x_post, t_star
        return failure

    for comp in system.components:
        if comp.on_guard(x, cfg.tol_guard):
            failure = fire(0.0, comp, x)
            if failure:
                arcs.append(arc.close())
                return HybridTrajectory(arcs, events, ERROR, failure)
            break

    eps_t = 1e-12 * max(1.0, cfg.t_max)
    while cfg.t_max - t > eps_t:
        h = min(cfg.h, cfg.t_max - t)
        x_b = step(system, x, h, cfg.scheme)
        hits = []
        for comp in system.components:
            found = locate_event(system, x, t, x_b, t + h, comp, cfg)
            if found is not None:
                hits.append((found[0], comp, found[1]))
        if not hits:
            t = t + h if cfg.t_max - (t + h) > eps_t else cfg.t_max
            x = x_b
            arc.add(t, x)
            continue

        hits.sort(key=lambda item: item[0])
        if len(hits) > 1 and hits[1][0] - hits[0][0] < cfg.event_tol:
            raise SimultaneousImpactError(
                f"components {hits[0][1].component_id} and {hits[1][1].component_id} fire together at t={hits[0][0]}"
            )
        t_star, comp, x_pre = hits[0]
        if events and t_star - events[-1].t < cfg.delta_min:
            arc.add(t_star, x_pre)
            termination = ZENO_GUARD
            message = f"impacts at t={events[-1].t!r} and t={t_star!r} are closer than delta_min={cfg.delta_min}"
            break
        if len(events) >= cfg.max_impacts:
            arc.add(t_star, x_pre)
            termination = ZENO_GUARD
            message = f"more than max_impacts={cfg.max_impacts} impacts"
            break
        arc.add(t_star, x_pre)
        failure = fire(t_star, comp, x_pre)
        if failure:
            termination, message = ERROR, failure
            break

    arcs.append(arc.close())
    return HybridTrajectory(arcs, events, termination, message)
