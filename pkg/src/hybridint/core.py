"""Shared domain types: phase-space states, observables, impacts, hybrid systems."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi

# Guard membership tolerance in model units; event localization refines below it.
TOL_GUARD = 1e-9


class DomainError(ValueError):
    """An observable or chart was evaluated outside its declared domain."""


class ImpactSurfaceError(RuntimeError):
    """A post-impact state lies on the impact surface again (Delta(S) meets S)."""


def wrap_angle(value):
    """Reduce an angle to [0, 2pi). Works on floats and arrays."""
    out = np.mod(value, TWO_PI)
    # np.mod rounds tiny negatives up to exactly 2pi
    if np.ndim(out):
        out[out >= TWO_PI] = 0.0
        return out
    return 0.0 if out >= TWO_PI else float(out)


def wrap_symmetric(value):
    """Reduce an angle to (-pi, pi]."""
    out = np.pi - np.mod(np.pi - np.asarray(value, dtype=float), TWO_PI)
    return out if np.ndim(out) else float(out)


@dataclass(frozen=True)
class PhaseState:
    """A point (q, p) of a 2n-dimensional canonical phase space.

    ``angular[i]`` marks q[i] as an angle mod 2pi; such entries are stored in [0, 2pi).
    Use :func:`make_state` to build one; the arrays are read-only.
    """

    q: np.ndarray
    p: np.ndarray
    angular: tuple

    @property
    def n(self) -> int:
        return self.q.shape[0]

    @property
    def z(self) -> np.ndarray:
        """Flat vector (q, p) of length 2n."""
        return np.concatenate([self.q, self.p])

    def with_z(self, z) -> "PhaseState":
        z = np.asarray(z, dtype=float)
        return make_state(z[: self.n], z[self.n :], self.angular)


def make_state(q, p, angular: Optional[Sequence[bool]] = None) -> PhaseState:
    q = np.array(q, dtype=float, ndmin=1)
    p = np.array(p, dtype=float, ndmin=1)
    if q.ndim != 1 or p.ndim != 1 or q.shape != p.shape:
        raise ValueError(f"q and p must be vectors of equal length, got {q.shape} and {p.shape}")
    if q.shape[0] < 1:
        raise ValueError("phase space needs n >= 1")
    if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
        raise ValueError("state entries must be finite")
    if angular is None:
        angular = (False,) * q.shape[0]
    angular = tuple(bool(a) for a in angular)
    if len(angular) != q.shape[0]:
        raise ValueError("one periodicity flag per coordinate is required")
    mask = np.array(angular)
    if mask.any():
        q[mask] = wrap_angle(q[mask])
    q.setflags(write=False)
    p.setflags(write=False)
    return PhaseState(q, p, angular)


def raw_state(z: np.ndarray, angular: tuple) -> PhaseState:
    """Unvalidated, unwrapped state for inner loops (integrator stages)."""
    n = z.shape[0] // 2
    return PhaseState(z[:n], z[n:], angular)


def state_from_z(z, angular: Sequence[bool]) -> PhaseState:
    z = np.asarray(z, dtype=float)
    n = z.shape[0] // 2
    return make_state(z[:n], z[n:], angular)


@dataclass(frozen=True)
class Observable:
    """A named scalar field on phase space with an optional analytic gradient.

    ``grad`` returns d f as a length-2n vector ordered (df/dq, df/dp).
    ``domain`` is an optional predicate; evaluating outside it raises DomainError.
    """

    name: str
    fn: Callable[[PhaseState], float]
    grad: Optional[Callable[[PhaseState], np.ndarray]] = None
    domain: Optional[Callable[[PhaseState], bool]] = None

    def check_domain(self, x: PhaseState) -> None:
        if self.domain is not None and not self.domain(x):
            raise DomainError(f"{self.name} evaluated outside its domain at z={x.z}")

    def __call__(self, x: PhaseState) -> float:
        self.check_domain(x)
        value = float(self.fn(x))
        if not math.isfinite(value):
            raise DomainError(f"{self.name} is not finite at z={x.z}")
        return value


FROM_POSITIVE = "from_positive"
FROM_NEGATIVE = "from_negative"
EITHER = "either"
APPROACHES = (FROM_POSITIVE, FROM_NEGATIVE, EITHER)


@dataclass(frozen=True)
class GuardedImpact:
    """One connected component of the impact surface and its impact map.

    The simulator fires when ``guard`` changes sign in the ``approach`` direction
    and ``admissible`` holds at the crossing. ``constraints`` are extra equations
    (each must vanish) that cut the exact surface used for certification but are
    ignored by the simulator; ``project`` optionally maps a state onto the exact
    surface in closed form.
    """

    component_id: int
    guard: Observable
    impact: Callable[[PhaseState], PhaseState]
    admissible: Callable[[PhaseState], bool] = lambda x: True
    approach: str = EITHER
    constraints: tuple = ()
    project: Optional[Callable[[PhaseState], PhaseState]] = None
    label: str = ""

    def __post_init__(self):
        if self.approach not in APPROACHES:
            raise ValueError(f"approach must be one of {APPROACHES}, got {self.approach!r}")

    def on_guard(self, x: PhaseState, tol: float = TOL_GUARD) -> bool:
        return abs(self.guard(x)) <= tol and bool(self.admissible(x))

    def on_surface(self, x: PhaseState, tol: float = TOL_GUARD) -> bool:
        """Membership in the exact surface: guard, admissibility and constraints."""
        return self.on_guard(x, tol) and all(abs(c(x)) <= tol for c in self.constraints)

    def apply(self, x: PhaseState, tol: float = TOL_GUARD) -> PhaseState:
        """Impact map with the runtime check that the image leaves the surface."""
        out = self.impact(x)
        if self.on_guard(out, tol):
            raise ImpactSurfaceError(
                f"component {self.component_id}: post-impact state z={out.z} is again on the surface"
            )
        return out


@dataclass(frozen=True)
class HybridSystem:
    """Hamiltonian flow on R^2n (with periodic flags) plus impact components."""

    n: int
    hamiltonian: Observable
    components: tuple
    parameters: dict = field(default_factory=dict)
    angular: tuple = ()
    separable: bool = False
    q_names: tuple = ()
    p_names: tuple = ()
    name: str = ""

    def __post_init__(self):
        ids = [c.component_id for c in self.components]
        if len(set(ids)) != len(ids):
            raise ValueError(f"component ids must be unique, got {ids}")
        if not self.angular:
            object.__setattr__(self, "angular", (False,) * self.n)
        if not self.q_names:
            object.__setattr__(self, "q_names", tuple(f"q{i + 1}" for i in range(self.n)))
        if not self.p_names:
            object.__setattr__(self, "p_names", tuple(f"p{i + 1}" for i in range(self.n)))

    def state(self, q, p) -> PhaseState:
        return make_state(q, p, self.angular)

    def component(self, component_id: int) -> GuardedImpact:
        for c in self.components:
            if c.component_id == component_id:
                return c
        raise KeyError(f"no impact component with id {component_id}")

    @property
    def coordinate_names(self) -> tuple:
        return tuple(self.q_names) + tuple(self.p_names)


@dataclass(frozen=True)
class ImpactEvent:
    t: float
    component_id: int
    state_pre: PhaseState
    state_post: PhaseState


@dataclass
class Arc:
    """One smooth piece of a hybrid trajectory: times ``t`` and rows ``z`` = (q, p)."""

    t: np.ndarray
    z: np.ndarray
    angular: tuple

    def state(self, i: int) -> PhaseState:
        return state_from_z(self.z[i], self.angular)

    def __len__(self):
        return len(self.t)


TIME_LIMIT = "time_limit"
ZENO_GUARD = "zeno_guard"
ERROR = "error"


@dataclass
class HybridTrajectory:
    """Smooth arcs separated by impact events.

    Arc k ends at ``events[k].state_pre`` and arc k+1 starts at ``events[k].state_post``;
    the value of the trajectory at an event time is the post-impact state.
    """

    arcs: list
    events: list
    termination: str
    message: str = ""

    def final_state(self) -> PhaseState:
        return self.arcs[-1].state(-1)

    def times(self) -> np.ndarray:
        return np.concatenate([a.t for a in self.arcs])
