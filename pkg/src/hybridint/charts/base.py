from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..core import PhaseState, state_from_z


@dataclass(frozen=True)
class ActionAngleChart:
    """Invertible change of variables (q, p) <-> (phi, s) near regular level sets.

    ``forward`` returns (phi, s) as two n-vectors, ``backward`` inverts it.
    ``periodic_angles[i]`` says whether phi[i] is an angle mod 2pi or a line
    coordinate. ``frequencies(s)`` gives d phi / dt along the smooth flow.
    """

    name: str
    n: int
    forward: Callable[[PhaseState], tuple]
    backward: Callable[[np.ndarray, np.ndarray], PhaseState]
    domain: Callable[[PhaseState], bool]
    periodic_angles: tuple
    frequencies: Callable[[np.ndarray], np.ndarray]
    angular: tuple
    angle_names: tuple = ()
    action_names: tuple = ()

    def as_map(self) -> Callable[[np.ndarray], np.ndarray]:
        """The chart as a flat map z = (q, p) -> (phi, s), for Jacobian checks."""

        def T(z):
            phi, s = self.forward(state_from_z(z, self.angular))
            return np.concatenate([phi, s])

        return T

    @property
    def periodic_out(self) -> tuple:
        return tuple(self.periodic_angles) + (False,) * self.n


def conjugate_impact(chart: ActionAngleChart, impact: Callable[[PhaseState], PhaseState], phi, s) -> tuple:
    """The impact map written in chart coordinates: forward . impact . backward."""
    x = chart.backward(np.asarray(phi, dtype=float), np.asarray(s, dtype=float))
    return chart.forward(impact(x))
