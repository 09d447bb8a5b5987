from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from ..core import HybridSystem
from ..symplectic import IntegralSet


@dataclass(frozen=True)
class Model:
    """A built-in hybrid system bundled with its integrals and (optional) chart.

    ``box`` is the (low, high) pair of 2n-vectors used for uniform sampling;
    ``walls`` maps component ids to the contact height where that applies.
    """

    name: str
    params: Any
    system: HybridSystem
    integrals: IntegralSet
    chart: Optional[Any]
    box: tuple
    walls: dict = field(default_factory=dict)

    def require_chart(self):
        if self.chart is None:
            raise ValueError(
                f"no closed-form action-angle chart for model {self.name!r} with parameters {self.params}"
            )
        return self.chart

    def sample_box(self, rng: np.random.Generator, size: int) -> np.ndarray:
        lo, hi = (np.asarray(b, dtype=float) for b in self.box)
        return rng.uniform(lo, hi, size=(size, lo.shape[0]))
