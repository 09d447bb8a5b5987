"""Simulated libration period of the free pendulum against 4 K(kappa), for both integrators."""

import argparse
import math
from dataclasses import dataclass

import numpy as np

from hybridint.core import GuardedImpact, Observable, make_state
from hybridint.elliptic import complete_K
from hybridint.flow import RK4, STORMER_VERLET, IntegratorConfig, locate_event, step
from hybridint.models import PendulumParams, build_pendulum


@dataclass(frozen=True)
class Experiment:
    kappas: tuple = (0.1, 0.4, 0.8, 0.95)
    h: float = 1e-3


def measured_period(kappa, h, scheme):
    system = build_pendulum(PendulumParams(), wall=False).system
    marker = GuardedImpact(
        0,
        Observable("sin", lambda x: math.sin(x.q[0]), lambda x: np.array([math.cos(x.q[0]), 0.0])),
        impact=lambda x: x,
        admissible=lambda x: x.p[0] > 0,
    )
    cfg = IntegratorConfig(scheme=scheme, h=h)
    x, t, hits = make_state([0.0], [2.0 * math.sqrt(kappa)], (True,)), 0.0, []
    while len(hits) < 2:
        x_b = step(system, x, h, scheme)
        found = locate_event(system, x, t, x_b, t + h, marker, cfg)
        if found is not None:
            hits.append(found[0])
        x, t = x_b, t + h
    return hits[1] - hits[0]


def main(exp: Experiment):
    print(f"{'kappa':>6} {'4K':>14} {'rk4 rel err':>12} {'sv rel err':>12}")
    for k in exp.kappas:
        ref = 4.0 * complete_K(k)
        errs = [abs(measured_period(k, exp.h, s) - ref) / ref for s in (RK4, STORMER_VERLET)]
        print(f"{k:6.3f} {ref:14.10f} {errs[0]:12.2e} {errs[1]:12.2e}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--h", type=float, default=Experiment.h)
    ap.add_argument("--kappa", type=float, action="append")
    args = ap.parse_args()
    main(Experiment(tuple(args.kappa) if args.kappa else Experiment.kappas, args.h))
