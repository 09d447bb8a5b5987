"""Impact table for the pendulum hitting the floor: action and angle before and after each impact."""

import argparse
import math
from dataclasses import dataclass

from hybridint.charts import pendulum_forward
from hybridint.flow import IntegratorConfig, simulate
from hybridint.models import PendulumParams, build_pendulum


@dataclass(frozen=True)
class Experiment:
    kappa: float = 0.75
    e: float = 1.0
    t_max: float = 50.0
    h: float = 1e-3


def run(exp: Experiment):
    model = build_pendulum(PendulumParams(e=exp.e))
    x0 = model.system.state([0.0], [2.0 * math.sqrt(exp.kappa)])
    traj = simulate(model.system, x0, IntegratorConfig(h=exp.h, t_max=exp.t_max))
    print(f"termination={traj.termination} impacts={len(traj.events)}")
    print(f"{'t':>12} {'theta':>8} {'J-':>14} {'J+':>14} {'zeta-':>10} {'zeta+':>10}")
    for ev in traj.events:
        try:
            _, z0, j0 = pendulum_forward(ev.state_pre)
            _, z1, j1 = pendulum_forward(ev.state_post)
        except ValueError as err:
            print(f"{ev.t:12.6f} outside the libration chart: {err}")
            continue
        print(f"{ev.t:12.6f} {ev.state_pre.q[0]:8.5f} {j0:14.10f} {j1:14.10f} {z0:10.6f} {z1:10.6f}")
    return traj


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kappa", type=float, default=Experiment.kappa)
    ap.add_argument("--e", type=float, default=Experiment.e)
    ap.add_argument("--t-max", type=float, default=Experiment.t_max)
    ap.add_argument("--h", type=float, default=Experiment.h)
    args = ap.parse_args()
    run(Experiment(args.kappa, args.e, args.t_max, args.h))
