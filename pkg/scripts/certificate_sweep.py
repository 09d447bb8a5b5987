"""Certify both models over a grid of restitution coefficients and gyration radii."""

import argparse
from dataclasses import dataclass

from hybridint.models import DiskParams, PendulumParams, build_disk, build_pendulum
from hybridint.verify import SamplingConfig, certify_model


@dataclass(frozen=True)
class Sweep:
    restitutions: tuple = (0.0, 0.25, 0.5, 0.75, 1.0)
    gyration_radii: tuple = (1.0, 0.5, 2.0)
    seed: int = 0


def main(sweep: Sweep):
    sampling = SamplingConfig(seed=sweep.seed)
    for k in sweep.gyration_radii:
        for e in sweep.restitutions:
            cert = certify_model(build_disk(DiskParams(k=k, e=e)), sampling)
            kinds = ", ".join(f"{v.name}={v.kind}" for v in cert.integrals)
            print(f"disk     k={k:<4} e={e:<5} {'PASS' if cert.passed else 'FAIL'}  {kinds}")
    for e in sweep.restitutions:
        cert = certify_model(build_pendulum(PendulumParams(e=e)), sampling)
        print(f"pendulum        e={e:<5} {'PASS' if cert.passed else 'FAIL'}  H={cert.integrals[0].kind}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    main(Sweep(seed=ap.parse_args().seed))
