"""Canonical symplectic calculus on R^2n with coordinates ordered (q, p).

Gradients fall back to 4th-order central differences when an observable has
no analytic gradient. Brackets follow {f, g} = sum_i df/dq_i dg/dp_i - df/dp_i dg/dq_i.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .core import Observable, PhaseState, state_from_z, wrap_symmetric

FD_STEP_SCALE = np.finfo(float).eps ** 0.2
TOL_SV = 1e-8


@dataclass(frozen=True)
class IntegralSet:
    """The map F = (f_1, ..., f_n) whose level sets are certified."""

    integrals: tuple

    def __post_init__(self):
        object.__setattr__(self, "integrals", tuple(self.integrals))

    def __len__(self):
        return len(self.integrals)

    def __iter__(self):
        return iter(self.integrals)

    def __getitem__(self, i):
        return self.integrals[i]

    @property
    def names(self):
        return [f.name for f in self.integrals]

    def values(self, x: PhaseState) -> np.ndarray:
        """The level label Lambda = F(x)."""
        return np.array([f(x) for f in self.integrals])

    def jacobian(self, x: PhaseState, h=None) -> np.ndarray:
        return np.vstack([gradient(f, x, h) for f in self.integrals])


@dataclass
class CheckReport:
    """Outcome of one numerical check; ``value`` is the worst residual seen."""

    name: str
    status: str
    value: float
    tol: float
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "value": float(self.value),
            "tol": float(self.tol),
            "details": self.details,
        }


def _verdict(value, tol):
    return "pass" if value < tol else "fail"


def fd_steps(z: np.ndarray, h=None) -> np.ndarray:
    if h is None:
        return FD_STEP_SCALE * np.maximum(1.0, np.abs(z))
    return np.broadcast_to(np.asarray(h, dtype=float), z.shape).copy()


def _fd_gradient(f: Observable, x: PhaseState, h=None) -> np.ndarray:
    z = x.z
    steps = fd_steps(z, h)
    out = np.empty_like(z)
    for i in range(z.shape[0]):
        vals = []
        for k in (-2, -1, 1, 2):
            zk = z.copy()
            zk[i] += k * steps[i]
            vals.append(f(state_from_z(zk, x.angular)))
        out[i] = (vals[0] - 8.0 * vals[1] + 8.0 * vals[2] - vals[3]) / (12.0 * steps[i])
    return out


def gradient(f: Observable, x: PhaseState, h=None) -> np.ndarray:
    """d f at x as a length-2n vector; finite differences unless f.grad is given.

    Angular coordinates are perturbed through :func:`state_from_z`, which wraps
    them, so periodic observables are differenced across the seam correctly.
    """
    f.check_domain(x)
    if f.grad is not None:
        return np.asarray(f.grad(x), dtype=float)
    return _fd_gradient(f, x, h)


def hamiltonian_vector_field(H: Observable, x: PhaseState, h=None) -> np.ndarray:
    """X_H(x) = (dH/dp, -dH/dq)."""
    g = gradient(H, x, h)
    n = x.n
    return np.concatenate([g[n:], -g[:n]])


def bracket_of_gradients(df: np.ndarray, dg: np.ndarray) -> float:
    n = df.shape[0] // 2
    return float(df[:n] @ dg[n:] - df[n:] @ dg[:n])


def poisson_bracket(f: Observable, g: Observable, x: PhaseState, h=None) -> float:
    return bracket_of_gradients(gradient(f, x, h), gradient(g, x, h))


def canonical_matrix(n: int) -> np.ndarray:
    """The constant matrix of omega = dq ^ dp in (q, p) coordinates."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def check_involution(F: IntegralSet, samples: Sequence[PhaseState], tol=1e-10) -> CheckReport:
    if not samples:
        raise ValueError("check_involution needs at least one sample")
    worst = 0.0
    worst_pair = None
    for x in samples:
        grads = [gradient(f, x) for f in F]
        for i in range(len(grads)):
            for j in range(i + 1, len(grads)):
                b = abs(bracket_of_gradients(grads[i], grads[j]))
                if worst_pair is None or b > worst:
                    worst, worst_pair = b, (F[i].name, F[j].name)
    return CheckReport(
        "involution",
        _verdict(worst, tol),
        worst,
        tol,
        {"samples": len(samples), "worst_pair": list(worst_pair) if worst_pair else None},
    )


def singular_values(jac: np.ndarray) -> np.ndarray:
    return np.linalg.svd(jac, compute_uv=False)


def numerical_rank(jac: np.ndarray, tol_sv=TOL_SV) -> int:
    s = singular_values(jac)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol_sv * s[0]))


def rank_of_dF(F: IntegralSet, x: PhaseState, tol_sv=TOL_SV) -> int:
    """Numerical rank of the n x 2n Jacobian of F at x (relative singular-value cut)."""
    return numerical_rank(F.jacobian(x), tol_sv)


def null_space(jac: np.ndarray, tol_sv=TOL_SV) -> np.ndarray:
    """Orthonormal basis (as columns) of ker jac, from the SVD."""
    _, s, vt = np.linalg.svd(jac)
    rank = int(np.sum(s > tol_sv * s[0])) if s.size and s[0] > 0 else 0
    return vt[rank:].T


def check_independence(F: IntegralSet, samples: Sequence[PhaseState], threshold=0.99, tol_sv=TOL_SV) -> CheckReport:
    """Fraction of samples where rank dF = n; passes when it reaches ``threshold``."""
    n = len(F)
    full = [rank_of_dF(F, x, tol_sv) == n for x in samples]
    frac = float(np.mean(full)) if full else 0.0
    return CheckReport(
        "independence",
        "pass" if frac >= threshold else "fail",
        1.0 - frac,
        1.0 - threshold,
        {"samples": len(full), "full_rank_fraction": frac, "threshold": threshold},
    )


def check_lagrangian_level_set(F: IntegralSet, x: PhaseState, tol=1e-8, tol_sv=TOL_SV) -> CheckReport:
    """max |omega(v_a, v_b)| over an orthonormal basis of the tangent space of F^{-1}(F(x))."""
    jac = F.jacobian(x)
    n = len(F)
    if numerical_rank(jac, tol_sv) != n:
        raise ValueError(f"dF is rank deficient at z={x.z}; the level set is not regular there")
    basis = null_space(jac, tol_sv)
    omega = canonical_matrix(x.n)
    gram = basis.T @ omega @ basis
    worst = float(np.max(np.abs(gram))) if gram.size else 0.0
    return CheckReport("lagrangian", _verdict(worst, tol), worst, tol, {"dim": int(basis.shape[1])})


def fd_jacobian(
    T: Callable[[np.ndarray], np.ndarray],
    z,
    periodic_out: Optional[Sequence[bool]] = None,
    h=None,
) -> np.ndarray:
    """4th-order central-difference Jacobian of a map R^k -> R^l.

    Output components flagged in ``periodic_out`` are differenced modulo 2pi.
    """
    z = np.asarray(z, dtype=float)
    center = np.asarray(T(z), dtype=float)
    mask = np.zeros(center.shape, dtype=bool) if periodic_out is None else np.asarray(periodic_out, bool)
    steps = fd_steps(z, h)
    jac = np.empty((center.shape[0], z.shape[0]))
    for i in range(z.shape[0]):
        vals = []
        for k in (-2, -1, 1, 2):
            zk = z.copy()
            zk[i] += k * steps[i]
            d = np.asarray(T(zk), dtype=float) - center
            d[mask] = wrap_symmetric(d[mask])
            vals.append(d)
        jac[:, i] = (vals[0] - 8.0 * vals[1] + 8.0 * vals[2] - vals[3]) / (12.0 * steps[i])
    return jac


def symplectic_defect(jac: np.ndarray) -> float:
    """max |J^T Omega J - Omega|."""
    n = jac.shape[0] // 2
    omega = canonical_matrix(n)
    return float(np.max(np.abs(jac.T @ omega @ jac - omega)))


def check_symplectic_jacobian(
    T: Callable[[np.ndarray], np.ndarray],
    x,
    tol=1e-6,
    periodic_out: Optional[Sequence[bool]] = None,
    h=None,
) -> CheckReport:
    """Darboux test for a coordinate change T at x, with J from finite differences."""
    z = x.z if isinstance(x, PhaseState) else np.asarray(x, dtype=float)
    jac = fd_jacobian(T, z, periodic_out, h)
    defect = symplectic_defect(jac)
    return CheckReport("symplectic_jacobian", _verdict(defect, tol), defect, tol)
