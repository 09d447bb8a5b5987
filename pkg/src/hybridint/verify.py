"""Numerical certificates of complete integrability for hybrid Hamiltonian systems.

A function f is a *hybrid constant* if {H, f} = 0 and f(Delta(x)) = f(x) on the
impact surface; it is a *generalized hybrid constant* if {H, f} = 0 and, on each
surface component, f(Delta(x)) is a function of f(x) alone. The second property
is tested by binning surface samples on their pre-impact value: the sampler pairs
each point with a distinct partner on the same level of f, so every bin can
expose a violation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import DomainError, GuardedImpact, HybridSystem, Observable, PhaseState, TOL_GUARD, state_from_z
from .symplectic import (
    CheckReport,
    IntegralSet,
    check_independence,
    check_involution,
    check_lagrangian_level_set,
    gradient,
    null_space,
    numerical_rank,
    poisson_bracket,
)

HYBRID = "hybrid_constant"
GENERALIZED = "generalized_hybrid_constant"
FAILS = "fails"

SCOPE_NOTES = (
    "All verdicts are empirical: brackets, ranks and impact relations are checked on the sampled states only.",
    "The 'for each value a there is a value b' condition is checked only on the sampled pre-impact values.",
    "Compactness of level sets and their torus topology are not checked.",
)


@dataclass(frozen=True)
class SamplingConfig:
    seed: int = 0
    n_states: int = 100
    n_rank: int = 1000
    n_surface: int = 100
    n_levels: int = 3
    n_level_samples: int = 6
    tol: float = 1e-9
    tol_involution: float = 1e-10
    tol_lagrangian: float = 1e-8
    rank_threshold: float = 0.99
    tol_sv: float = 1e-8

    def __post_init__(self):
        for name in ("tol", "tol_involution", "tol_lagrangian", "tol_sv"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        for name in ("n_states", "n_rank", "n_surface", "n_levels", "n_level_samples"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")


# ---------------------------------------------------------------- sampling


def uniform_states(box, rng: np.random.Generator, n: int, angular) -> list:
    lo, hi = (np.asarray(b, dtype=float) for b in box)
    return [state_from_z(z, angular) for z in rng.uniform(lo, hi, size=(n, lo.shape[0]))]


def project_onto(
    x: PhaseState,
    equations: Sequence[Observable],
    targets: Sequence[float],
    max_iter: int = 200,
    tol: float = 1e-14,
) -> Optional[PhaseState]:
    """Gauss-Newton (minimum-norm steps) onto {eq_i(x) = target_i}; None if it stalls."""
    targets = np.asarray(targets, dtype=float)
    scale = np.maximum(1.0, np.abs(targets))
    for _ in range(max_iter):
        try:
            r = np.array([eq(x) for eq in equations]) - targets
        except DomainError:
            return None
        if np.all(np.abs(r) <= tol * scale):
            return x
        jac = np.vstack([gradient(eq, x) for eq in equations])
        dz = np.linalg.lstsq(jac, -r, rcond=None)[0]
        if not np.all(np.isfinite(dz)):
            return None
        x = state_from_z(x.z + dz, x.angular)
    return None


def _surface_equations(comp: GuardedImpact) -> list:
    return [comp.guard, *comp.constraints]


def sample_surface(
    system: HybridSystem,
    comp: GuardedImpact,
    rng: np.random.Generator,
    box,
    n: int,
    max_draws: Optional[int] = None,
) -> list:
    """n points on the exact surface of ``comp`` (guard, constraints, admissibility).

    Uses the component's closed-form projection when it has one and Gauss-Newton
    on the surface equations otherwise.
    """
    eqs = _surface_equations(comp)
    out = []
    draws = 0
    max_draws = max_draws or 20 * n
    while len(out) < n and draws < max_draws:
        draws += 1
        x = uniform_states(box, rng, 1, system.angular)[0]
        x = comp.project(x) if comp.project is not None else project_onto(x, eqs, np.zeros(len(eqs)))
        if x is not None and comp.on_surface(x):
            out.append(x)
    return out


def _partner(
    system: HybridSystem,
    comp: GuardedImpact,
    equations: list,
    targets: np.ndarray,
    x: PhaseState,
    rng: np.random.Generator,
    box,
    attempts: int = 8,
) -> Optional[PhaseState]:
    """A distinct point of the same constraint set {equations = targets} as x.

    First tries to slide along the null space of the stacked Jacobian, then
    random restarts from the box, each followed by Gauss-Newton.
    """
    jac = np.vstack([gradient(eq, x) for eq in equations])
    basis = null_space(jac)
    for k in range(attempts):
        if basis.shape[1] and k < attempts // 2:
            direction = basis @ rng.standard_normal(basis.shape[1])
            direction /= np.linalg.norm(direction)
            start = state_from_z(x.z + rng.uniform(0.05, 0.5) * direction, x.angular)
        else:
            start = uniform_states(box, rng, 1, system.angular)[0]
        y = project_onto(start, equations, targets)
        if y is None or not comp.on_surface(y):
            continue
        if np.linalg.norm(y.z - x.z) > 1e-6:
            return y
    return None


def surface_samples_with_collisions(
    system: HybridSystem,
    comp: GuardedImpact,
    f: Observable,
    rng: np.random.Generator,
    box,
    n: int,
) -> list:
    """Surface samples in which each base point is followed by a distinct partner with equal f."""
    out = []
    eqs = _surface_equations(comp)
    for x in sample_surface(system, comp, rng, box, n):
        out.append(x)
        try:
            level = f(x)
        except DomainError:
            continue
        y = _partner(system, comp, eqs + [f], np.array([0.0] * len(eqs) + [level]), x, rng, box)
        if y is not None:
            out.append(y)
    return out


def sample_level_surface(
    system: HybridSystem,
    F: IntegralSet,
    comp: GuardedImpact,
    level,
    rng: np.random.Generator,
    box,
    n: int,
    base: Optional[PhaseState] = None,
) -> list:
    """Points of M_level intersected with the surface of ``comp``."""
    eqs = _surface_equations(comp) + list(F)
    targets = np.concatenate([np.zeros(len(eqs) - len(F)), np.asarray(level, dtype=float)])
    out = []
    seed_point = base
    for _ in range(4 * n):
        if len(out) >= n:
            break
        if seed_point is None:
            start = uniform_states(box, rng, 1, system.angular)[0]
            y = project_onto(start, eqs, targets)
            if y is None or not comp.on_surface(y):
                continue
            seed_point = y
            out.append(y)
            continue
        y = _partner(system, comp, eqs, targets, seed_point, rng, box)
        if y is not None:
            out.append(y)
    return out


# ---------------------------------------------------------------- checks


def check_flow_invariance(system: HybridSystem, f: Observable, samples: Sequence[PhaseState], tol=1e-9) -> CheckReport:
    """X_H f = {f, H} = 0 on the samples."""
    if not samples:
        raise ValueError("check_flow_invariance needs at least one sample")
    worst = max(abs(poisson_bracket(f, system.hamiltonian, x)) for x in samples)
    return CheckReport(f"flow_invariance[{f.name}]", "pass" if worst < tol else "fail", worst, tol, {"samples": len(samples)})


def _component_of(system: HybridSystem, x: PhaseState, component=None) -> GuardedImpact:
    comps = [system.component(component)] if component is not None else list(system.components)
    for comp in comps:
        if comp.on_surface(x, TOL_GUARD):
            return comp
    raise ValueError(f"sample z={x.z} is not on the impact surface")


def check_hybrid_constant(
    system: HybridSystem,
    f: Observable,
    surface_samples: Sequence[PhaseState],
    tol=1e-9,
    component: Optional[int] = None,
) -> CheckReport:
    """|f(Delta(x)) - f(x)| < tol on surface samples."""
    if not surface_samples:
        raise ValueError("check_hybrid_constant needs at least one surface sample")
    worst = 0.0
    for x in surface_samples:
        comp = _component_of(system, x, component)
        worst = max(worst, abs(f(comp.impact(x)) - f(x)))
    return CheckReport(f"hybrid_constant[{f.name}]", "pass" if worst < tol else "fail", worst, tol, {"samples": len(surface_samples)})


def _bins(pre: np.ndarray, width: float) -> list:
    order = np.argsort(pre, kind="stable")
    groups, current = [], [order[0]]
    for i in order[1:]:
        if pre[i] - pre[current[0]] <= width:
            current.append(i)
        else:
            groups.append(current)
            current = [i]
    groups.append(current)
    return groups


def check_generalized_hybrid_constant(
    system: HybridSystem,
    f: Observable,
    component: int,
    surface_samples: Sequence[PhaseState],
    tol=1e-9,
    flow_samples: Optional[Sequence[PhaseState]] = None,
) -> CheckReport:
    """Flow invariance plus: post-impact f is a function of pre-impact f on one component.

    Samples are grouped into bins of width ``tol`` by f(x-); the discrete test passes
    when the spread of f(Delta(x-)) in every bin holding two or more samples is below
    ``tol``. With no such bin the verdict is ``inconclusive``. ``details['relation']``
    lists (pre, post) per bin.
    """
    comp = system.component(component)
    if not surface_samples:
        raise ValueError("check_generalized_hybrid_constant needs surface samples")
    for x in surface_samples:
        if not comp.on_surface(x, TOL_GUARD):
            raise ValueError(f"sample z={x.z} is not on component {component}")
    flow = check_flow_invariance(system, f, flow_samples or surface_samples, tol)
    pre = np.array([f(x) for x in surface_samples])
    post = np.array([f(comp.impact(x)) for x in surface_samples])
    groups = _bins(pre, tol)
    tested = [g for g in groups if len(g) >= 2]
    spread = max((float(np.ptp(post[g])) for g in tested), default=0.0)
    if not tested:
        discrete = "inconclusive"
    else:
        discrete = "pass" if spread < tol else "fail"
    relation = [[float(np.mean(pre[g])), float(np.mean(post[g]))] for g in groups]
    if discrete == "inconclusive":
        status = "inconclusive"
    else:
        status = "pass" if discrete == "pass" and flow.passed else "fail"
    return CheckReport(
        f"generalized_hybrid_constant[{f.name}@{component}]",
        status,
        spread,
        tol,
        {
            "discrete": discrete,
            "flow_invariance": flow.status,
            "flow_residual": float(flow.value),
            "bins_tested": len(tested),
            "samples": len(surface_samples),
            "relation": relation,
        },
    )


def relation_function(report: CheckReport):
    """Piecewise-linear interpolant (with linear end extrapolation) of a fitted relation table."""
    table = np.array(report.details["relation"], dtype=float)
    a, b = table[:, 0], table[:, 1]
    if a.size == 1:
        return lambda v: float(b[0])

    def rel(v):
        if v < a[0]:
            return float(b[0] + (v - a[0]) * (b[1] - b[0]) / (a[1] - a[0]))
        if v > a[-1]:
            return float(b[-1] + (v - a[-1]) * (b[-1] - b[-2]) / (a[-1] - a[-2]))
        return float(np.interp(v, a, b))

    return rel


def check_level_set_transport(
    system: HybridSystem,
    F: IntegralSet,
    component: int,
    level,
    surface_samples: Sequence[PhaseState],
    tol=1e-9,
) -> CheckReport:
    """Delta maps M_level meet C into a single level set; ``details['image_level']`` is Lambda'."""
    comp = system.component(component)
    level = np.asarray(level, dtype=float)
    name = f"level_set_transport@{component}"
    if len(surface_samples) < 2:
        return CheckReport(name, "inconclusive", 0.0, tol, {"samples": len(surface_samples), "level": level.tolist()})
    images = []
    for x in surface_samples:
        if not comp.on_surface(x, TOL_GUARD):
            raise ValueError(f"sample z={x.z} is not on component {component}")
        if np.max(np.abs(F.values(x) - level)) > TOL_GUARD * max(1.0, float(np.max(np.abs(level)))):
            raise ValueError(f"sample z={x.z} is not on the level set {level}")
        images.append(F.values(comp.impact(x)))
    images = np.array(images)
    image_level = images.mean(axis=0)
    spread = float(np.max(np.abs(images - image_level)))
    return CheckReport(
        name,
        "pass" if spread < tol else "fail",
        spread,
        tol,
        {"samples": len(surface_samples), "level": level.tolist(), "image_level": image_level.tolist()},
    )


def check_trajectory_relations(system: HybridSystem, F: IntegralSet, trajectory, relations: dict, tol=1e-6) -> CheckReport:
    """Per-impact values along a simulated trajectory against fitted relations.

    ``relations[(integral_name, component_id)]`` maps a pre-impact value to the
    predicted post-impact value. Impacts off the exact surface (e.g. the disk's
    rolling condition fails) are counted as out of hypothesis, not failures.
    """
    worst, checked, outside = 0.0, 0, 0
    for ev in trajectory.events:
        comp = system.component(ev.component_id)
        if not all(abs(c(ev.state_pre)) <= 1e-8 for c in comp.constraints):
            outside += 1
            continue
        checked += 1
        for f in F:
            rel = relations.get((f.name, ev.component_id))
            if rel is not None:
                worst = max(worst, abs(f(ev.state_post) - rel(f(ev.state_pre))))
    status = "pass" if checked and worst < tol else ("inconclusive" if not checked else "fail")
    return CheckReport("trajectory_relations", status, worst, tol, {"checked": checked, "out_of_hypothesis": outside})


# ---------------------------------------------------------------- certificate


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)) and not isinstance(obj, bool):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    return obj


@dataclass
class IntegralVerdict:
    name: str
    kind: str
    reason: str = ""
    flow: Optional[CheckReport] = None
    components: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.kind in (HYBRID, GENERALIZED)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "reason": self.reason,
            "flow": self.flow.to_dict() if self.flow else None,
            "components": {
                str(cid): {k: r.to_dict() for k, r in reports.items()} for cid, reports in sorted(self.components.items())
            },
        }


@dataclass
class Certificate:
    system: str
    parameters: dict
    sampling: dict
    integrals: list
    involution: CheckReport
    independence: CheckReport
    lagrangian: CheckReport
    transport: list

    @property
    def passed(self) -> bool:
        return (
            all(v.passed for v in self.integrals)
            and self.involution.passed
            and self.independence.passed
            and self.lagrangian.passed
            and all(r.passed for r in self.transport)
        )

    def to_dict(self) -> dict:
        return _plain(
            {
                "system": self.system,
                "parameters": self.parameters,
                "sampling": self.sampling,
                "overall": "pass" if self.passed else "fail",
                "integrals": [v.to_dict() for v in self.integrals],
                "involution": self.involution.to_dict(),
                "independence": self.independence.to_dict(),
                "lagrangian": self.lagrangian.to_dict(),
                "transport": [r.to_dict() for r in self.transport],
                "scope": list(SCOPE_NOTES),
            }
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        return render_text(self.to_dict())


def render_text(cert: dict) -> str:
    """Human-readable report from a certificate dictionary (as produced by to_dict)."""

    def line(label, rep):
        return f"  {label:<34} {rep['status']:<12} worst={rep['value']:.3e} tol={rep['tol']:.1e}"

    params = ", ".join(f"{k}={v:g}" for k, v in sorted(cert["parameters"].items()))
    out = [
        f"Integrability certificate: {cert['system']} ({params})",
        f"Overall verdict: {cert['overall'].upper()}",
        f"Sampling: seed={cert['sampling']['seed']}",
        "",
        "Structure",
        line("involution", cert["involution"]),
        line("independence (1 - full-rank frac)", cert["independence"]),
        line("lagrangian level sets", cert["lagrangian"]),
        "",
        "Integrals",
    ]
    for v in cert["integrals"]:
        verdict = v["kind"] + (f" ({v['reason']})" if v["reason"] else "")
        out.append(f"  {v['name']}: {verdict}")
        if v["flow"]:
            out.append("  " + line("flow invariance", v["flow"]))
        for cid, reports in v["components"].items():
            for key in ("hybrid", "generalized"):
                if key in reports:
                    out.append("  " + line(f"{key} @ component {cid}", reports[key]))
    out.append("")
    out.append("Level-set transport")
    for rep in cert["transport"]:
        d = rep["details"]
        lam = ", ".join(f"{v:.10g}" for v in d["level"])
        img = ", ".join(f"{v:.10g}" for v in d.get("image_level", []))
        out.append(line(rep["name"], rep) + f"  level=({lam}) -> ({img})")
    out.append("")
    out.append("Scope")
    out.extend(f"  - {s}" for s in cert["scope"])
    return "\n".join(out) + "\n"


def _valid(F: IntegralSet, samples):
    good = []
    for x in samples:
        try:
            F.values(x)
        except DomainError:
            continue
        good.append(x)
    return good


def certify(
    system: HybridSystem,
    F: IntegralSet,
    box,
    sampling: SamplingConfig = SamplingConfig(),
) -> Certificate:
    """Run every structural and impact check and assemble a certificate.

    Deterministic for a fixed ``sampling.seed``.
    """
    if len(F) != system.n:
        raise ValueError(f"need n = {system.n} integrals, got {len(F)}")
    rng = np.random.default_rng(sampling.seed)
    states = _valid(F, uniform_states(box, rng, sampling.n_states, system.angular))
    involution = check_involution(F, states, sampling.tol_involution)
    rank_states = _valid(F, uniform_states(box, rng, sampling.n_rank, system.angular))
    independence = check_independence(F, rank_states, sampling.rank_threshold, sampling.tol_sv)

    worst_lag, regular = 0.0, 0
    for x in states:
        if numerical_rank(F.jacobian(x), sampling.tol_sv) != len(F):
            continue
        regular += 1
        worst_lag = max(worst_lag, check_lagrangian_level_set(F, x, sampling.tol_lagrangian, sampling.tol_sv).value)
    lagrangian = CheckReport(
        "lagrangian",
        ("pass" if worst_lag < sampling.tol_lagrangian else "fail") if regular else "inconclusive",
        worst_lag,
        sampling.tol_lagrangian,
        {"regular_samples": regular},
    )

    verdicts = []
    for f in F:
        flow = check_flow_invariance(system, f, states, sampling.tol)
        verdict = IntegralVerdict(f.name, FAILS, flow=flow)
        kinds = set()
        for comp in system.components:
            samples = surface_samples_with_collisions(system, comp, f, rng, box, sampling.n_surface)
            if not samples:
                verdict.components[comp.component_id] = {}
                kinds.add("no_samples")
                continue
            hyb = check_hybrid_constant(system, f, samples, sampling.tol, comp.component_id)
            gen = check_generalized_hybrid_constant(system, f, comp.component_id, samples, sampling.tol, states)
            verdict.components[comp.component_id] = {"hybrid": hyb, "generalized": gen}
            if hyb.passed:
                kinds.add(HYBRID)
            elif gen.passed:
                kinds.add(GENERALIZED)
            else:
                kinds.add(gen.details["discrete"] if gen.details["discrete"] != "pass" else "fail")
        if not flow.passed:
            verdict.reason = "not conserved by the smooth flow"
        elif kinds <= {HYBRID}:
            verdict.kind = HYBRID
        elif kinds <= {HYBRID, GENERALIZED}:
            verdict.kind = GENERALIZED
        elif "no_samples" in kinds:
            verdict.reason = "no impact-surface samples found"
        elif "inconclusive" in kinds:
            verdict.reason = "no collision pairs on some component (inconclusive)"
        else:
            verdict.reason = "post-impact value not determined by the pre-impact value"
        verdicts.append(verdict)

    transport = []
    for comp in system.components:
        bases = sample_surface(system, comp, rng, box, sampling.n_levels)
        for base in bases:
            level = F.values(base)
            samples = [base] + sample_level_surface(
                system, F, comp, level, rng, box, sampling.n_level_samples - 1, base=base
            )
            transport.append(check_level_set_transport(system, F, comp.component_id, level, samples, sampling.tol))
        if not bases:
            transport.append(CheckReport(f"level_set_transport@{comp.component_id}", "inconclusive", 0.0, sampling.tol, {"level": []}))

    sampling_dict = {k: getattr(sampling, k) for k in sampling.__dataclass_fields__}
    return Certificate(
        system=system.name,
        parameters=dict(system.parameters),
        sampling=sampling_dict,
        integrals=verdicts,
        involution=involution,
        independence=independence,
        lagrangian=lagrangian,
        transport=transport,
    )


def certify_model(model, sampling: SamplingConfig = SamplingConfig()) -> Certificate:
    return certify(model.system, model.integrals, model.box, sampling)
