"""Simulation and numerical integrability certificates for hybrid Hamiltonian systems."""

from .core import GuardedImpact, HybridSystem, Observable, PhaseState, make_state
from .flow import IntegratorConfig, simulate
from .models import build_model
from .symplectic import IntegralSet
from .verify import SamplingConfig, certify, certify_model

__all__ = [
    "GuardedImpact",
    "HybridSystem",
    "IntegralSet",
    "IntegratorConfig",
    "Observable",
    "PhaseState",
    "SamplingConfig",
    "build_model",
    "certify",
    "certify_model",
    "make_state",
    "simulate",
]
