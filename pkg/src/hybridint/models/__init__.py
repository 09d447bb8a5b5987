"""Built-in hybrid Hamiltonian systems, selectable by name."""

from .base import Model
from .disk import DiskParams, build_disk
from .pendulum import PendulumParams, build_pendulum

PARAMS = {"disk": DiskParams, "pendulum": PendulumParams}
_BUILDERS = {"disk": build_disk, "pendulum": build_pendulum}
MODEL_NAMES = tuple(PARAMS)


def build_model(name: str, **params) -> Model:
    """Build a model by name; keyword arguments are its parameters (unknown ones raise)."""
    if name not in _BUILDERS:
        raise ValueError(f"unknown model {name!r}; choose from {MODEL_NAMES}")
    return _BUILDERS[name](PARAMS[name](**params))


__all__ = [
    "Model",
    "DiskParams",
    "PendulumParams",
    "build_disk",
    "build_pendulum",
    "build_model",
    "MODEL_NAMES",
    "PARAMS",
]
