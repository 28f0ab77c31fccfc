"""Vector fields: forced Duffing, the Chen polynomial system, custom RHS."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DimensionMismatch

DUFFING_FORCED = "duffing_forced"
CHEN = "chen"
CUSTOM = "custom"

_PARAM_KEYS = {DUFFING_FORCED: {"delta", "gamma", "omega"}, CHEN: set()}


@dataclass(frozen=True)
class SystemSpec:
    """A vector field with its parameters.

    ``duffing_forced`` is the planar system x' = y,
    y' = x - x^3 - delta*y + gamma*cos(omega*t); time is the forcing
    phase. ``chen`` is the three-dimensional polynomial system
    x' = 35(y - x), y' = -7x + 28y - xz, z' = -3z + xy with all
    coefficients fixed by the kind. ``custom`` wraps a caller-supplied
    rhs(state, t) of a declared dimension (not serializable).
    """

    kind: str
    parameters: dict[str, float] = field(default_factory=dict)
    rhs: Optional[Callable] = None
    dimension: int = 0

    def __post_init__(self):
        if self.kind == CUSTOM:
            if self.rhs is None or self.dimension < 1:
                raise ValueError("custom systems need rhs and dimension")
            return
        if self.kind not in _PARAM_KEYS:
            raise ValueError(f"unknown system kind {self.kind!r}")
        keys = set(self.parameters)
        if keys != _PARAM_KEYS[self.kind]:
            raise ValueError(
                f"{self.kind} takes exactly parameters "
                f"{sorted(_PARAM_KEYS[self.kind])}, got {sorted(keys)}"
            )
        if self.kind == DUFFING_FORCED:
            if self.parameters["omega"] <= 0:
                raise ValueError("duffing_forced requires omega > 0")
            object.__setattr__(self, "dimension", 2)
        else:
            object.__setattr__(self, "dimension", 3)

    def to_json_dict(self) -> dict:
        if self.kind == CUSTOM:
            raise ValueError("custom systems are not serializable")
        return {"kind": self.kind, "parameters": dict(self.parameters)}


def duffing(delta: float, gamma: float, omega: float = 1.0) -> SystemSpec:
    return SystemSpec(
        DUFFING_FORCED,
        {"delta": float(delta), "gamma": float(gamma), "omega": float(omega)},
    )


def chen() -> SystemSpec:
    return SystemSpec(CHEN, {})


def custom(rhs: Callable, dimension: int) -> SystemSpec:
    return SystemSpec(CUSTOM, {}, rhs=rhs, dimension=dimension)


def vector_field(spec: SystemSpec, state, t: float = 0.0) -> np.ndarray:
    """Right-hand side at one state. Exact float64 evaluation.

    The Chen y-equation is computed in the factored form 28y - x(z + 7),
    which cancels exactly at the equilibria where y = x, z = 21.
    """
    s = np.asarray(state, dtype=np.float64)
    if s.shape != (spec.dimension,):
        raise DimensionMismatch(
            f"state shape {s.shape} does not match dimension {spec.dimension}"
        )
    if spec.kind == DUFFING_FORCED:
        x, y = s
        delta = spec.parameters["delta"]
        gamma = spec.parameters["gamma"]
        omega = spec.parameters["omega"]
        return np.array([y, x - x * x * x - delta * y + gamma * np.cos(omega * t)])
    if spec.kind == CHEN:
        x, y, z = s
        return np.array([35.0 * (y - x), 28.0 * y - x * (z + 7.0), x * y - 3.0 * z])
    return np.asarray(spec.rhs(s, t), dtype=np.float64)
