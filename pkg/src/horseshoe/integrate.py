"""Deterministic fixed-step RK4 integration."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backends
from .errors import DimensionMismatch, Escaped
from .systems import CHEN, CUSTOM, DUFFING_FORCED, SystemSpec, vector_field

DUFFING_DEFAULT_STEP = 2.0 * math.pi / 10000.0
CHEN_DEFAULT_STEP = 1e-4


@dataclass(frozen=True)
class IntegratorConfig:
    step: float
    max_time: float = 1000.0
    escape_radius: float = 1000.0

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("step must be positive")
        if self.max_time <= 0 or self.step > self.max_time:
            raise ValueError("need 0 < step <= max_time")
        if self.escape_radius <= 0:
            raise ValueError("escape_radius must be positive")

    def to_json_dict(self) -> dict:
        return {
            "step": self.step,
            "max_time": self.max_time,
            "escape_radius": self.escape_radius,
        }


def default_config(kind: str) -> IntegratorConfig:
    step = CHEN_DEFAULT_STEP if kind == CHEN else DUFFING_DEFAULT_STEP
    return IntegratorConfig(step=step)


def build_grid(t0: float, t1: float, step: float):
    """Step-start times and sizes covering [t0, t1].

    Full steps of the configured size plus one shortened final step that
    lands exactly on t1 (a sub-ppb remainder is absorbed into the last
    full step instead of spawning a degenerate one).
    """
    total = t1 - t0
    n_full = int(math.floor(total / step))
    rem = total - n_full * step
    if rem <= step * 1e-9 and n_full > 0:
        starts = t0 + step * np.arange(n_full)
        h_arr = np.full(n_full, step)
        h_arr[-1] = t1 - starts[-1]
    else:
        starts = t0 + step * np.arange(n_full + 1)
        h_arr = np.full(n_full + 1, step)
        h_arr[-1] = t1 - starts[-1]
    return starts, h_arr


def duffing_forcing_tables(spec: SystemSpec, starts: np.ndarray, h_arr: np.ndarray):
    """gamma*cos(omega*t) at the three RK4 stage times of every step."""
    gamma = spec.parameters["gamma"]
    omega = spec.parameters["omega"]
    f0 = gamma * np.cos(omega * starts)
    fh = gamma * np.cos(omega * (starts + 0.5 * h_arr))
    f1 = gamma * np.cos(omega * (starts + h_arr))
    return f0, fh, f1


def _rk4_generic(rhs, s, t, h):
    k1 = np.asarray(rhs(s, t), dtype=np.float64)
    k2 = np.asarray(rhs(s + 0.5 * h * k1, t + 0.5 * h), dtype=np.float64)
    k3 = np.asarray(rhs(s + 0.5 * h * k2, t + 0.5 * h), dtype=np.float64)
    k4 = np.asarray(rhs(s + h * k3, t + h), dtype=np.float64)
    return s + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(
    spec: SystemSpec,
    config: IntegratorConfig,
    state0,
    t0: float,
    t1: float,
    dense: bool = False,
):
    """Classical RK4 from t0 to t1; endpoint state or (times, states).

    Deterministic for fixed inputs. Raises Escaped as soon as |state|
    exceeds the escape radius at a step endpoint.
    """
    if t1 <= t0:
        raise ValueError("need t1 > t0")
    s0 = np.asarray(state0, dtype=np.float64)
    if s0.shape != (spec.dimension,):
        raise DimensionMismatch(
            f"state shape {s0.shape} does not match dimension {spec.dimension}"
        )
    starts, h_arr = build_grid(t0, t1, config.step)
    times = np.append(starts, t1)
    esc2 = config.escape_radius * config.escape_radius
    kernels = backends.get_backend()

    if spec.kind == DUFFING_FORCED:
        f0, fh, f1 = duffing_forcing_tables(spec, starts, h_arr)
        delta = spec.parameters["delta"]
        if dense:
            traj, status = kernels.duffing_traj(s0, h_arr, f0, fh, f1, delta, esc2)
            if status != 0:
                raise Escaped(traj[-1], float(times[len(traj) - 1]))
            return times, traj
        out, status, esc_step = kernels.duffing_batch(
            s0[None, :], h_arr, f0, fh, f1, delta, esc2
        )
        if status[0] != 0:
            raise Escaped(out[0], float(times[esc_step[0] + 1]))
        return out[0]

    if spec.kind == CHEN:
        if dense:
            traj, status = kernels.chen_traj(s0, h_arr, esc2)
            if status != 0:
                raise Escaped(traj[-1], float(times[len(traj) - 1]))
            return times, traj
        out, status, esc_step = kernels.chen_batch(s0[None, :], h_arr, esc2)
        if status[0] != 0:
            raise Escaped(out[0], float(times[esc_step[0] + 1]))
        return out[0]

    if spec.kind != CUSTOM:
        raise ValueError(f"unknown system kind {spec.kind!r}")
    s = s0.copy()
    traj = [s.copy()] if dense else None
    for k in range(len(h_arr)):
        s = _rk4_generic(spec.rhs, s, float(starts[k]), float(h_arr[k]))
        if dense:
            traj.append(s.copy())
        if float(np.dot(s, s)) > esc2:
            raise Escaped(s, float(times[k + 1]))
    if dense:
        return times, np.array(traj)
    return s


def trajectory_csv(times: np.ndarray, states: np.ndarray) -> str:
    """CSV text with header t,x,y[,z]."""
    dim = states.shape[1]
    header = "t," + ",".join("xyz"[:dim])
    lines = [header]
    for t, row in zip(times, states):
        lines.append(",".join(repr(float(v)) for v in (t, *row)))
    return "\n".join(lines) + "\n"


def single_rk4_step(spec: SystemSpec, state, t: float, h: float) -> np.ndarray:
    """One RK4 step via the generic stage formulas (reference path)."""
    return _rk4_generic(lambda s, tt: vector_field(spec, s, tt), np.asarray(state, dtype=np.float64), t, h)
