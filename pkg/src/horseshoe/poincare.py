"""Poincare maps: stroboscopic and plane-section first return."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import backends
from .errors import DimensionMismatch, Escaped, HorseshoeError, NoReturn, OffSection
from .integrate import IntegratorConfig, _rk4_generic, build_grid, duffing_forcing_tables
from .systems import CHEN, CUSTOM, DUFFING_FORCED, SystemSpec

STATUS_OK = 0
STATUS_ESCAPED = 1
STATUS_NO_RETURN = 2
STATUS_REFINE_FAILED = 3
STATUS_OFF_SECTION = 4

STATUS_NAMES = {
    STATUS_OK: "ok",
    STATUS_ESCAPED: "escaped",
    STATUS_NO_RETURN: "no_return",
    STATUS_REFINE_FAILED: "refine_failed",
    STATUS_OFF_SECTION: "off_section",
}


@dataclass(frozen=True)
class RangeConstraint:
    """lo <= var <= hi for var in {x, y}."""

    var: str
    lo: float
    hi: float

    def __post_init__(self):
        if self.var not in ("x", "y"):
            raise ValueError("constraint variable must be 'x' or 'y'")
        if not self.lo <= self.hi:
            raise ValueError("need lo <= hi")

    def satisfied(self, x, y):
        v = x if self.var == "x" else y
        return (self.lo <= v) & (v <= self.hi)

    def to_json_dict(self):
        return {"kind": "range", "var": self.var, "min": self.lo, "max": self.hi}


@dataclass(frozen=True)
class ProductBelow:
    """Strict constraint x*y < bound."""

    bound: float

    def satisfied(self, x, y):
        return x * y < self.bound

    def to_json_dict(self):
        return {"kind": "product_below", "bound": self.bound}


Constraint = Union[RangeConstraint, ProductBelow]


@dataclass(frozen=True)
class Stroboscopic:
    """Time-T flow map started at the given forcing phase."""

    period: float
    phase: float = 0.0

    def __post_init__(self):
        if self.period <= 0:
            raise ValueError("period must be positive")

    def to_json_dict(self):
        return {"kind": "stroboscopic", "period": self.period, "phase": self.phase}


@dataclass(frozen=True)
class SectionReturn:
    """First return to the plane z = plane_z in the given direction.

    The return search arms only after |z - plane_z| exceeds the guard
    band once, so the start point is never re-detected; crossing times
    are refined by bisection within the bracketing step.
    """

    plane_z: float
    direction: str = "decreasing"
    constraints: tuple[Constraint, ...] = ()
    guard: float = 1e-3
    refine_tol: float = 1e-10
    max_bisect: int = 50

    def __post_init__(self):
        if self.direction not in ("decreasing", "increasing"):
            raise ValueError("direction must be 'decreasing' or 'increasing'")
        object.__setattr__(self, "constraints", tuple(self.constraints))

    def membership(self, points: np.ndarray) -> np.ndarray:
        """Vectorized section-membership test for (N, 2) points."""
        x = points[:, 0]
        y = points[:, 1]
        ok = np.ones(len(points), dtype=bool)
        for c in self.constraints:
            ok &= c.satisfied(x, y)
        return ok

    def to_json_dict(self):
        d = {
            "kind": "section_return",
            "plane_z": self.plane_z,
            "direction": self.direction,
            "constraints": [c.to_json_dict() for c in self.constraints],
        }
        if (self.guard, self.refine_tol, self.max_bisect) != (1e-3, 1e-10, 50):
            d.update(
                guard=self.guard,
                refine_tol=self.refine_tol,
                max_bisect=self.max_bisect,
            )
        return d


PoincareSpec = Union[Stroboscopic, SectionReturn]

CHEN_SECTION = SectionReturn(
    plane_z=21.0,
    direction="decreasing",
    constraints=(
        RangeConstraint("x", -10.0, 10.0),
        RangeConstraint("y", -10.0, 10.0),
        ProductBelow(63.0),
    ),
)


@dataclass
class MapResult:
    """Batch map output: per-point image, status, and section diagnostics."""

    images: np.ndarray
    status: np.ndarray
    t_return: Optional[np.ndarray] = None
    z_section: Optional[np.ndarray] = None

    @property
    def ok(self) -> np.ndarray:
        return self.status == STATUS_OK


def _custom_section_return(spec, psec, config, states3):
    """Python fallback of the section-return search for custom 3-D systems."""
    sgn = 1.0 if psec.direction == "decreasing" else -1.0
    h = config.step
    max_steps = int(math.floor(config.max_time / h))
    esc2 = config.escape_radius**2
    c = psec.plane_z
    out = np.array(states3, dtype=np.float64)
    t_ret = np.full(len(states3), np.nan)
    status = np.full(len(states3), STATUS_NO_RETURN, dtype=np.int64)
    for i, s0 in enumerate(states3):
        s = np.asarray(s0, dtype=np.float64)
        armed = False
        for k in range(max_steps):
            prev = s
            s = _rk4_generic(spec.rhs, s, k * h, h)
            if float(np.dot(s, s)) > esc2:
                status[i] = STATUS_ESCAPED
                out[i] = s
                break
            if (
                armed
                and sgn * (prev[2] - c) > 0.0
                and sgn * (s[2] - c) <= 0.0
            ):
                a, b = 0.0, h
                m = s
                status[i] = STATUS_REFINE_FAILED
                for _ in range(psec.max_bisect):
                    mid = 0.5 * (a + b)
                    m = _rk4_generic(spec.rhs, prev, k * h, mid)
                    if abs(m[2] - c) <= psec.refine_tol:
                        status[i] = STATUS_OK
                        t_ret[i] = k * h + mid
                        break
                    if sgn * (m[2] - c) > 0.0:
                        a = mid
                    else:
                        b = mid
                out[i] = m
                break
            if not armed and abs(s[2] - c) > psec.guard:
                armed = True
        else:
            out[i] = s
    return out, t_ret, status


def map_points(
    spec: SystemSpec,
    psec: PoincareSpec,
    config: IntegratorConfig,
    points,
) -> MapResult:
    """Apply the Poincare map to a batch of section points.

    Points are rows; failures are reported per point in ``status`` and
    never abort the batch.
    """
    arr = np.asarray(points, dtype=np.float64)
    kernels = backends.get_backend()
    esc2 = config.escape_radius**2

    if isinstance(psec, Stroboscopic):
        if arr.size == 0:
            return MapResult(
                images=arr.reshape(0, spec.dimension),
                status=np.zeros(0, dtype=np.int64),
            )
        pts = np.atleast_2d(arr)
        if pts.shape[1] != spec.dimension:
            raise DimensionMismatch(
                f"stroboscopic points must have dimension {spec.dimension}"
            )
        t0 = psec.phase
        t1 = psec.phase + psec.period
        starts, h_arr = build_grid(t0, t1, config.step)
        if spec.kind == DUFFING_FORCED:
            f0, fh, f1 = duffing_forcing_tables(spec, starts, h_arr)
            out, status, _ = kernels.duffing_batch(
                pts, h_arr, f0, fh, f1, spec.parameters["delta"], esc2
            )
            return MapResult(images=out, status=status)
        if spec.kind == CHEN:
            out, status, _ = kernels.chen_batch(pts, h_arr, esc2)
            return MapResult(images=out, status=status)
        out = np.empty_like(pts)
        status = np.zeros(len(pts), dtype=np.int64)
        for i, p in enumerate(pts):
            s = p.copy()
            escaped = False
            for k in range(len(h_arr)):
                s = _rk4_generic(spec.rhs, s, float(starts[k]), float(h_arr[k]))
                if float(np.dot(s, s)) > esc2:
                    escaped = True
                    break
            out[i] = s
            status[i] = STATUS_ESCAPED if escaped else STATUS_OK
        return MapResult(images=out, status=status)

    if not isinstance(psec, SectionReturn):
        raise TypeError(f"unsupported Poincare spec {type(psec).__name__}")
    if spec.dimension != 3:
        raise DimensionMismatch("section-return maps need a 3-D system")
    if arr.size == 0:
        return MapResult(
            images=arr.reshape(0, 2),
            status=np.zeros(0, dtype=np.int64),
            t_return=np.zeros(0),
            z_section=np.zeros(0),
        )
    pts = np.atleast_2d(arr)
    if pts.shape[1] != 2:
        raise DimensionMismatch("section points are planar (x, y)")
    member = psec.membership(pts)
    images = np.full((len(pts), 2), np.nan)
    status = np.full(len(pts), STATUS_OFF_SECTION, dtype=np.int64)
    t_return = np.full(len(pts), np.nan)
    z_section = np.full(len(pts), np.nan)
    if member.any():
        sub = pts[member]
        states3 = np.column_stack((sub[:, 0], sub[:, 1], np.full(len(sub), psec.plane_z)))
        max_steps = int(math.floor(config.max_time / config.step))
        if spec.kind == CHEN:
            out, t_ret, st = kernels.chen_section_return_batch(
                states3,
                config.step,
                max_steps,
                esc2,
                psec.plane_z,
                psec.guard,
                psec.refine_tol,
                psec.max_bisect,
                psec.direction == "decreasing",
            )
        elif spec.kind == CUSTOM:
            out, t_ret, st = _custom_section_return(spec, psec, config, states3)
        else:
            raise DimensionMismatch(
                f"section-return map is not defined for kind {spec.kind!r}"
            )
        images[member] = out[:, :2]
        status[member] = st
        t_return[member] = t_ret
        z_section[member] = out[:, 2]
    return MapResult(
        images=images, status=status, t_return=t_return, z_section=z_section
    )


def as_batch_map(spec: SystemSpec, psec: PoincareSpec, config: IntegratorConfig):
    """Closure mapping (N, 2) section points to a MapResult."""

    def mapper(points):
        return map_points(spec, psec, config, points)

    return mapper


def poincare_map(
    spec: SystemSpec, psec: PoincareSpec, config: IntegratorConfig, point
) -> np.ndarray:
    """Single-point Poincare map; raises instead of returning a status."""
    res = map_points(spec, psec, config, np.asarray(point, dtype=np.float64)[None, :])
    st = int(res.status[0])
    if st == STATUS_OK:
        return res.images[0]
    if st == STATUS_OFF_SECTION:
        raise OffSection(point, "section constraints violated")
    if st == STATUS_ESCAPED:
        raise Escaped(res.images[0], math.nan)
    if st == STATUS_NO_RETURN:
        raise NoReturn(config.max_time)
    raise HorseshoeError("crossing-time refinement failed")


def map_point_cloud(
    spec: SystemSpec, psec: PoincareSpec, config: IntegratorConfig, points
) -> list[dict]:
    """Elementwise poincare_map over a list; per-point errors recorded.

    Returns one record per input point, in input order.
    """
    pts = list(points)
    if not pts:
        return []
    res = map_points(spec, psec, config, np.asarray(pts, dtype=np.float64))
    records = []
    for i, p in enumerate(pts):
        st = int(res.status[i])
        rec = {
            "point": [float(v) for v in p],
            "status": STATUS_NAMES[st],
            "image": [float(v) for v in res.images[i]] if st == STATUS_OK else None,
        }
        if res.t_return is not None and st == STATUS_OK:
            t = float(res.t_return[i])
            if not math.isnan(t):
                rec["t_return"] = t
        records.append(rec)
    return records
