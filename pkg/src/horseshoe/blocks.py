"""Quadrilateral blocks with bilinear charts from the unit square.

Chart convention: corners c0,c1,c2,c3 in counterclockwise order,
phi(u,v) = (1-u)(1-v) c0 + u(1-v) c1 + uv c2 + (1-u)v c3, so the edge
c0->c3 is the designated piece at u = 0 and c1->c2 the piece at u = 1.
Connections run along u between the two designated pieces.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidBlocks, OutOfRange

NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 40


@dataclass(frozen=True)
class Block:
    """Convex quadrilateral region with designated boundary edge pair."""

    id: int
    corners: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = np.asarray(self.corners, dtype=np.float64)
        if pts.shape != (4, 2):
            raise InvalidBlocks(f"block {self.id}: need exactly 4 planar corners")
        object.__setattr__(
            self, "corners", tuple(tuple(float(v) for v in row) for row in pts)
        )
        crosses = []
        for k in range(4):
            a = pts[k]
            b = pts[(k + 1) % 4]
            c = pts[(k + 2) % 4]
            e1 = b - a
            e2 = c - b
            crosses.append(float(e1[0] * e2[1] - e1[1] * e2[0]))
        scale2 = max(
            float(np.dot(pts[(k + 1) % 4] - pts[k], pts[(k + 1) % 4] - pts[k]))
            for k in range(4)
        )
        if scale2 == 0.0:
            raise InvalidBlocks(f"block {self.id}: degenerate corners")
        if any(c <= 1e-12 * scale2 for c in crosses):
            raise InvalidBlocks(
                f"block {self.id}: corners must be strictly convex in "
                "counterclockwise order"
            )

    @cached_property
    def pts(self) -> np.ndarray:
        return np.asarray(self.corners, dtype=np.float64)

    @cached_property
    def _coeffs(self):
        # phi(u,v) = a + u b + v d + uv e
        c0, c1, c2, c3 = self.pts
        return c0, c1 - c0, c3 - c0, c2 - c1 - c3 + c0

    @cached_property
    def diameter(self) -> float:
        p = self.pts
        return max(
            float(np.linalg.norm(p[i] - p[j])) for i in range(4) for j in range(i)
        )

    @property
    def designated_low(self) -> np.ndarray:
        """Edge at u = 0, traced c0 -> c3."""
        return self.pts[[0, 3]]

    @property
    def designated_high(self) -> np.ndarray:
        """Edge at u = 1, traced c1 -> c2."""
        return self.pts[[1, 2]]

    @property
    def side_edges(self) -> list[np.ndarray]:
        """The two non-designated edges (v = 0 and v = 1 sides)."""
        return [self.pts[[0, 1]], self.pts[[3, 2]]]

    def to_json_dict(self) -> dict:
        return {"id": self.id, "corners": [list(c) for c in self.corners]}

    @classmethod
    def from_json(cls, data: dict) -> "Block":
        return cls(id=int(data["id"]), corners=tuple(map(tuple, data["corners"])))


def chart_point(block: Block, u, v) -> np.ndarray:
    """Bilinear chart evaluation; u, v may be arrays of the same shape."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if np.any(u < 0.0) or np.any(u > 1.0) or np.any(v < 0.0) or np.any(v > 1.0):
        raise OutOfRange("chart coordinates must lie in [0, 1]^2")
    a, b, d, e = block._coeffs
    uu = u[..., None]
    vv = v[..., None]
    return a + uu * b + vv * d + (uu * vv) * e


def chart_inverse(
    block: Block,
    pts: np.ndarray,
    max_iter: int = NEWTON_MAX_ITER,
    init: tuple[float, float] = (0.5, 0.5),
):
    """Newton inversion of the bilinear chart for a batch of points.

    Returns (uv, converged). Coordinates are meaningful wherever the
    iteration converged; callers decide which (u, v) range they accept,
    so this also serves the extended-strip test.
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
    a, b, d, e = block._coeffs
    n = len(pts)
    uv = np.empty((n, 2))
    uv[:, 0] = init[0]
    uv[:, 1] = init[1]
    tol = NEWTON_TOL * max(1.0, block.diameter)
    active = np.ones(n, dtype=bool)
    for _ in range(max_iter):
        u = uv[:, 0]
        v = uv[:, 1]
        r = a + u[:, None] * b + v[:, None] * d + (u * v)[:, None] * e - pts
        err = np.abs(r).max(axis=1)
        active = err > tol
        if not active.any():
            break
        ju = b + v[:, None] * e
        jv = d + u[:, None] * e
        det = ju[:, 0] * jv[:, 1] - ju[:, 1] * jv[:, 0]
        ok = active & (np.abs(det) > 1e-300)
        inv_det = np.where(ok, 1.0 / np.where(ok, det, 1.0), 0.0)
        du = (r[:, 0] * jv[:, 1] - r[:, 1] * jv[:, 0]) * inv_det
        dv = (ju[:, 0] * r[:, 1] - ju[:, 1] * r[:, 0]) * inv_det
        uv[ok, 0] -= du[ok]
        uv[ok, 1] -= dv[ok]
    u = uv[:, 0]
    v = uv[:, 1]
    r = a + u[:, None] * b + v[:, None] * d + (u * v)[:, None] * e - pts
    converged = np.abs(r).max(axis=1) <= tol
    return uv, converged


def contains(block: Block, pts: np.ndarray, slack: float = 0.0) -> np.ndarray:
    """Half-plane membership test for a batch of points (boundary inclusive)."""
    pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
    c = block.pts
    tol = 1e-12 * max(1.0, block.diameter**2) + slack
    inside = np.ones(len(pts), dtype=bool)
    for k in range(4):
        a = c[k]
        b = c[(k + 1) % 4]
        cross = (b[0] - a[0]) * (pts[:, 1] - a[1]) - (b[1] - a[1]) * (pts[:, 0] - a[0])
        inside &= cross >= -tol
    return inside


def locate(block: Block, point):
    """Chart coordinates of a point inside the block, else None."""
    p = np.asarray(point, dtype=np.float64)
    if not contains(block, p[None, :])[0]:
        return None
    uv, conv = chart_inverse(block, p[None, :])
    if not conv[0]:
        return None
    u = min(max(float(uv[0, 0]), 0.0), 1.0)
    v = min(max(float(uv[0, 1]), 0.0), 1.0)
    return u, v


def locate_batch(block: Block, pts: np.ndarray):
    """Vectorized locate: (inside, u, v); u, v are NaN outside."""
    pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
    good = np.isfinite(pts).all(axis=1)
    inside = good.copy()
    safe = np.where(good[:, None], pts, 0.0)
    inside[good] = contains(block, safe[good])
    u = np.full(len(pts), np.nan)
    v = np.full(len(pts), np.nan)
    if inside.any():
        uv, conv = chart_inverse(block, safe[inside])
        ins_idx = np.nonzero(inside)[0]
        bad = ins_idx[~conv]
        inside[bad] = False
        okp = ins_idx[conv]
        u[okp] = np.clip(uv[conv, 0], 0.0, 1.0)
        v[okp] = np.clip(uv[conv, 1], 0.0, 1.0)
    return inside, u, v


def segment_distance(pts: np.ndarray, a, b) -> np.ndarray:
    """Distance from each point to the segment [a, b]."""
    pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    ab = b - a
    denom = float(np.dot(ab, ab))
    if denom == 0.0:
        return np.linalg.norm(pts - a, axis=1)
    t = np.clip(((pts - a) @ ab) / denom, 0.0, 1.0)
    proj = a + t[:, None] * ab
    return np.linalg.norm(pts - proj, axis=1)


def polygon_distance(block: Block, pts: np.ndarray) -> np.ndarray:
    """Distance from points to the solid quad (0 inside)."""
    pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
    good = np.isfinite(pts).all(axis=1)
    out = np.full(len(pts), np.inf)
    if good.any():
        p = pts[good]
        c = block.pts
        d = np.min(
            [segment_distance(p, c[k], c[(k + 1) % 4]) for k in range(4)], axis=0
        )
        d[contains(block, p)] = 0.0
        out[good] = d
    return out


def _segments_intersect(p1, p2, p3, p4) -> bool:
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1 = orient(p3, p4, p1)
    d2 = orient(p3, p4, p2)
    d3 = orient(p1, p2, p3)
    d4 = orient(p1, p2, p4)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)):
        return True
    return False


def block_pair_distance(b1: Block, b2: Block) -> float:
    """Distance between two solid quads (0 when they touch or overlap)."""
    if contains(b1, b2.pts).any() or contains(b2, b1.pts).any():
        return 0.0
    c1 = b1.pts
    c2 = b2.pts
    best = np.inf
    for i in range(4):
        for j in range(4):
            if _segments_intersect(
                c1[i], c1[(i + 1) % 4], c2[j], c2[(j + 1) % 4]
            ):
                return 0.0
            best = min(
                best,
                float(segment_distance(c1[[i]], c2[j], c2[(j + 1) % 4])[0]),
                float(segment_distance(c2[[j]], c1[i], c1[(i + 1) % 4])[0]),
            )
    return best


def validate_disjoint(blocks: list[Block]) -> None:
    """Raise InvalidBlocks unless all blocks are pairwise disjoint."""
    if len(blocks) != len({b.id for b in blocks}):
        raise InvalidBlocks("block ids must be unique")
    for i, bi in enumerate(blocks):
        for bj in blocks[i + 1 :]:
            if block_pair_distance(bi, bj) <= 0.0:
                raise InvalidBlocks(
                    f"blocks {bi.id} and {bj.id} overlap or touch"
                )
