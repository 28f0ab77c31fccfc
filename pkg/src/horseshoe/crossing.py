"""Numerical verification of block-crossing structure.

Evidence model: the crossing relation quantifies over every connection
of a block's designated boundary pieces, which no finite computation
decides. The engine samples chart fibers as the canonical connection
family and reports three-valued verdicts (crosses / disjoint /
undetermined) with margins; the strip separation test upgrades sampled
evidence to an every-connection argument when its hypotheses hold.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .blocks import (
    Block,
    chart_inverse,
    chart_point,
    locate_batch,
    polygon_distance,
    segment_distance,
    validate_disjoint,
)
from .errors import InvalidBlocks
from .symbolic import Matrix01, SubshiftVerdict, classify

CROSSES = "crosses"
DISJOINT = "disjoint"
UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class SamplingConfig:
    """Sampling densities and margins for the verification engine.

    Fibers are sampled at connection midlevels v_k = (k + 1/2) / n_v so
    that no sampled connection coincides with a side edge; margin is an
    absolute planar distance.
    """

    connections: int = 41
    points_per_connection: int = 400
    grid: int = 60
    margin: float = 1e-3
    chart_tolerance: float = 0.02

    def __post_init__(self):
        if min(self.connections, self.points_per_connection, self.grid) < 2:
            raise ValueError("all sampling counts must be >= 2")
        if self.margin <= 0:
            raise ValueError("margin must be positive")
        if not 0.0 < self.chart_tolerance <= 0.1:
            raise ValueError("chart_tolerance must lie in (0, 0.1]")

    def doubled(self) -> "SamplingConfig":
        return SamplingConfig(
            connections=2 * self.connections,
            points_per_connection=2 * self.points_per_connection,
            grid=2 * self.grid,
            margin=self.margin,
            chart_tolerance=self.chart_tolerance,
        )

    def to_json_dict(self) -> dict:
        return {
            "connections": self.connections,
            "points_per_connection": self.points_per_connection,
            "grid": self.grid,
            "margin": self.margin,
            "chart_tolerance": self.chart_tolerance,
        }


@dataclass
class CrossingVerdict:
    """Per-ordered-pair verdict with its numerical evidence."""

    pair: tuple[int, int]
    status: str
    min_clearance: Optional[float] = None
    connections: Optional[list[dict]] = None
    min_distance: Optional[float] = None
    first_failing_connection: Optional[int] = None
    reason: Optional[str] = None
    strip_separated: Optional[bool] = None

    def to_json_dict(self) -> dict:
        d: dict = {"pair": list(self.pair), "status": self.status}
        if self.status == CROSSES:
            d["min_clearance"] = self.min_clearance
            if self.strip_separated is not None:
                d["strip_separated"] = self.strip_separated
            if self.connections is not None:
                d["connections"] = self.connections
        if self.min_distance is not None:
            d["min_distance"] = self.min_distance
        if self.first_failing_connection is not None:
            d["first_failing_connection"] = self.first_failing_connection
        if self.reason:
            d["reason"] = self.reason
        return d


@dataclass
class CrossingReport:
    """Assembled verdict matrix with the induced subshift classification."""

    block_ids: list[int]
    verdicts: list[list[CrossingVerdict]]
    crossing_matrix: Matrix01
    semi: bool
    subshift: SubshiftVerdict

    def to_json_dict(self) -> dict:
        return {
            "block_ids": self.block_ids,
            "crossing_matrix": self.crossing_matrix.to_lists(),
            "semi": self.semi,
            "subshift": self.subshift.to_json_dict(),
            "verdicts": [
                [v.to_json_dict() for v in row] for row in self.verdicts
            ],
        }


def _as_images(P, pts: np.ndarray):
    """Run the map callable; tolerate plain-array test maps."""
    res = P(pts)
    if hasattr(res, "images") and hasattr(res, "status"):
        return np.asarray(res.images, dtype=np.float64), np.asarray(res.status)
    images = np.asarray(res, dtype=np.float64)
    return images, np.zeros(len(images), dtype=np.int64)


def fiber_start_points(block: Block, cfg: SamplingConfig):
    """Sampled connections: midlevel v-fibers traversed along u."""
    v_vals = (np.arange(cfg.connections) + 0.5) / cfg.connections
    u_vals = np.linspace(0.0, 1.0, cfg.points_per_connection)
    uu, vv = np.meshgrid(u_vals, v_vals)
    pts = chart_point(block, uu.ravel(), vv.ravel())
    return pts, v_vals, u_vals


def cover_points(block: Block, cfg: SamplingConfig):
    """Chart grid plus dense boundary samples.

    Returns (points, b1_mask, b2_mask); the masks select the samples of
    the designated edges at u = 0 and u = 1.
    """
    g = np.linspace(0.0, 1.0, cfg.grid)
    uu, vv = np.meshgrid(g, g)
    interior = chart_point(block, uu.ravel(), vv.ravel())
    nb = 4 * cfg.grid
    t = np.linspace(0.0, 1.0, nb)
    zeros = np.zeros(nb)
    ones = np.ones(nb)
    b1 = chart_point(block, zeros, t)
    b2 = chart_point(block, ones, t)
    side0 = chart_point(block, t, zeros)
    side1 = chart_point(block, t, ones)
    pts = np.concatenate([interior, b1, b2, side0, side1])
    n = len(pts)
    b1_mask = np.zeros(n, dtype=bool)
    b2_mask = np.zeros(n, dtype=bool)
    b1_mask[len(interior) : len(interior) + nb] = True
    b2_mask[len(interior) + nb : len(interior) + 2 * nb] = True
    return pts, b1_mask, b2_mask


def _runs(mask: np.ndarray):
    """Maximal runs of consecutive True entries as (start, stop) slices."""
    runs = []
    start = None
    for i, m in enumerate(mask):
        if m and start is None:
            start = i
        elif not m and start is not None:
            runs.append((start, i))
            start = None
    if start is not None:
        runs.append((start, len(mask)))
    return runs


def _side_clearance(bj: Block, pts: np.ndarray) -> float:
    e0, e1 = bj.side_edges
    d0 = segment_distance(pts, e0[0], e0[1])
    d1 = segment_distance(pts, e1[0], e1[1])
    return float(np.minimum(d0, d1).min())


def _analyze_crossing(
    bj: Block,
    images: np.ndarray,
    status: np.ndarray,
    v_vals: np.ndarray,
    cfg: SamplingConfig,
):
    """Fiber-by-fiber crossing criterion against block bj."""
    n_v = cfg.connections
    n_u = cfg.points_per_connection
    imgs = images.reshape(n_v, n_u, 2)
    stats = status.reshape(n_v, n_u)
    du = cfg.chart_tolerance
    records = []
    all_pass = True
    first_fail = None
    min_clearance = math.inf
    for k in range(n_v):
        rec = {"v": float(v_vals[k]), "passed": False}
        if np.any(stats[k] != 0):
            rec["note"] = "integration_error"
            records.append(rec)
            if first_fail is None:
                first_fail = k
            all_pass = False
            continue
        inside, u, _ = locate_batch(bj, imgs[k])
        best_fail = None
        qualifying = None
        for a, b in _runs(inside):
            ur = u[a:b]
            u_lo = float(ur.min())
            u_hi = float(ur.max())
            clearance = _side_clearance(bj, imgs[k, a:b])
            spans = u_lo <= du and u_hi >= 1.0 - du
            if spans and clearance >= cfg.margin:
                if qualifying is None or clearance > qualifying[2]:
                    qualifying = (u_lo, u_hi, clearance)
            elif best_fail is None or (u_hi - u_lo) > (best_fail[1] - best_fail[0]):
                note = (
                    "insufficient_side_clearance"
                    if spans
                    else "run_does_not_span_block"
                )
                best_fail = (u_lo, u_hi, clearance, note)
        if qualifying is not None:
            u_lo, u_hi, clearance = qualifying
            rec.update(u_min=u_lo, u_max=u_hi, clearance=clearance, passed=True)
            min_clearance = min(min_clearance, clearance)
        else:
            if best_fail is None:
                rec["note"] = "image_misses_block"
            else:
                u_lo, u_hi, clearance, note = best_fail
                rec.update(u_min=u_lo, u_max=u_hi, clearance=clearance, note=note)
            if first_fail is None:
                first_fail = k
            all_pass = False
        records.append(rec)
    return all_pass, records, first_fail, min_clearance


def _analyze_disjoint(bj: Block, images: np.ndarray, status: np.ndarray, cfg):
    errors = bool(np.any(status != 0))
    finite = np.isfinite(images).all(axis=1)
    if finite.any():
        min_dist = float(polygon_distance(bj, images[finite]).min())
    else:
        min_dist = math.nan
    ok = (not errors) and finite.all() and min_dist >= cfg.margin
    return ok, min_dist, errors


def verify_crossing(P, bi: Block, bj: Block, cfg: SamplingConfig) -> CrossingVerdict:
    """Sampled-fiber crossing check: every connection's image must contain
    a run inside bj spanning u from <= chart_tolerance to >= 1 - it,
    with side clearance >= margin. Integration errors never yield
    ``crosses``."""
    pts, v_vals, _ = fiber_start_points(bi, cfg)
    images, status = _as_images(P, pts)
    passed, records, first_fail, min_clear = _analyze_crossing(
        bj, images, status, v_vals, cfg
    )
    if passed:
        return CrossingVerdict(
            pair=(bi.id, bj.id),
            status=CROSSES,
            min_clearance=min_clear,
            connections=records,
        )
    reason = records[first_fail].get("note", "connection_failed")
    return CrossingVerdict(
        pair=(bi.id, bj.id),
        status=UNDETERMINED,
        connections=records,
        first_failing_connection=first_fail,
        reason=reason,
    )


def verify_disjoint(P, bi: Block, bj: Block, cfg: SamplingConfig) -> CrossingVerdict:
    """Disjointness check over the chart grid and boundary samples."""
    pts, _, _ = cover_points(bi, cfg)
    images, status = _as_images(P, pts)
    ok, min_dist, errors = _analyze_disjoint(bj, images, status, cfg)
    if ok:
        return CrossingVerdict(
            pair=(bi.id, bj.id), status=DISJOINT, min_distance=min_dist
        )
    return CrossingVerdict(
        pair=(bi.id, bj.id),
        status=UNDETERMINED,
        min_distance=min_dist,
        reason="integration_error" if errors else "image_approaches_block",
    )


def _jacobian_det(block: Block, u: float, v: float) -> float:
    _, b, d, e = block._coeffs
    ju = b + v * e
    jv = d + u * e
    return float(ju[0] * jv[1] - ju[1] * jv[0])


def _analyze_strip(
    bj: Block,
    images: np.ndarray,
    status: np.ndarray,
    b1_mask: np.ndarray,
    b2_mask: np.ndarray,
    kappa: float,
    cfg: SamplingConfig,
):
    diag: dict = {}
    if np.any(status != 0):
        diag["reason"] = "integration_error"
        return False, diag
    for u in (-kappa, 1.0 + kappa):
        for v in (0.0, 1.0):
            if _jacobian_det(bj, u, v) <= 0.0:
                diag["reason"] = "extended_chart_folds"
                return False, diag
    uv, conv = chart_inverse(bj, images, max_iter=80)
    for start in ((-0.5 * kappa, 0.5), (1.0 + 0.5 * kappa, 0.5)):
        if conv.all():
            break
        retry_uv, retry_conv = chart_inverse(
            bj, images[~conv], max_iter=80, init=start
        )
        idx = np.nonzero(~conv)[0]
        uv[idx[retry_conv]] = retry_uv[retry_conv]
        conv[idx[retry_conv]] = True
    if not conv.all():
        diag["reason"] = "chart_inversion_failed"
        diag["unresolved"] = int((~conv).sum())
        return False, diag
    u = uv[:, 0]
    v = uv[:, 1]
    slack = 1e-9
    in_strip = (
        (u >= -kappa - slack)
        & (u <= 1.0 + kappa + slack)
        & (v >= -slack)
        & (v <= 1.0 + slack)
    )
    if not in_strip.all():
        diag["reason"] = "image_leaves_strip"
        diag["outside"] = int((~in_strip).sum())
        return False, diag
    lo_edge = bj.designated_low
    hi_edge = bj.designated_high
    d_lo = segment_distance(images, lo_edge[0], lo_edge[1])
    d_hi = segment_distance(images, hi_edge[0], hi_edge[1])
    eps = cfg.margin

    def component_ok(mask, low_side: bool) -> bool:
        if low_side:
            return bool(np.all(u[mask] < 0.0) and np.all(d_lo[mask] >= eps))
        return bool(np.all(u[mask] > 1.0) and np.all(d_hi[mask] >= eps))

    direct = component_ok(b1_mask, True) and component_ok(b2_mask, False)
    swapped = component_ok(b1_mask, False) and component_ok(b2_mask, True)
    diag["assignment"] = "direct" if direct else ("swapped" if swapped else "none")
    if not (direct or swapped):
        diag["reason"] = "designated_images_not_separated"
        return False, diag
    return True, diag


def strip_separation_check(
    P, bi: Block, bj: Block, kappa: float, cfg: SamplingConfig
) -> bool:
    """Every-connection upgrade: if all images of bi stay in the extended
    strip of bj and the designated-edge images land on opposite u-sides
    with clearance, connectedness forces every connection to cross bj."""
    if kappa < 1.0:
        raise ValueError("strip extension kappa must be >= 1")
    pts, b1_mask, b2_mask = cover_points(bi, cfg)
    images, status = _as_images(P, pts)
    ok, _ = _analyze_strip(bj, images, status, b1_mask, b2_mask, kappa, cfg)
    return ok


def assemble_report(
    P,
    blocks: list[Block],
    cfg: SamplingConfig,
    strip_kappa: Optional[float] = None,
) -> CrossingReport:
    """Verdicts for all ordered pairs, the crossing matrix, and its verdict.

    Each block's fiber and cover samples are mapped once and analyzed
    against every target block. ``semi`` follows the incomplete-crossing
    definition: some pair verified disjoint while every block still
    crosses at least one block.
    """
    if len(blocks) < 2:
        raise InvalidBlocks("need at least two blocks")
    validate_disjoint(blocks)
    m = len(blocks)
    fiber_data = []
    cover_data = []
    for b in blocks:
        pts, v_vals, _ = fiber_start_points(b, cfg)
        images, status = _as_images(P, pts)
        fiber_data.append((images, status, v_vals))
        cpts, b1m, b2m = cover_points(b, cfg)
        cimages, cstatus = _as_images(P, cpts)
        cover_data.append((cimages, cstatus, b1m, b2m))
    verdicts: list[list[CrossingVerdict]] = []
    entries = []
    any_disjoint = False
    for i, bi in enumerate(blocks):
        row = []
        row_bits = []
        images, status, v_vals = fiber_data[i]
        cimages, cstatus, b1m, b2m = cover_data[i]
        for j, bj in enumerate(blocks):
            passed, records, first_fail, min_clear = _analyze_crossing(
                bj, images, status, v_vals, cfg
            )
            if passed:
                v = CrossingVerdict(
                    pair=(bi.id, bj.id),
                    status=CROSSES,
                    min_clearance=min_clear,
                    connections=records,
                )
                if strip_kappa is not None:
                    ok, _ = _analyze_strip(
                        bj, cimages, cstatus, b1m, b2m, strip_kappa, cfg
                    )
                    v.strip_separated = ok
                row_bits.append(1)
            else:
                ok, min_dist, errors = _analyze_disjoint(bj, cimages, cstatus, cfg)
                if ok:
                    v = CrossingVerdict(
                        pair=(bi.id, bj.id), status=DISJOINT, min_distance=min_dist
                    )
                    any_disjoint = True
                else:
                    v = CrossingVerdict(
                        pair=(bi.id, bj.id),
                        status=UNDETERMINED,
                        min_distance=min_dist,
                        first_failing_connection=first_fail,
                        reason=records[first_fail].get("note", "connection_failed")
                        if first_fail is not None
                        else ("integration_error" if errors else "inconclusive"),
                    )
                row_bits.append(0)
            row.append(v)
        verdicts.append(row)
        entries.append(row_bits)
    matrix = Matrix01.coerce(entries)
    arr = matrix.to_numpy()
    semi = bool(any_disjoint and np.all(arr.sum(axis=1) >= 1))
    return CrossingReport(
        block_ids=[b.id for b in blocks],
        verdicts=verdicts,
        crossing_matrix=matrix,
        semi=semi,
        subshift=classify(matrix),
    )
