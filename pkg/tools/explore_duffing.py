"""Exploration of the Duffing stroboscopic map: fixed points, manifolds,
attractor. Produces PNGs under tools/out/ and prints candidate data.

Dev-only; not part of the package.
"""
import math
import sys

import numpy as np

sys.path.insert(0, "src")

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from horseshoe import integrate as itg
from horseshoe import poincare as pc
from horseshoe import systems

TWO_PI = 2.0 * math.pi
CFG = itg.IntegratorConfig(step=TWO_PI / 10000, escape_radius=1e6)
STROBO = pc.Stroboscopic(period=TWO_PI)


def P_batch(spec, pts):
    res = pc.map_points(spec, STROBO, CFG, np.atleast_2d(pts))
    return res.images


def P_jac(spec, p, h=1e-7):
    """Central finite-difference Jacobian of the stroboscopic map."""
    pts = np.array(
        [
            [p[0] + h, p[1]],
            [p[0] - h, p[1]],
            [p[0], p[1] + h],
            [p[0], p[1] - h],
        ]
    )
    im = P_batch(spec, pts)
    return np.column_stack(((im[0] - im[1]) / (2 * h), (im[2] - im[3]) / (2 * h)))


def newton_fixed_point(spec, seed, tol=1e-12, itmax=60):
    p = np.array(seed, dtype=float)
    for _ in range(itmax):
        img = P_batch(spec, p[None, :])[0]
        r = img - p
        if np.linalg.norm(r) < tol:
            return p
        J = P_jac(spec, p)
        try:
            dp = np.linalg.solve(J - np.eye(2), -r)
        except np.linalg.LinAlgError:
            return None
        if np.linalg.norm(dp) > 2.0:
            dp *= 2.0 / np.linalg.norm(dp)
        p = p + dp
        if not np.isfinite(p).all() or np.linalg.norm(p) > 10:
            return None
    return None


def find_fixed_points(spec):
    found = []
    for x in np.linspace(-1.6, 1.6, 9):
        for y in np.linspace(-1.6, 1.6, 9):
            p = newton_fixed_point(spec, (x, y))
            if p is None:
                continue
            if any(np.linalg.norm(p - q) < 1e-6 for q, _, _ in found):
                continue
            J = P_jac(spec, p)
            eigs = np.linalg.eigvals(J)
            kind = "saddle" if (abs(eigs[0]) - 1) * (abs(eigs[1]) - 1) < 0 else (
                "sink" if max(abs(eigs)) < 1 else "source"
            )
            found.append((p, eigs, kind))
    return found


def attractor(spec, n_pts=400, n_iter=160, keep=40, seed=0):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1.5, 1.5, size=(n_pts, 2))
    cloud = []
    for k in range(n_iter):
        res = pc.map_points(spec, STROBO, CFG, pts)
        pts = res.images
        bad = ~res.ok | ~np.isfinite(pts).all(axis=1)
        if bad.any():
            pts[bad] = rng.uniform(-1.0, 1.0, size=(int(bad.sum()), 2))
        if k >= n_iter - keep:
            cloud.append(pts.copy())
    return np.concatenate(cloud)


def unstable_manifold(spec, p_star, v_u, lam, n_levels=5, delta=1e-7, h_max=0.01,
                      clip=4.0, max_pts=250_000):
    """Adaptive polyline of W^u: refine the fundamental segment until all
    image gaps at each level are below h_max."""
    segs = []
    for sign in (+1.0, -1.0):
        a, b = delta, delta * abs(lam)
        params = list(np.geomspace(a, b, 80))
        for level in range(n_levels):
            pts0 = p_star[None, :] + sign * np.array(params)[:, None] * v_u[None, :]
            pts = pts0
            for _ in range(level + 1):
                pts = P_batch(spec, pts)
            # refine where consecutive points are far but still in view
            for _round in range(18):
                d = np.linalg.norm(np.diff(pts, axis=0), axis=1)
                near = (
                    (np.linalg.norm(pts[:-1], axis=1) < clip)
                    | (np.linalg.norm(pts[1:], axis=1) < clip)
                )
                split = np.nonzero((d > h_max) & near)[0]
                if len(split) == 0 or len(params) > max_pts:
                    break
                new_params = [math.sqrt(params[i] * params[i + 1]) for i in split]
                params = sorted(params + new_params)
                pts0 = p_star[None, :] + sign * np.array(params)[:, None] * v_u[None, :]
                pts = pts0
                for _ in range(level + 1):
                    pts = P_batch(spec, pts)
            segs.append(pts)
    return segs


def main():
    gamma = float(sys.argv[1]) if len(sys.argv) > 1 else 1.183
    spec = systems.duffing(0.25, gamma, 1.0)
    print(f"gamma = {gamma}")
    fps = find_fixed_points(spec)
    for p, e, kind in fps:
        print(f"  fixed point ({p[0]:+.12f}, {p[1]:+.12f})  |eig| = "
              f"{abs(e[0]):.4g}, {abs(e[1]):.4g}  {kind}")
    cloud = attractor(spec)
    import os

    os.makedirs("tools/out", exist_ok=True)
    fig, ax = plt.subplots(figsize=(9, 7), dpi=130)
    ax.plot(cloud[:, 0], cloud[:, 1], ".", ms=0.7, color="#888", alpha=0.6,
            label="attractor iterates")
    saddles = [f for f in fps if f[2] == "saddle"]
    for p, e, _ in saddles:
        J = P_jac(spec, p)
        w, v = np.linalg.eig(J)
        iu = int(np.argmax(np.abs(w)))
        lam = float(np.real(w[iu]))
        vu = np.real(v[:, iu])
        vu /= np.linalg.norm(vu)
        print(f"  saddle ({p[0]:+.8f}, {p[1]:+.8f}): lam_u = {w[iu]:.6g}, "
              f"lam_s = {w[1-iu]:.6g}, v_u = ({vu[0]:+.6f}, {vu[1]:+.6f})")
        segs = unstable_manifold(spec, p, vu, lam)
        for s in segs:
            m = np.linalg.norm(s, axis=1) < 6
            ax.plot(s[m][:, 0], s[m][:, 1], "-", lw=0.5)
        ax.plot([p[0]], [p[1]], "r*", ms=12)
        np.save(f"tools/out/manifold_{gamma:.3f}.npy",
                np.array(segs, dtype=object), allow_pickle=True)
    ax.set_xlim(-2, 2)
    ax.set_ylim(-2, 2)
    ax.set_title(f"Duffing stroboscopic map, gamma={gamma}")
    ax.legend()
    fig.savefig(f"tools/out/duffing_{gamma:.3f}.png")
    print(f"saved tools/out/duffing_{gamma:.3f}.png")


if __name__ == "__main__":
    main()
