"""Pure-numpy fallback kernels, vectorized over the point batch.

Per point these perform the same IEEE-754 operation sequence as the
jitted kernels, so the two backends agree to rounding noise.
"""
import numpy as np

name = "numpy"

STATUS_OK = 0
STATUS_ESCAPED = 1
STATUS_NO_RETURN = 2
STATUS_REFINE_FAILED = 3


def _duffing_step_vec(x, y, h, delta, f0, fh, f1):
    k1x = y
    k1y = x - x * x * x - delta * y + f0
    ax = x + 0.5 * h * k1x
    ay = y + 0.5 * h * k1y
    k2x = ay
    k2y = ax - ax * ax * ax - delta * ay + fh
    bx = x + 0.5 * h * k2x
    by = y + 0.5 * h * k2y
    k3x = by
    k3y = bx - bx * bx * bx - delta * by + fh
    cx = x + h * k3x
    cy = y + h * k3y
    k4x = cy
    k4y = cx - cx * cx * cx - delta * cy + f1
    return (
        x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
        y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
    )


def duffing_batch(states, h_arr, f0, fh, f1, delta, esc2):
    s = np.array(states, dtype=np.float64)
    n = s.shape[0]
    out = s.copy()
    status = np.zeros(n, dtype=np.int64)
    esc_step = np.full(n, -1, dtype=np.int64)
    alive = np.ones(n, dtype=bool)
    x = s[:, 0].copy()
    y = s[:, 1].copy()
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(h_arr.shape[0]):
            x, y = _duffing_step_vec(x, y, h_arr[k], delta, f0[k], fh[k], f1[k])
            esc = alive & (x * x + y * y > esc2)
            if esc.any():
                status[esc] = STATUS_ESCAPED
                esc_step[esc] = k
                out[esc, 0] = x[esc]
                out[esc, 1] = y[esc]
                alive &= ~esc
                if not alive.any():
                    break
    out[alive, 0] = x[alive]
    out[alive, 1] = y[alive]
    return out, status, esc_step


def duffing_traj(state, h_arr, f0, fh, f1, delta, esc2):
    nsteps = h_arr.shape[0]
    traj = np.empty((nsteps + 1, 2))
    x = float(state[0])
    y = float(state[1])
    traj[0] = (x, y)
    status = STATUS_OK
    stop = nsteps
    for k in range(nsteps):
        x, y = _duffing_step_vec(x, y, float(h_arr[k]), delta, f0[k], fh[k], f1[k])
        traj[k + 1] = (x, y)
        if x * x + y * y > esc2:
            status = STATUS_ESCAPED
            stop = k + 1
            break
    return traj[: stop + 1], status


def _chen_step_vec(x, y, z, h):
    k1x = 35.0 * (y - x)
    k1y = 28.0 * y - x * (z + 7.0)
    k1z = x * y - 3.0 * z
    ax = x + 0.5 * h * k1x
    ay = y + 0.5 * h * k1y
    az = z + 0.5 * h * k1z
    k2x = 35.0 * (ay - ax)
    k2y = 28.0 * ay - ax * (az + 7.0)
    k2z = ax * ay - 3.0 * az
    bx = x + 0.5 * h * k2x
    by = y + 0.5 * h * k2y
    bz = z + 0.5 * h * k2z
    k3x = 35.0 * (by - bx)
    k3y = 28.0 * by - bx * (bz + 7.0)
    k3z = bx * by - 3.0 * bz
    cx = x + h * k3x
    cy = y + h * k3y
    cz = z + h * k3z
    k4x = 35.0 * (cy - cx)
    k4y = 28.0 * cy - cx * (cz + 7.0)
    k4z = cx * cy - 3.0 * cz
    return (
        x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
        y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
        z + h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z),
    )


def chen_batch(states, h_arr, esc2):
    s = np.array(states, dtype=np.float64)
    n = s.shape[0]
    out = s.copy()
    status = np.zeros(n, dtype=np.int64)
    esc_step = np.full(n, -1, dtype=np.int64)
    alive = np.ones(n, dtype=bool)
    x = s[:, 0].copy()
    y = s[:, 1].copy()
    z = s[:, 2].copy()
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(h_arr.shape[0]):
            x, y, z = _chen_step_vec(x, y, z, h_arr[k])
            esc = alive & (x * x + y * y + z * z > esc2)
            if esc.any():
                status[esc] = STATUS_ESCAPED
                esc_step[esc] = k
                out[esc, 0] = x[esc]
                out[esc, 1] = y[esc]
                out[esc, 2] = z[esc]
                alive &= ~esc
                if not alive.any():
                    break
    out[alive, 0] = x[alive]
    out[alive, 1] = y[alive]
    out[alive, 2] = z[alive]
    return out, status, esc_step


def chen_traj(state, h_arr, esc2):
    nsteps = h_arr.shape[0]
    traj = np.empty((nsteps + 1, 3))
    x = float(state[0])
    y = float(state[1])
    z = float(state[2])
    traj[0] = (x, y, z)
    status = STATUS_OK
    stop = nsteps
    for k in range(nsteps):
        x, y, z = _chen_step_vec(x, y, z, float(h_arr[k]))
        traj[k + 1] = (x, y, z)
        if x * x + y * y + z * z > esc2:
            status = STATUS_ESCAPED
            stop = k + 1
            break
    return traj[: stop + 1], status


def chen_section_return_batch(
    states, h, max_steps, esc2, c, guard, refine_tol, max_bisect, decreasing
):
    s = np.array(states, dtype=np.float64)
    n = s.shape[0]
    out = s.copy()
    t_ret = np.full(n, np.nan)
    status = np.full(n, STATUS_NO_RETURN, dtype=np.int64)
    sgn = 1.0 if decreasing else -1.0
    idx = np.arange(n)
    armed = np.zeros(n, dtype=bool)
    pend_base: list[np.ndarray] = []
    pend_k: list[np.ndarray] = []
    pend_idx: list[np.ndarray] = []
    for k in range(max_steps):
        if idx.size == 0:
            break
        x, y, z = _chen_step_vec(s[:, 0], s[:, 1], s[:, 2], h)
        esc = x * x + y * y + z * z > esc2
        crossing = armed & (sgn * (s[:, 2] - c) > 0.0) & (sgn * (z - c) <= 0.0) & ~esc
        armed = armed | (np.abs(z - c) > guard)
        new = np.stack((x, y, z), axis=1)
        if esc.any():
            status[idx[esc]] = STATUS_ESCAPED
            out[idx[esc]] = new[esc]
        if crossing.any():
            pend_base.append(s[crossing])
            pend_k.append(np.full(crossing.sum(), k, dtype=np.int64))
            pend_idx.append(idx[crossing])
        drop = esc | crossing
        if drop.any():
            keep = ~drop
            s = new[keep]
            armed = armed[keep]
            idx = idx[keep]
        else:
            s = new
    if idx.size:
        out[idx] = s
    if pend_base:
        base = np.concatenate(pend_base)
        ks = np.concatenate(pend_k)
        oidx = np.concatenate(pend_idx)
        m = base.shape[0]
        a = np.zeros(m)
        b = np.full(m, h)
        fixed = np.zeros(m, dtype=bool)
        st = np.full(m, STATUS_REFINE_FAILED, dtype=np.int64)
        res = base.copy()
        t_hit = np.full(m, np.nan)
        for _ in range(max_bisect):
            if fixed.all():
                break
            mid = 0.5 * (a + b)
            mx, my, mz = _chen_step_vec(base[:, 0], base[:, 1], base[:, 2], mid)
            upd = ~fixed
            res[upd, 0] = mx[upd]
            res[upd, 1] = my[upd]
            res[upd, 2] = mz[upd]
            hit = upd & (np.abs(mz - c) <= refine_tol)
            st[hit] = STATUS_OK
            t_hit[hit] = ks[hit] * h + mid[hit]
            fixed |= hit
            above = sgn * (mz - c) > 0.0
            move_a = upd & ~hit & above
            move_b = upd & ~hit & ~above
            a[move_a] = mid[move_a]
            b[move_b] = mid[move_b]
        out[oidx] = res
        status[oidx] = st
        t_ret[oidx] = t_hit
    return out, t_ret, status
