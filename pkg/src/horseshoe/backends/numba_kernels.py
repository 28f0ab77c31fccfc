"""JIT-compiled integration kernels (one orbit per inner loop)."""
import numpy as np
from numba import njit

name = "numba"

STATUS_OK = 0
STATUS_ESCAPED = 1
STATUS_NO_RETURN = 2
STATUS_REFINE_FAILED = 3


@njit(cache=True)
def _duffing_step(x, y, h, delta, f0, fh, f1):
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
    x = x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
    y = y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
    return x, y


@njit(cache=True)
def duffing_batch(states, h_arr, f0, fh, f1, delta, esc2):
    n = states.shape[0]
    nsteps = h_arr.shape[0]
    out = np.empty((n, 2))
    status = np.zeros(n, dtype=np.int64)
    esc_step = np.full(n, -1, dtype=np.int64)
    for i in range(n):
        x = states[i, 0]
        y = states[i, 1]
        for k in range(nsteps):
            x, y = _duffing_step(x, y, h_arr[k], delta, f0[k], fh[k], f1[k])
            if x * x + y * y > esc2:
                status[i] = STATUS_ESCAPED
                esc_step[i] = k
                break
        out[i, 0] = x
        out[i, 1] = y
    return out, status, esc_step


@njit(cache=True)
def duffing_traj(state, h_arr, f0, fh, f1, delta, esc2):
    nsteps = h_arr.shape[0]
    traj = np.empty((nsteps + 1, 2))
    x = state[0]
    y = state[1]
    traj[0, 0] = x
    traj[0, 1] = y
    status = STATUS_OK
    stop = nsteps
    for k in range(nsteps):
        x, y = _duffing_step(x, y, h_arr[k], delta, f0[k], fh[k], f1[k])
        traj[k + 1, 0] = x
        traj[k + 1, 1] = y
        if x * x + y * y > esc2:
            status = STATUS_ESCAPED
            stop = k + 1
            break
    return traj[: stop + 1], status


@njit(cache=True)
def _chen_step(x, y, z, h):
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
    x = x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
    y = y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
    z = z + h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
    return x, y, z


@njit(cache=True)
def chen_batch(states, h_arr, esc2):
    n = states.shape[0]
    nsteps = h_arr.shape[0]
    out = np.empty((n, 3))
    status = np.zeros(n, dtype=np.int64)
    esc_step = np.full(n, -1, dtype=np.int64)
    for i in range(n):
        x = states[i, 0]
        y = states[i, 1]
        z = states[i, 2]
        for k in range(nsteps):
            x, y, z = _chen_step(x, y, z, h_arr[k])
            if x * x + y * y + z * z > esc2:
                status[i] = STATUS_ESCAPED
                esc_step[i] = k
                break
        out[i, 0] = x
        out[i, 1] = y
        out[i, 2] = z
    return out, status, esc_step


@njit(cache=True)
def chen_traj(state, h_arr, esc2):
    nsteps = h_arr.shape[0]
    traj = np.empty((nsteps + 1, 3))
    x = state[0]
    y = state[1]
    z = state[2]
    traj[0, 0] = x
    traj[0, 1] = y
    traj[0, 2] = z
    status = STATUS_OK
    stop = nsteps
    for k in range(nsteps):
        x, y, z = _chen_step(x, y, z, h_arr[k])
        traj[k + 1, 0] = x
        traj[k + 1, 1] = y
        traj[k + 1, 2] = z
        if x * x + y * y + z * z > esc2:
            status = STATUS_ESCAPED
            stop = k + 1
            break
    return traj[: stop + 1], status


@njit(cache=True)
def chen_section_return_batch(
    states, h, max_steps, esc2, c, guard, refine_tol, max_bisect, decreasing
):
    """First directional crossing of z = c, bisection-refined per point.

    The search arms only once |z - c| has exceeded the guard band, so a
    start point sitting on the section is not re-detected. The sign
    convention flips for increasing sections.
    """
    n = states.shape[0]
    out = np.empty((n, 3))
    t_ret = np.full(n, np.nan)
    status = np.full(n, STATUS_NO_RETURN, dtype=np.int64)
    sgn = 1.0 if decreasing else -1.0
    for i in range(n):
        x = states[i, 0]
        y = states[i, 1]
        z = states[i, 2]
        armed = False
        done = False
        for k in range(max_steps):
            px = x
            py = y
            pz = z
            x, y, z = _chen_step(x, y, z, h)
            if x * x + y * y + z * z > esc2:
                status[i] = STATUS_ESCAPED
                out[i, 0] = x
                out[i, 1] = y
                out[i, 2] = z
                done = True
                break
            if armed and sgn * (pz - c) > 0.0 and sgn * (z - c) <= 0.0:
                a = 0.0
                b = h
                mx = x
                my = y
                mz = z
                status[i] = STATUS_REFINE_FAILED
                for _ in range(max_bisect):
                    mid = 0.5 * (a + b)
                    mx, my, mz = _chen_step(px, py, pz, mid)
                    if abs(mz - c) <= refine_tol:
                        status[i] = STATUS_OK
                        t_ret[i] = k * h + mid
                        break
                    if sgn * (mz - c) > 0.0:
                        a = mid
                    else:
                        b = mid
                out[i, 0] = mx
                out[i, 1] = my
                out[i, 2] = mz
                done = True
                break
            if not armed and abs(z - c) > guard:
                armed = True
        if not done:
            out[i, 0] = x
            out[i, 1] = y
            out[i, 2] = z
    return out, t_ret, status
