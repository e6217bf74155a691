"""Compiled inner loops for the mass-spring simulator.

Everything here is deliberately plain scalar code: fixed iteration order and
no fastmath, so repeated runs are bit-identical on one platform.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

POSITION_BOUND = 1.0e6


@njit(cache=True, inline="always")
def _segment_closest(px, py, ax, ay, bx, by):
    """Closest point to (px,py) on segment (a,b)."""
    dx = bx - ax
    dy = by - ay
    denom = dx * dx + dy * dy
    if denom <= 0.0:
        return ax, ay
    t = ((px - ax) * dx + (py - ay) * dy) / denom
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    return ax + t * dx, ay + t * dy


@njit(cache=True, inline="always")
def _terrain_height(px, tx, ty):
    """Heightfield lookup with flat extension beyond both ends."""
    npts = tx.shape[0]
    if px <= tx[0]:
        return ty[0]
    if px >= tx[npts - 1]:
        return ty[npts - 1]
    k = np.searchsorted(tx, px) - 1
    if k < 0:
        k = 0
    x0 = tx[k]
    x1 = tx[k + 1]
    if x1 <= x0:
        return ty[k]
    w = (px - x0) / (x1 - x0)
    return ty[k] * (1.0 - w) + ty[k + 1] * w


@njit(cache=True, inline="always")
def _contact_force(px, py, vx, vy, tx, ty, k_n, c_n, mu, v_eps):
    """Penalty + regularized Coulomb force on a point below the terrain surface.

    A point is in contact when it is below the interpolated height at its x;
    the push-out direction is toward the closest point on the nearby polyline
    segments, so stair risers and gap walls push sideways rather than up.
    """
    h = _terrain_height(px, tx, ty)
    if py >= h:
        return 0.0, 0.0
    npts = tx.shape[0]
    k = np.searchsorted(tx, px) - 1
    if k < 0:
        k = 0
    lo = k - 4
    if lo < 0:
        lo = 0
    hi = k + 5
    if hi > npts - 1:
        hi = npts - 1
    best_d2 = 1.0e300
    cx = px
    cy = h
    for s in range(lo, hi):
        qx, qy = _segment_closest(px, py, tx[s], ty[s], tx[s + 1], ty[s + 1])
        d2 = (qx - px) * (qx - px) + (qy - py) * (qy - py)
        if d2 < best_d2:
            best_d2 = d2
            cx = qx
            cy = qy
    depth = math.sqrt(best_d2)
    if depth <= 1.0e-12:
        return 0.0, 0.0
    nx = (cx - px) / depth
    ny = (cy - py) / depth
    vn = vx * nx + vy * ny
    fn = k_n * depth - c_n * vn
    if fn <= 0.0:
        return 0.0, 0.0
    # tangential, smoothed Coulomb
    tx_ = -ny
    ty_ = nx
    vt = vx * tx_ + vy * ty_
    ft = -mu * fn * math.tanh(vt / v_eps)
    return fn * nx + ft * tx_, fn * ny + ft * ty_


@njit(cache=True)
def run_tick(
    pos,
    vel,
    sp_i,
    sp_j,
    sp_rest,
    sp_k,
    sp_act,
    sp_w,
    mass,
    act_mult,
    tx,
    ty,
    has_box,
    box_state,
    box_half,
    box_mass,
    gravity,
    damping,
    k_contact,
    c_contact,
    friction,
    v_eps,
    dt,
    substeps,
):
    """Advance one control tick (actions held fixed) of `substeps` Euler steps.

    Mutates pos, vel and box_state in place. Returns 0, or 1 if any
    coordinate left the finite range (unstable state).
    """
    n = pos.shape[0]
    nsp = sp_i.shape[0]
    has_terrain = tx.shape[0] >= 2
    f = np.empty((n, 2))
    for _ in range(substeps):
        for i in range(n):
            f[i, 0] = 0.0
            f[i, 1] = -mass[i] * gravity
        bfx = 0.0
        bfy = -box_mass * gravity

        for s in range(nsp):
            i = sp_i[s]
            j = sp_j[s]
            dx = pos[j, 0] - pos[i, 0]
            dy = pos[j, 1] - pos[i, 1]
            length = math.sqrt(dx * dx + dy * dy)
            if length < 1.0e-12:
                continue
            ux = dx / length
            uy = dy / length
            rest = sp_rest[s]
            a = sp_act[s]
            if a >= 0:
                rest = rest * (1.0 + sp_w[s] * (act_mult[a] - 1.0))
            fs = sp_k[s] * (rest - length)
            vrel = (vel[j, 0] - vel[i, 0]) * ux + (vel[j, 1] - vel[i, 1]) * uy
            fs -= damping * vrel
            fx = fs * ux
            fy = fs * uy
            f[j, 0] += fx
            f[j, 1] += fy
            f[i, 0] -= fx
            f[i, 1] -= fy

        if has_terrain:
            for i in range(n):
                fx, fy = _contact_force(
                    pos[i, 0], pos[i, 1], vel[i, 0], vel[i, 1],
                    tx, ty, k_contact, c_contact, friction, v_eps,
                )
                f[i, 0] += fx
                f[i, 1] += fy

        if has_box:
            cx = box_state[0]
            cy = box_state[1]
            bvx = box_state[2]
            bvy = box_state[3]
            hx = box_half[0]
            hy = box_half[1]
            for i in range(n):
                dx = pos[i, 0] - cx
                dy = pos[i, 1] - cy
                ox = hx - abs(dx)
                oy = hy - abs(dy)
                if ox > 0.0 and oy > 0.0:
                    if ox < oy:
                        nx = 1.0 if dx >= 0.0 else -1.0
                        ny = 0.0
                        depth = ox
                    else:
                        nx = 0.0
                        ny = 1.0 if dy >= 0.0 else -1.0
                        depth = oy
                    rvx = vel[i, 0] - bvx
                    rvy = vel[i, 1] - bvy
                    vn = rvx * nx + rvy * ny
                    fn = k_contact * depth - c_contact * vn
                    if fn > 0.0:
                        tnx = -ny
                        tny = nx
                        vt = rvx * tnx + rvy * tny
                        ft = -friction * fn * math.tanh(vt / v_eps)
                        fx = fn * nx + ft * tnx
                        fy = fn * ny + ft * tny
                        f[i, 0] += fx
                        f[i, 1] += fy
                        bfx -= fx
                        bfy -= fy
            if has_terrain:
                for corner in range(4):
                    sx = -1.0 if corner % 2 == 0 else 1.0
                    sy = -1.0 if corner < 2 else 1.0
                    fx, fy = _contact_force(
                        cx + sx * hx, cy + sy * hy, bvx, bvy,
                        tx, ty, k_contact, c_contact, friction, v_eps,
                    )
                    bfx += fx
                    bfy += fy

        for i in range(n):
            vel[i, 0] += dt * f[i, 0] / mass[i]
            vel[i, 1] += dt * f[i, 1] / mass[i]
            pos[i, 0] += dt * vel[i, 0]
            pos[i, 1] += dt * vel[i, 1]
        if has_box:
            box_state[2] += dt * bfx / box_mass
            box_state[3] += dt * bfy / box_mass
            box_state[0] += dt * box_state[2]
            box_state[1] += dt * box_state[3]

    for i in range(n):
        if not (math.isfinite(pos[i, 0]) and math.isfinite(pos[i, 1])):
            return 1
        if abs(pos[i, 0]) > POSITION_BOUND or abs(pos[i, 1]) > POSITION_BOUND:
            return 1
    if has_box:
        if not (math.isfinite(box_state[0]) and math.isfinite(box_state[1])):
            return 1
        if abs(box_state[0]) > POSITION_BOUND or abs(box_state[1]) > POSITION_BOUND:
            return 1
    return 0
