"""Pure-Python stepping kernel.

Mirrors cantorbeam._kernel_fast operation for operation, with identical
arithmetic expression order, so both backends produce bit-identical
trajectories.  Used as the fallback when the compiled extension is not
available (or when CANTORBEAM_PURE=1).
"""

import numpy as np

BACKEND = "python"


def run_steps(kinds, h, p0, p1, p2, lam, state, i0, i1, traj=None):
    """Advance ``state`` (4 x m array) in place through steps i0 .. i1-1.

    kind 0 steps take one classical RK4 update of the first-order system
    (y, y', y'', v)' = (y', y'', v + lam*P*y, -lam*P*y') with P sampled at
    the step endpoints and midpoint; kind 1 steps use the exact
    constant-weight update (y'''' == 0 there, so the state advances along
    a cubic and v' = -lam*P*y' integrates exactly).

    When ``traj`` (n_nodes x 4 x m) is given, the state after step i is
    written to traj[i + 1].
    """
    m = state.shape[1]
    kinds_l = kinds.tolist()
    h_l = h.tolist()
    p0_l = p0.tolist()
    p1_l = p1.tolist()
    p2_l = p2.tolist()
    cols = [[state[0, c], state[1, c], state[2, c], state[3, c]] for c in range(m)]
    rows = [] if traj is not None else None

    for i in range(i0, i1):
        kind = kinds_l[i]
        hh = h_l[i]
        lp0 = lam * p0_l[i]
        if kind == 0:
            lp1 = lam * p1_l[i]
            lp2 = lam * p2_l[i]
            t = 0.5 * hh
            for col in cols:
                y, dy, d2y, v = col
                k1y = dy
                k1d = d2y
                k1s = v + lp0 * y
                k1v = -lp0 * dy
                y2 = y + t * k1y
                dy2 = dy + t * k1d
                d2y2 = d2y + t * k1s
                v2 = v + t * k1v
                k2y = dy2
                k2d = d2y2
                k2s = v2 + lp1 * y2
                k2v = -lp1 * dy2
                y3 = y + t * k2y
                dy3 = dy + t * k2d
                d2y3 = d2y + t * k2s
                v3 = v + t * k2v
                k3y = dy3
                k3d = d2y3
                k3s = v3 + lp1 * y3
                k3v = -lp1 * dy3
                y4 = y + hh * k3y
                dy4 = dy + hh * k3d
                d2y4 = d2y + hh * k3s
                v4 = v + hh * k3v
                k4y = dy4
                k4d = d2y4
                k4s = v4 + lp2 * y4
                k4v = -lp2 * dy4
                col[0] = y + hh * (k1y + 2.0 * (k2y + k3y) + k4y) / 6.0
                col[1] = dy + hh * (k1d + 2.0 * (k2d + k3d) + k4d) / 6.0
                col[2] = d2y + hh * (k1s + 2.0 * (k2s + k3s) + k4s) / 6.0
                col[3] = v + hh * (k1v + 2.0 * (k2v + k3v) + k4v) / 6.0
        else:
            hh2 = hh * hh
            for col in cols:
                y, dy, d2y, v = col
                third = v + lp0 * y
                yn = y + hh * dy + 0.5 * hh2 * d2y + hh2 * hh * third / 6.0
                col[0] = yn
                col[1] = dy + hh * d2y + 0.5 * hh2 * third
                col[2] = d2y + hh * third
                col[3] = third - lp0 * yn
        if rows is not None:
            rows.append([comp for col in cols for comp in col])

    for c in range(m):
        state[0, c], state[1, c], state[2, c], state[3, c] = cols[c]
    if rows is not None and rows:
        block = np.array(rows, dtype=np.float64).reshape(len(rows), m, 4)
        traj[i0 + 1 : i1 + 1] = np.swapaxes(block, 1, 2)
    return 0
