# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled stepping kernel.

Keep the arithmetic expression order in exact lockstep with
cantorbeam._kernel_py so the two backends produce bit-identical
trajectories (the extension is built with -ffp-contract=off for the same
reason).
"""

BACKEND = "cython"


def run_steps(const signed char[::1] kinds,
              const double[::1] h,
              const double[::1] p0,
              const double[::1] p1,
              const double[::1] p2,
              double lam,
              double[:, ::1] state,
              Py_ssize_t i0,
              Py_ssize_t i1,
              double[:, :, ::1] traj=None):
    """Advance ``state`` (4 x m) in place through steps i0 .. i1-1.

    Same contract as cantorbeam._kernel_py.run_steps.
    """
    cdef Py_ssize_t m = state.shape[1]
    cdef Py_ssize_t i, c
    cdef int kind
    cdef double hh, hh2, t, lp0, lp1, lp2
    cdef double y, dy, d2y, v
    cdef double k1y, k1d, k1s, k1v
    cdef double y2, dy2, d2y2, v2, k2y, k2d, k2s, k2v
    cdef double y3, dy3, d2y3, v3, k3y, k3d, k3s, k3v
    cdef double y4, dy4, d2y4, v4, k4y, k4d, k4s, k4v
    cdef double third, yn
    cdef bint want_traj = traj is not None

    for i in range(i0, i1):
        kind = kinds[i]
        hh = h[i]
        lp0 = lam * p0[i]
        if kind == 0:
            lp1 = lam * p1[i]
            lp2 = lam * p2[i]
            t = 0.5 * hh
            for c in range(m):
                y = state[0, c]
                dy = state[1, c]
                d2y = state[2, c]
                v = state[3, c]
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
                state[0, c] = y + hh * (k1y + 2.0 * (k2y + k3y) + k4y) / 6.0
                state[1, c] = dy + hh * (k1d + 2.0 * (k2d + k3d) + k4d) / 6.0
                state[2, c] = d2y + hh * (k1s + 2.0 * (k2s + k3s) + k4s) / 6.0
                state[3, c] = v + hh * (k1v + 2.0 * (k2v + k3v) + k4v) / 6.0
        else:
            hh2 = hh * hh
            for c in range(m):
                y = state[0, c]
                dy = state[1, c]
                d2y = state[2, c]
                v = state[3, c]
                third = v + lp0 * y
                yn = y + hh * dy + 0.5 * hh2 * d2y + hh2 * hh * third / 6.0
                state[0, c] = yn
                state[1, c] = dy + hh * d2y + 0.5 * hh2 * third
                state[2, c] = d2y + hh * third
                state[3, c] = third - lp0 * yn
        if want_traj:
            for c in range(m):
                traj[i + 1, 0, c] = state[0, c]
                traj[i + 1, 1, c] = state[1, c]
                traj[i + 1, 2, c] = state[2, c]
                traj[i + 1, 3, c] = state[3, c]
    return 0
