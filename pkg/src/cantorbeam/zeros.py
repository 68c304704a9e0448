"""Zero counting for sampled solutions.

Between consecutive nodes the solution is replaced by the cubic Hermite
interpolant of (y, y') at the two endpoints.  On gap steps the true
solution is itself a cubic, so the interpolant is exact there; on cell
steps it is accurate to O(h^4) and the cells are tiny.  Roots are counted
per step on the half-open interval (0, h], so a zero landing exactly on a
node is counted once.

Counts assume simple, separated zeros; sampled patterns that cannot be
resolved at the grid scale (touches, near-double roots, zeros at the
domain ends) raise ZeroCountAmbiguous instead of guessing.
"""

from __future__ import annotations

import numpy as np

from .errors import ZeroCountAmbiguous

HERMITE_SWING = 4.0 / 27.0  # max |t(1-t)^2| on [0,1]


def _hermite_coeffs(h, y0, d0, y1, d1):
    """Coefficients (c0, c1, c2, c3) of the Hermite cubic on [0, h]."""
    dy = y1 - y0
    c2 = (3.0 * dy - h * (2.0 * d0 + d1)) / (h * h)
    c3 = (-2.0 * dy + h * (d0 + d1)) / (h * h * h)
    return y0, d0, c2, c3


def _interior_criticals(c1, c2, c3, h):
    """Critical points of the cubic strictly inside (0, h)."""
    eps = 1e-12 * h
    out = []
    if abs(c3) * h > 1e-300:
        # p' = c1 + 2 c2 t + 3 c3 t^2
        aa, bb, cc = 3.0 * c3, 2.0 * c2, c1
        disc = bb * bb - 4.0 * aa * cc
        if disc > 0.0:
            sq = np.sqrt(disc)
            q = -0.5 * (bb + np.copysign(sq, bb)) if bb != 0.0 else 0.5 * sq
            roots = []
            if q != 0.0:
                roots = [q / aa, cc / q]
            else:
                roots = [0.0]
            out = [t for t in roots if eps < t < h - eps]
    elif abs(c2) > 0.0:
        t = -c1 / (2.0 * c2)
        if eps < t < h - eps:
            out = [t]
    return sorted(out)


def _eval_cubic(c0, c1, c2, c3, t):
    return ((c3 * t + c2) * t + c1) * t + c0


def _step_partition_values(h, y0, d0, y1, d1):
    """Values of the step's Hermite cubic at 0, interior criticals, h."""
    c0, c1, c2, c3 = _hermite_coeffs(h, y0, d0, y1, d1)
    crits = _interior_criticals(c1, c2, c3, h)
    vals = [y0] + [_eval_cubic(c0, c1, c2, c3, t) for t in crits] + [y1]
    return vals


def _count_definite_step(vals, ztol, atol, where):
    """Sign changes along a monotone partition with definite endpoints."""
    count = 0
    prev = vals[0]
    for v in vals[1:-1]:
        if abs(v) <= atol:
            raise ZeroCountAmbiguous(
                f"near-tangent extremum at {where} is below the ambiguity threshold"
            )
        if (v > 0.0) != (prev > 0.0):
            count += 1
        prev = v
    v = vals[-1]
    if (v > 0.0) != (prev > 0.0):
        count += 1
    return count


def count_zero_crossings(
    h: np.ndarray,
    y: np.ndarray,
    dy: np.ndarray,
    *,
    resolution: float = 1e-12,
    ambiguity: float = 1e-8,
) -> int:
    """Number of zeros of the sampled solution on the open span interior.

    ``h`` holds the step widths (len n), ``y``/``dy`` the node samples
    (len n+1).  Zeros within ``resolution * max|y|`` of the domain ends are
    rejected as ambiguous (certified eigenfunctions never vanish there).
    """
    n = len(h)
    scale = float(np.max(np.abs(y)))
    if scale == 0.0:
        raise ZeroCountAmbiguous("identically zero sample")
    ztol = resolution * scale
    atol = ambiguity * scale
    hs = np.abs(np.asarray(h, dtype=np.float64))

    # nodes whose values cannot be trusted to carry a sign
    unresolved = np.abs(y) <= atol
    if unresolved[0] or unresolved[-1]:
        raise ZeroCountAmbiguous("sample is unresolved at a domain endpoint")

    count = 0

    # runs of unresolved nodes count as one crossing when the definite
    # signs on the two sides differ; equal signs are an unresolvable touch
    i = 1
    run_steps: set[int] = set()
    while i < n:
        if not unresolved[i]:
            i += 1
            continue
        j = i
        while j < n and unresolved[j]:
            j += 1
        left, right = i - 1, j  # definite nodes bounding the run
        s_left = y[left] > 0.0
        s_right = y[right] > 0.0
        for k in range(left, right):
            run_steps.add(k)
        # the flanking steps must not hide crossings of their own
        vals_l = _step_partition_values(hs[left], y[left], dy[left], y[i], dy[i])
        for v in vals_l[1:-1]:
            if abs(v) <= atol or (v > 0.0) != s_left:
                raise ZeroCountAmbiguous(f"unresolved crossing beside node run at {i}")
        vals_r = _step_partition_values(
            hs[right - 1], y[j - 1], dy[j - 1], y[right], dy[right]
        )
        for v in vals_r[1:-1]:
            if abs(v) <= atol or (v > 0.0) != s_right:
                raise ZeroCountAmbiguous(f"unresolved crossing beside node run at {i}")
        if j - i > 2:
            raise ZeroCountAmbiguous(f"{j - i} consecutive unresolved nodes from {i}")
        if s_left == s_right:
            raise ZeroCountAmbiguous(f"touch at node {i} cannot be resolved")
        count += 1
        i = j + 1

    # steps with definite endpoints; cheap swing bound filters out the bulk
    ya = y[:-1]
    yb = y[1:]
    same = (ya > 0.0) == (yb > 0.0)
    swing = HERMITE_SWING * hs * (np.abs(dy[:-1]) + np.abs(dy[1:]))
    margin = np.minimum(np.abs(ya), np.abs(yb)) - swing
    needs_look = ~(same & (margin > atol))

    for k in np.nonzero(needs_look)[0]:
        if k in run_steps or unresolved[k] or unresolved[k + 1]:
            continue
        vals = _step_partition_values(hs[k], y[k], dy[k], y[k + 1], dy[k + 1])
        count += _count_definite_step(vals, ztol, atol, f"step {k}")

    return count


def count_sign_changes(traj, *, resolution: float = 1e-12, ambiguity: float = 1e-8) -> int:
    """Zeros of a trajectory's y over the open interval between its ends."""
    g = traj.grid
    lo = traj.node_from
    hi = lo + traj.states.shape[0] - 1
    return count_zero_crossings(
        g.h[lo:hi],
        traj.states[:, 0],
        traj.states[:, 1],
        resolution=resolution,
        ambiguity=ambiguity,
    )
