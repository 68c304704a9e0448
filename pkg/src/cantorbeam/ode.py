"""First-order quasi-derivative form of y'''' = lam * y * dP and its
integration over measure-adapted grids.

State layout is (y, y', y'', v) with v = y''' - lam*P(x)*y; v is the
combination that stays continuously differentiable across the singular
weight.  Grids resolve the cell/gap structure of the weight at a chosen
generation: on gaps P is constant, y'''' vanishes and the update is an
exact cubic Taylor step; on cells a fixed-step classical RK4 is used with
P sampled at full precision at the stage points.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._kernel import run_steps
from .errors import DomainError, OverflowAtNode, ResourceError
from .measure import WeightParams, decompose, p_eval

MAX_NODES_DEFAULT = 1 << 21


@dataclass(frozen=True)
class QuasiState:
    """Quasi-derivative state (y, y', y'', v) with v = y''' - lam*P*y."""

    y: float
    dy: float
    d2y: float
    v: float

    def as_array(self) -> np.ndarray:
        return np.array([self.y, self.dy, self.d2y, self.v], dtype=np.float64)

    @classmethod
    def from_array(cls, arr) -> "QuasiState":
        return cls(float(arr[0]), float(arr[1]), float(arr[2]), float(arr[3]))

    def third_derivative(self, w: WeightParams, lam: float, x) -> float:
        """Classical y''' recovered as v + lam*P(x)*y."""
        return self.v + lam * p_eval(w, x) * self.y


def system_rhs(w: WeightParams, lam: float, x, s: QuasiState) -> QuasiState:
    """Right-hand side of the first-order system; its trace is zero."""
    p = p_eval(w, x)
    return QuasiState(s.dy, s.d2y, s.v + lam * p * s.y, -lam * p * s.dy)


@dataclass(frozen=True, eq=False)
class Grid:
    """Measure-adapted integration grid.

    Nodes contain every cell/gap boundary of the chosen generation, with
    each elementary interval split into ``substeps`` equal steps.  Per-step
    weight samples (left/mid/right stage points) are precomputed exactly
    so the hot loop never re-evaluates P.
    """

    w: WeightParams
    generation: int
    substeps: int
    nodes: np.ndarray  # (n_nodes,)
    kinds: np.ndarray  # (n_steps,) int8; 0 = cell step (RK4), 1 = gap step (exact)
    h: np.ndarray  # (n_steps,)
    p_left: np.ndarray
    p_mid: np.ndarray
    p_right: np.ndarray
    p_nodes: np.ndarray  # (n_nodes,)
    elem_first_step: np.ndarray  # (n_elems,) first step index of each elementary interval
    elem_is_gap: np.ndarray  # (n_elems,) bool

    @property
    def n_steps(self) -> int:
        return self.kinds.shape[0]

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    def node_at(self, x: float) -> int:
        """Index of the grid node closest to x."""
        i = int(np.searchsorted(self.nodes, x))
        if i == 0:
            return 0
        if i >= self.n_nodes:
            return self.n_nodes - 1
        return i if self.nodes[i] - x < x - self.nodes[i - 1] else i - 1


_GRID_CACHE: dict[tuple[WeightParams, int, int], Grid] = {}


def build_grid(
    w: WeightParams,
    generation: int,
    substeps: int,
    max_nodes: int = MAX_NODES_DEFAULT,
) -> Grid:
    """Build (and cache) the generation-level grid with uniform substeps."""
    if generation < 1:
        raise DomainError(f"generation must be >= 1, got {generation}")
    if substeps < 1:
        raise DomainError(f"substeps must be >= 1, got {substeps}")
    key = (w, generation, substeps)
    cached = _GRID_CACHE.get(key)
    if cached is not None:
        return cached

    n_cells = w.kappa**generation
    n_elems = 2 * n_cells - 1
    n_steps = n_elems * substeps
    if n_steps + 1 > max_nodes:
        raise ResourceError(f"grid would need {n_steps + 1} nodes, cap is {max_nodes}")

    dec = decompose(w, generation, max_cells=max_nodes)
    elems: list[tuple[Fraction, Fraction, bool, Fraction | None]] = []
    for i, (lo, hi) in enumerate(dec.cells):
        elems.append((lo, hi, False, None))
        if i < len(dec.gaps):
            glo, ghi, pval = dec.gaps[i]
            elems.append((glo, ghi, True, pval))

    nodes = np.empty(n_steps + 1, dtype=np.float64)
    kinds = np.empty(n_steps, dtype=np.int8)
    h = np.empty(n_steps, dtype=np.float64)
    p_left = np.empty(n_steps, dtype=np.float64)
    p_mid = np.empty(n_steps, dtype=np.float64)
    p_right = np.empty(n_steps, dtype=np.float64)
    p_nodes = np.empty(n_steps + 1, dtype=np.float64)
    elem_first_step = np.empty(n_elems, dtype=np.int64)
    elem_is_gap = np.empty(n_elems, dtype=bool)

    step = 0
    for e, (lo, hi, is_gap, pval) in enumerate(elems):
        elem_first_step[e] = step
        elem_is_gap[e] = is_gap
        d = (hi - lo) / substeps
        hf = float(d)
        for j in range(substeps):
            xl = lo + j * d
            nodes[step] = float(xl)
            kinds[step] = 1 if is_gap else 0
            h[step] = hf
            if is_gap:
                pv = float(pval)
                p_left[step] = pv
                p_mid[step] = pv
                p_right[step] = pv
                p_nodes[step] = pv
            else:
                p_left[step] = p_eval(w, xl)
                p_mid[step] = p_eval(w, xl + d / 2)
                p_right[step] = p_eval(w, xl + d)
                p_nodes[step] = p_left[step]
            step += 1
    nodes[n_steps] = 1.0
    p_nodes[n_steps] = 1.0
    # node shared between a gap and the next cell carries the gap's value;
    # both agree because P is continuous, but recompute cell starts exactly
    for e, (lo, hi, is_gap, pval) in enumerate(elems):
        if not is_gap:
            p_nodes[elem_first_step[e]] = p_eval(w, lo)

    grid = Grid(
        w=w,
        generation=generation,
        substeps=substeps,
        nodes=nodes,
        kinds=kinds,
        h=h,
        p_left=p_left,
        p_mid=p_mid,
        p_right=p_right,
        p_nodes=p_nodes,
        elem_first_step=elem_first_step,
        elem_is_gap=elem_is_gap,
    )
    _GRID_CACHE[key] = grid
    return grid


@dataclass(eq=False)
class Trajectory:
    """Sampled evolution of a quasi-derivative state over grid nodes.

    ``states`` has one row (y, y', y'', v) per covered node, all at a
    common scale; the represented solution is states * exp(scale_log).
    """

    grid: Grid
    states: np.ndarray  # (n_covered, 4)
    lam: float
    scale_log: float = 0.0
    node_from: int = 0  # first covered grid node

    @property
    def y(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def dy(self) -> np.ndarray:
        return self.states[:, 1]

    @property
    def d2y(self) -> np.ndarray:
        return self.states[:, 2]

    @property
    def v(self) -> np.ndarray:
        return self.states[:, 3]

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.nodes[self.node_from : self.node_from + self.states.shape[0]]

    def third_derivatives(self) -> np.ndarray:
        p = self.grid.p_nodes[self.node_from : self.node_from + self.states.shape[0]]
        return self.states[:, 3] + self.lam * p * self.states[:, 0]

    def state_at(self, i: int) -> QuasiState:
        return QuasiState.from_array(self.states[i - self.node_from])


def _check_finite(Y: np.ndarray, node: int):
    if not np.isfinite(Y).all():
        raise OverflowAtNode(node)


def _run_blocks(
    grid: Grid,
    lam: float,
    Y: np.ndarray,
    node_from: int,
    node_to: int,
    renorm: str = "none",
    renorm_every: int = 0,
    want_traj: bool = False,
):
    """Propagate state columns Y (4 x m) from node_from to node_to.

    Handles both directions; ``renorm`` is applied between blocks of
    ``renorm_every`` steps:

    * "none":   caller owns overflow handling (OverflowAtNode raised).
    * "scalar": joint rescale of all columns by 1/max-abs, log tracked.
    * "gs":     Gram-Schmidt orthonormalization of the columns with
                positive-diagonal R; the cumulative R (max-normalized) and
                the accumulated log-determinant are returned.  Needed by
                shooting: joint scalar rescaling alone leaves the columns
                nearly colinear at large lam, which destroys the sign of
                the boundary determinant.  Each renormalization event is
                recorded so a chosen column combination can be
                reconstructed along the whole span (see combine_pair).

    Trajectory arrays are span-local: row j holds the state after j kernel
    steps from node_from.  For scalar renormalization the rows are rebased
    to a single scale and flipped to ascending node order before return;
    for "gs" the raw frames plus the event list are returned instead.
    """
    reverse = node_to < node_from
    lo, hi = (node_to, node_from) if reverse else (node_from, node_to)
    n_span = hi - lo
    m = Y.shape[1]

    sl = slice(lo, hi)
    if reverse:
        kinds = np.ascontiguousarray(grid.kinds[sl][::-1])
        h = np.ascontiguousarray(-grid.h[sl][::-1])
        pa = np.ascontiguousarray(grid.p_right[sl][::-1])
        pb = np.ascontiguousarray(grid.p_mid[sl][::-1])
        pc = np.ascontiguousarray(grid.p_left[sl][::-1])
    else:
        kinds = grid.kinds[sl]
        h = grid.h[sl]
        pa = grid.p_left[sl]
        pb = grid.p_mid[sl]
        pc = grid.p_right[sl]

    traj = np.empty((n_span + 1, 4, m), dtype=np.float64) if want_traj else None
    node_logs = np.zeros(n_span + 1, dtype=np.float64) if want_traj else None
    if want_traj:
        traj[0] = Y

    scale_log = 0.0
    gs = renorm == "gs"
    scalar = renorm == "scalar"
    rcum = np.eye(m, dtype=np.float64) if gs else None
    events: list[tuple[int, np.ndarray]] = []
    log_det_r = 0.0
    block = renorm_every if renorm_every and renorm_every > 0 else max(n_span, 1)
    pos = 0
    while pos < n_span:
        end = min(pos + block, n_span)
        run_steps(kinds, h, pa, pb, pc, lam, Y, pos, end, traj)
        _check_finite(Y, hi - end if reverse else lo + end)
        if want_traj:
            node_logs[pos + 1 : end + 1] = scale_log
        if end < n_span:
            if scalar:
                s = float(np.max(np.abs(Y)))
                if s > 0.0 and s != 1.0:
                    Y /= s
                    scale_log += np.log(s)
            elif gs:
                q, r = np.linalg.qr(Y)
                sgn = np.sign(np.diag(r))
                sgn[sgn == 0] = 1.0
                q *= sgn
                r *= sgn[:, None]
                Y[...] = q
                log_det_r += float(np.sum(np.log(np.abs(np.diag(r)))))
                rcum = r @ rcum
                rmax = float(np.max(np.abs(rcum)))
                if rmax > 0:
                    rcum /= rmax
                if want_traj:
                    events.append((end, r.copy()))
        pos = end

    out = {
        "Y": Y,
        "scale_log": scale_log,
        "log_det_r": log_det_r,
        "rcum": rcum,
        "reverse": reverse,
        "node_lo": lo,
    }
    if want_traj:
        if gs:
            out["frames"] = traj
            out["events"] = events
        else:
            states = traj
            if reverse:
                states = states[::-1]
                node_logs = node_logs[::-1]
            top = float(node_logs.max())
            if node_logs.min() != top:
                states = states * np.exp(node_logs - top)[:, None, None]
            else:
                states = states.copy()
            out["states"] = states
            out["traj_scale_log"] = top
    return out


def combine_pair(res: dict, coeffs: np.ndarray) -> np.ndarray:
    """Reconstruct one solution from a GS-renormalized pair propagation.

    ``coeffs`` selects the combination in the final frame (the frame of
    res["Y"]); walking the renormalization events backwards maps it into
    each earlier frame, so the returned samples sit on one common scale
    across the whole span without ever re-propagating (re-propagation of a
    strongly canceling combination re-injects the dominant solution).

    Rows are returned in ascending node order.
    """
    frames = res["frames"]
    cvec = np.asarray(coeffs, dtype=np.float64).copy()
    n = frames.shape[0]
    out = np.empty((n, 4), dtype=np.float64)
    upper = n
    for node_e, r in reversed(res["events"]):
        out[node_e + 1 : upper] = frames[node_e + 1 : upper] @ cvec
        # frame before the event: coefficients pick up R^{-1}
        c1 = cvec[1] / r[1, 1]
        c0 = (cvec[0] - r[0, 1] * c1) / r[0, 0]
        cvec = np.array([c0, c1])
        upper = node_e + 1
    out[:upper] = frames[:upper] @ cvec
    if res["reverse"]:
        out = out[::-1].copy()
    return out


def propagate(
    w: WeightParams,
    lam: float,
    s0: QuasiState,
    grid: Grid,
    *,
    renorm_every: int = 0,
    node_from: int = 0,
    node_to: int | None = None,
) -> Trajectory:
    """Integrate one state across the grid and sample it at every node.

    By default no renormalization is performed: a non-finite state raises
    OverflowAtNode and rescaling is the caller's responsibility.  Passing
    ``renorm_every`` > 0 enables joint scalar renormalization; the returned
    trajectory is rebased to a single scale with the accumulated exponent
    in ``scale_log``.  ``node_from`` > ``node_to`` integrates backward; the
    returned trajectory always covers nodes in ascending order.
    """
    if node_to is None:
        node_to = grid.n_nodes - 1
    if not (0 <= node_from < grid.n_nodes) or not (0 <= node_to < grid.n_nodes):
        raise DomainError("node range outside grid")
    if node_from == node_to:
        raise DomainError("empty propagation range")
    Y = s0.as_array().reshape(4, 1).copy()
    res = _run_blocks(
        grid,
        lam,
        Y,
        node_from,
        node_to,
        renorm="scalar" if renorm_every else "none",
        renorm_every=renorm_every,
        want_traj=True,
    )
    return Trajectory(
        grid=grid,
        states=res["states"][:, :, 0],
        lam=lam,
        scale_log=res["traj_scale_log"],
        node_from=min(node_from, node_to),
    )


def propagate_matrix(
    w: WeightParams,
    lam: float,
    Y0: np.ndarray,
    grid: Grid,
    *,
    node_from: int = 0,
    node_to: int | None = None,
) -> np.ndarray:
    """Propagate several state columns at once (no renormalization)."""
    if node_to is None:
        node_to = grid.n_nodes - 1
    Y = np.array(Y0, dtype=np.float64, order="C", copy=True)
    res = _run_blocks(grid, lam, Y, node_from, node_to, renorm="none")
    return res["Y"]


def fundamental_determinant(
    w: WeightParams,
    lam: float,
    grid: Grid,
    renorm_every: int = 64,
) -> float:
    """Determinant of the end-state matrix of the four canonical unit states.

    The system matrix is trace-free, so the exact value is 1 for every lam;
    the deviation measures the integrator's volume error.  Computed with
    QR renormalization so the answer stays well conditioned at large lam.
    """
    Y = np.eye(4, dtype=np.float64)
    res = _run_blocks(
        grid, lam, Y, 0, grid.n_nodes - 1, renorm="gs", renorm_every=renorm_every
    )
    sign, logabs = np.linalg.slogdet(res["Y"])
    if sign == 0:
        return 0.0
    return float(sign * np.exp(logabs + res["log_det_r"]))
