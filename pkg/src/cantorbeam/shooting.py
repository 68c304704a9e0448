"""Boundary conditions, characteristic determinant, and oscillation-indexed
eigenvalue location by shooting.

The two-parameter boundary family (alpha >= 0, beta > 0) pins two state
directions at x = 0; shooting propagates both across the grid and the
2x2 determinant of the right-boundary residuals vanishes exactly at the
eigenvalues.  Trajectories are re-orthonormalized periodically (the pair
collapses onto the dominant solution otherwise) and the determinant is
reported in sign/log form.  Every located root is certified by its
eigenfunction's zero count: the n-th eigenvalue's eigenfunction has
exactly n simple interior zeros and does not vanish at the endpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    CapError,
    CertificationError,
    ConfigError,
    DomainError,
    SolverError,
    ZeroCountAmbiguous,
)
from .measure import WeightParams
from .ode import (
    Grid,
    QuasiState,
    Trajectory,
    _run_blocks,
    build_grid,
    combine_pair,
    propagate,
)
from .zeros import count_sign_changes


@dataclass(frozen=True)
class BVPConfig:
    """Boundary parameters; the family requires alpha >= 0 and beta > 0."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha >= 0.0):
            raise ConfigError(f"alpha must be >= 0, got {self.alpha}")
        if not (self.beta > 0.0):
            raise ConfigError(f"beta must be > 0, got {self.beta}")


@dataclass(frozen=True)
class SolverOptions:
    """Knobs for grid resolution, scanning and certification."""

    generation: int = 10
    substeps: int = 4
    scan_ratio: float = 1.15
    tol: float = 1e-8
    lambda_min: float = 1e-3
    renorm_every: int = 64
    max_rescans: int = 3
    zero_resolution: float = 1e-12
    ambiguity: float = 1e-8
    endpoint_floor: float = 1e-6
    bidi_threshold: float = 1e-6
    hard_cap: float = 1e12
    max_nodes: int = 1 << 21


def left_basis(cfg: BVPConfig) -> tuple[QuasiState, QuasiState]:
    """Two independent states spanning the left boundary conditions.

    The left conditions give y''(0) = beta*y'(0) - alpha*y(0) and
    y'''(0) = (alpha/beta)*y''(0); P(0) = 0 so v(0) = y'''(0).
    """
    a, b = cfg.alpha, cfg.beta
    u1 = QuasiState(1.0, 0.0, -a, -a * a / b)
    u2 = QuasiState(0.0, 1.0, b, a)
    return u1, u2


def right_basis(cfg: BVPConfig, lam: float) -> tuple[QuasiState, QuasiState]:
    """Two independent states spanning the right boundary conditions.

    Mirror of left_basis: y''(1) = -alpha*y(1) - beta*y'(1) and
    y'''(1) = -(alpha/beta)*y''(1); P(1) = 1 so v(1) = y'''(1) - lam*y(1).
    """
    a, b = cfg.alpha, cfg.beta
    w1 = QuasiState(1.0, 0.0, -a, a * a / b - lam)
    w2 = QuasiState(0.0, 1.0, -b, a)
    return w1, w2


def right_residual(cfg: BVPConfig, lam: float, end: QuasiState) -> tuple[float, float]:
    """Right-boundary residuals (r1, r2) of an end state at x = 1.

    y'''(1) is recovered as v(1) + lam*y(1) since P(1) = 1.  r1 and r2
    vanish together exactly when the state satisfies both conditions.
    """
    y3 = end.v + lam * end.y
    r1 = end.d2y + cfg.alpha * end.y + cfg.beta * end.dy
    r2 = cfg.beta * y3 + cfg.alpha * end.d2y
    return r1, r2


@dataclass(frozen=True)
class CharDet:
    """Characteristic determinant in sign/log form."""

    sign: int
    log_mag: float


@dataclass(eq=False)
class _Shot:
    matrix: np.ndarray  # 2x2 right residuals of the orthonormalized pair
    rcum: np.ndarray  # cumulative upper-triangular renormalization factor
    log_det_r: float
    end: np.ndarray  # 4x2 end states


def _residual_matrix(cfg: BVPConfig, lam: float, end: np.ndarray) -> np.ndarray:
    m = np.empty((2, 2), dtype=np.float64)
    for c in range(2):
        r1, r2 = right_residual(cfg, lam, QuasiState.from_array(end[:, c]))
        m[0, c] = r1
        m[1, c] = r2
    return m


def _shoot(
    cfg: BVPConfig, w: WeightParams, lam: float, grid: Grid, renorm_every: int = 64
) -> _Shot:
    u1, u2 = left_basis(cfg)
    Y = np.column_stack([u1.as_array(), u2.as_array()]).copy()
    res = _run_blocks(
        grid, lam, Y, 0, grid.n_nodes - 1, renorm="gs", renorm_every=renorm_every
    )
    return _Shot(
        matrix=_residual_matrix(cfg, lam, res["Y"]),
        rcum=res["rcum"],
        log_det_r=res["log_det_r"],
        end=res["Y"],
    )


def char_det(
    cfg: BVPConfig,
    w: WeightParams,
    lam: float,
    grid: Grid,
    renorm_every: int = 64,
) -> CharDet:
    """Shooting determinant at lam; its zeros are exactly the eigenvalues.

    The reported magnitude is log |det| plus the accumulated log of the
    renormalization factors; the sign alone drives bracketing.
    """
    shot = _shoot(cfg, w, lam, grid, renorm_every)
    m = shot.matrix
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if det == 0.0:
        return CharDet(sign=0, log_mag=-math.inf)
    return CharDet(
        sign=1 if det > 0 else -1, log_mag=math.log(abs(det)) + shot.log_det_r
    )


@dataclass(eq=False)
class Eigenpair:
    """Certified eigenvalue with a representative real eigenfunction."""

    index: int
    lam: float
    trajectory: Trajectory | None
    zero_count: int
    det_residual: float
    rayleigh_gap: float
    config: BVPConfig | None = None
    weight: WeightParams | None = None


@dataclass(eq=False)
class SpectrumTable:
    """Contiguously indexed, certified eigenvalues for one configuration."""

    config: BVPConfig
    weight: WeightParams
    pairs: list[Eigenpair]
    options: SolverOptions
    lambda_cap: float
    scan_ratio_used: float

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([p.lam for p in self.pairs], dtype=np.float64)

    @property
    def max_index(self) -> int:
        return self.pairs[-1].index if self.pairs else -1

    def pair(self, n: int) -> Eigenpair:
        for p in self.pairs:
            if p.index == n:
                return p
        raise CapError(f"index {n} not present in this spectrum table")


def _solve_triu2(r: np.ndarray, c: np.ndarray) -> np.ndarray:
    w2 = c[1] / r[1, 1]
    w1 = (c[0] - r[0, 1] * w2) / r[0, 0]
    return np.array([w1, w2], dtype=np.float64)


def _combine(states: tuple[QuasiState, QuasiState], coef: np.ndarray) -> QuasiState:
    arr = coef[0] * states[0].as_array() + coef[1] * states[1].as_array()
    return QuasiState.from_array(arr)


def _null_direction(m: np.ndarray) -> np.ndarray:
    r0 = math.hypot(m[0, 0], m[0, 1])
    r1 = math.hypot(m[1, 0], m[1, 1])
    row = m[0] if r0 >= r1 else m[1]
    c = np.array([row[1], -row[0]], dtype=np.float64)
    n = math.hypot(c[0], c[1])
    if n == 0.0:
        # residual matrix vanished identically; any direction is a kernel one
        return np.array([1.0, 0.0])
    return c / n


def _residual_scales(cfg: BVPConfig, lam: float, traj: Trajectory) -> tuple[float, float]:
    # scales from trajectory-wide derivative magnitudes; the endpoint values
    # themselves cancel at a root and cannot serve as a yardstick
    sy = float(np.max(np.abs(traj.y)))
    sdy = float(np.max(np.abs(traj.dy)))
    sd2y = float(np.max(np.abs(traj.d2y)))
    sy3 = float(np.max(np.abs(traj.third_derivatives())))
    s1 = sd2y + cfg.alpha * sy + cfg.beta * sdy
    s2 = cfg.beta * sy3 + cfg.alpha * sd2y
    return max(s1, 1e-300), max(s2, 1e-300)


def _extract_forward(
    cfg: BVPConfig, w: WeightParams, lam: float, grid: Grid, opts: SolverOptions
) -> tuple[Trajectory, float]:
    """Forward eigenfunction: null direction mapped back through the
    cumulative renormalization factor, then one renormalized propagation.

    Returns the trajectory (sup-normalized) and the relative right-boundary
    residual, which measures contamination by the dominant solution.
    """
    shot = _shoot(cfg, w, lam, grid, opts.renorm_every)
    c = _null_direction(shot.matrix)
    coef = _solve_triu2(shot.rcum, c)
    coef /= np.max(np.abs(coef))
    s0 = _combine(left_basis(cfg), coef)
    traj = propagate(w, lam, s0, grid, renorm_every=opts.renorm_every)
    _normalize(traj)
    end = traj.state_at(grid.n_nodes - 1)
    r1, r2 = right_residual(cfg, lam, end)
    s1, s2 = _residual_scales(cfg, lam, traj)
    rel = max(abs(r1) / s1, abs(r2) / s2)
    return traj, rel


def _match_halves_at(
    cfg: BVPConfig, w: WeightParams, lam: float, grid: Grid, opts: SolverOptions, mid: int
) -> tuple[Trajectory, float]:
    last = grid.n_nodes - 1
    u = left_basis(cfg)
    YL = np.column_stack([u[0].as_array(), u[1].as_array()]).copy()
    resL = _run_blocks(
        grid, lam, YL, 0, mid, renorm="gs", renorm_every=opts.renorm_every, want_traj=True
    )
    r = right_basis(cfg, lam)
    YR = np.column_stack([r[0].as_array(), r[1].as_array()]).copy()
    resR = _run_blocks(
        grid, lam, YR, last, mid, renorm="gs", renorm_every=opts.renorm_every, want_traj=True
    )

    # compare state components on the problem's natural length scale so the
    # matching is not dominated by the highest derivative
    ell = lam ** -0.25 if lam > 0 else 1.0
    S = np.array([1.0, ell, ell * ell, ell * ell * ell])
    A = np.hstack([resL["Y"], -resR["Y"]]) * S[:, None]
    _, sv, vt = np.linalg.svd(A)
    c = vt[-1]
    mismatch = float(sv[-1] / max(sv[0], 1e-300))

    # both halves reconstructed from their own pair frames; the null vector
    # already aligns their scales at the matching node
    left = combine_pair(resL, c[:2])
    right = combine_pair(resR, c[2:])
    vl = left[-1] * S
    r0 = right[0] * S
    denom = float(r0 @ r0)
    if denom == 0.0:
        raise CertificationError("right half-shot vanished at the matching node")
    rho = float(vl @ r0) / denom
    states = np.vstack([left, right[1:] * rho])
    traj = Trajectory(grid=grid, states=states, lam=lam, scale_log=0.0, node_from=0)
    _normalize(traj)
    return traj, mismatch


def _extract_bidirectional(
    cfg: BVPConfig, w: WeightParams, lam: float, grid: Grid, opts: SolverOptions
) -> tuple[Trajectory, float]:
    """Eigenfunction by matching half-domain shots at an interior node.

    Forward-only extraction degrades once the dominant solution's growth
    amplifies rounding past the eigenfunction's scale; shooting the two
    halves toward the middle halves the growth exponent.  The matching
    node must stay away from the eigenfunction's zeros (odd-index
    eigenfunctions of symmetric configurations vanish exactly at 1/2), so
    candidate nodes are tried until |y(mid)| is healthy.
    """
    last = grid.n_nodes - 1
    best: tuple[float, Trajectory, float] | None = None
    for frac in (0.5, 0.45, 0.55, 0.40, 0.60):
        mid = min(max(grid.node_at(frac), 1), last - 1)
        traj, mismatch = _match_halves_at(cfg, w, lam, grid, opts, mid)
        ymid = abs(traj.states[mid, 0]) / max(float(np.max(np.abs(traj.y))), 1e-300)
        if best is None or ymid > best[0]:
            best = (ymid, traj, mismatch)
        if ymid >= 0.02:
            return traj, mismatch
    return best[1], best[2]


def _normalize(traj: Trajectory):
    m = float(np.max(np.abs(traj.states[:, 0])))
    if m > 0:
        traj.states /= m
    traj.scale_log = 0.0


def extract_eigenfunction(
    cfg: BVPConfig, w: WeightParams, lam: float, grid: Grid, opts: SolverOptions
) -> Trajectory:
    """Representative real eigenfunction at a located root (sup norm 1)."""
    traj, rel = _extract_forward(cfg, w, lam, grid, opts)
    if rel > opts.bidi_threshold:
        traj, mismatch = _extract_bidirectional(cfg, w, lam, grid, opts)
        if mismatch > 1e-3:
            raise CertificationError(
                f"half-shot matching failed at lam={lam!r}: mismatch {mismatch:.2e}"
            )
    return traj


def rayleigh_quotient(cfg: BVPConfig, w: WeightParams, traj: Trajectory) -> float:
    """Quadratic-form quotient of a sampled function.

    Numerator: integral of (y'')^2 dx by composite Simpson per elementary
    interval, plus the boundary form
    (|alpha*y(0) - beta*y'(0)|^2 + |alpha*y(1) + beta*y'(1)|^2) / beta.
    Denominator: integral of y^2 dP by midpoint quadrature at the grid's
    generation.
    """
    g = traj.grid
    if traj.node_from != 0 or traj.states.shape[0] != g.n_nodes:
        raise DomainError("rayleigh_quotient needs a full-span trajectory")
    d2sq = traj.d2y**2
    s = g.substeps
    num = 0.0
    for e in range(g.elem_first_step.shape[0]):
        f = int(g.elem_first_step[e])
        h = float(g.h[f])
        vals = d2sq[f : f + s + 1]
        num += _composite_simpson(vals, h)
    y = traj.y
    b0 = cfg.alpha * y[0] - cfg.beta * traj.dy[0]
    b1 = cfg.alpha * y[-1] + cfg.beta * traj.dy[-1]
    num += (b0 * b0 + b1 * b1) / cfg.beta

    den = 0.0
    cell_measure = 1.0 / w.kappa**g.generation
    for e in range(g.elem_first_step.shape[0]):
        if g.elem_is_gap[e]:
            continue
        f = int(g.elem_first_step[e])
        if s % 2 == 0:
            ym = y[f + s // 2]
        else:
            ym = 0.5 * (y[f + s // 2] + y[f + s // 2 + 1])
        den += ym * ym
    den *= cell_measure
    if den <= 0.0 or not np.isfinite(den):
        raise SolverError("function vanishes dP-a.e. at the quadrature resolution")
    return num / den


def _composite_simpson(vals: np.ndarray, h: float) -> float:
    n = len(vals) - 1
    if n == 1:
        return 0.5 * h * (vals[0] + vals[1])
    if n % 2 == 1:
        return _composite_simpson(vals[:-1], h) + 0.5 * h * (vals[-2] + vals[-1])
    acc = vals[0] + vals[-1] + 4.0 * np.sum(vals[1:-1:2]) + 2.0 * np.sum(vals[2:-2:2])
    return float(acc) * h / 3.0


def _zero_mode_pair(cfg: BVPConfig, w: WeightParams, grid: Grid, opts: SolverOptions) -> Eigenpair:
    traj = propagate(w, 0.0, QuasiState(1.0, 0.0, 0.0, 0.0), grid)
    rq = rayleigh_quotient(cfg, w, traj)
    return Eigenpair(
        index=0,
        lam=0.0,
        trajectory=traj,
        zero_count=0,
        det_residual=0.0,
        rayleigh_gap=abs(rq),
        config=cfg,
        weight=w,
    )


def _sign_at(cfg, w, grid, lam, opts) -> tuple[int, float]:
    cd = char_det(cfg, w, lam, grid, opts.renorm_every)
    if cd.sign == 0:
        lam = lam * (1.0 + 1e-9)
        cd = char_det(cfg, w, lam, grid, opts.renorm_every)
    return cd.sign, lam


def _merge_roots(roots: list[float], new: list[float], opts: SolverOptions) -> list[float]:
    sep = max(1e4 * opts.tol, 1e-6)
    fresh = [r for r in new if all(abs(r - known) / known >= sep for known in roots)]
    if not fresh:
        raise CertificationError("recovery only rediscovered already-located roots")
    return sorted(roots + fresh)


def _bisect(cfg, w, grid, opts, lo: float, hi: float, s_lo: int) -> float:
    for _ in range(300):
        mid = math.sqrt(lo * hi)
        if hi - lo <= opts.tol * mid:
            break
        s = char_det(cfg, w, mid, grid, opts.renorm_every).sign
        if s == 0:
            return mid
        if s == s_lo:
            lo = mid
        else:
            hi = mid
    return math.sqrt(lo * hi)


def _examine_root(
    cfg: BVPConfig,
    w: WeightParams,
    grid: Grid,
    lam: float,
    opts: SolverOptions,
) -> Eigenpair:
    """Extract and zero-count one root; index assigned by the caller."""
    shot = _shoot(cfg, w, lam, grid, opts.renorm_every)
    m = shot.matrix
    det_res = abs(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    traj = extract_eigenfunction(cfg, w, lam, grid, opts)
    y = traj.y
    sup = float(np.max(np.abs(y)))
    if abs(y[0]) < opts.endpoint_floor * sup or abs(y[-1]) < opts.endpoint_floor * sup:
        raise CertificationError(
            f"eigenfunction at lam={lam!r} vanishes at an endpoint "
            f"(|y(0)|={abs(y[0]):.2e}, |y(1)|={abs(y[-1]):.2e})"
        )
    zc = count_sign_changes(
        traj, resolution=opts.zero_resolution, ambiguity=opts.ambiguity
    )
    return Eigenpair(
        index=-1,
        lam=lam,
        trajectory=traj,
        zero_count=zc,
        det_residual=det_res,
        rayleigh_gap=math.nan,
        config=cfg,
        weight=w,
    )


def _local_dip(cfg, w, grid, opts, a: float, b: float) -> float:
    """Golden-section minimizer of log|det| over log-lam inside (a, b);
    the window must already isolate a single dip."""
    la, lb = math.log(a), math.log(b)
    invphi = (math.sqrt(5.0) - 1.0) / 2.0

    def f(x: float) -> float:
        return char_det(cfg, w, math.exp(x), grid, opts.renorm_every).log_mag

    x1 = lb - invphi * (lb - la)
    x2 = la + invphi * (lb - la)
    f1, f2 = f(x1), f(x2)
    for _ in range(80):
        if lb - la < 1e-12:
            break
        if f1 <= f2:
            lb, x2, f2 = x2, x1, f1
            x1 = lb - invphi * (lb - la)
            f1 = f(x1)
        else:
            la, x1, f1 = x1, x2, f2
            x2 = la + invphi * (lb - la)
            f2 = f(x2)
    return math.exp(0.5 * (la + lb))


def _recover_window(cfg, w, grid, opts, lo, s_lo, hi, s_hi, samples=None) -> list[float]:
    """Roots inside (lo, hi) that left no net sign change over the window.

    A geometric prescan of the determinant either exposes the crossings
    directly, or localizes interior magnitude dips (a near-degenerate pair
    pinches |det| between its two roots).  Each dip is refined within its
    neighbor samples and accepted only when the sign actually flips there,
    so windows with an odd root count cannot fabricate duplicates.
    """
    if samples is None:
        # aim for ~0.4% relative spacing; the paired eigenvalues seen at
        # desk scale sit 1..10% apart
        samples = int(math.log(hi / lo) / 0.004) + 2
        samples = min(768, max(64, samples))
    lams = np.exp(np.linspace(math.log(lo), math.log(hi), samples))
    lams[0] = lo
    lams[-1] = hi
    signs = np.empty(samples, dtype=np.int64)
    logm = np.empty(samples, dtype=np.float64)
    signs[0], signs[-1] = s_lo, s_hi
    logm[0] = logm[-1] = math.inf
    for i in range(1, samples - 1):
        cd = char_det(cfg, w, lams[i], grid, opts.renorm_every)
        signs[i] = cd.sign
        logm[i] = cd.log_mag

    found: list[float] = []
    for i in range(samples - 1):
        if signs[i] != 0 and signs[i + 1] != 0 and signs[i] != signs[i + 1]:
            found.append(
                _bisect(cfg, w, grid, opts, lams[i], lams[i + 1], signs[i])
            )
    if found:
        return found

    # no sampled crossings: probe interior dips, deepest first
    dips = [
        i
        for i in range(1, samples - 1)
        if logm[i] < logm[i - 1] and logm[i] < logm[i + 1]
    ]
    dips.sort(key=lambda i: logm[i])
    for i in dips[:4]:
        dip = _local_dip(cfg, w, grid, opts, lams[i - 1], lams[i + 1])
        s_dip, dip = _sign_at(cfg, w, grid, dip, opts)
        if s_dip == 0 or s_dip == signs[i - 1]:
            continue
        found.append(_bisect(cfg, w, grid, opts, lams[i - 1], dip, signs[i - 1]))
        found.append(_bisect(cfg, w, grid, opts, dip, lams[i + 1], s_dip))
        return found
    return []


def _recover_between(cfg, w, grid, opts, a: float, b: float) -> list[float]:
    """Locate roots inside (a, b) missed by the sign scan."""
    eps = max(1e4 * opts.tol, 1e-8)
    lo = a * (1.0 + eps)
    hi = b * (1.0 - eps)
    if not lo < hi:
        raise CertificationError(f"no room to recover roots in ({a!r}, {b!r})")
    s_lo, lo = _sign_at(cfg, w, grid, lo, opts)
    s_hi, hi = _sign_at(cfg, w, grid, hi, opts)
    found = _recover_window(cfg, w, grid, opts, lo, s_lo, hi, s_hi)
    sep = max(5.0 * eps, 1e-6)
    kept = [r for r in found if min(abs(r - a) / a, abs(r - b) / b) >= sep]
    if not kept:
        raise CertificationError(
            f"could not separate the eigenvalue pair hiding in ({a:g}, {b:g})"
        )
    return kept


def _certified_roots(
    cfg: BVPConfig,
    w: WeightParams,
    grid: Grid,
    opts: SolverOptions,
    ratio: float,
    offset: int,
    n_cap: int | None,
    lam_cap: float | None,
) -> list[Eigenpair]:
    """Locate and certify positive eigenvalues with contiguous indices.

    Brackets are hunted incrementally along a geometric scan and each root
    is certified by its zero count as soon as it is found, which keeps the
    recovery windows for scan-invisible pairs narrow.  For an eigenvalue
    cap the tail up to the cap is certified either by the first root above
    it or by a dense determinant sweep when the scan shows no sign change
    near the cap (clustered pairs leave none).
    """
    examined: dict[float, Eigenpair] = {}
    roots: list[float] = []

    def ep_of(lam: float) -> Eigenpair:
        ep = examined.get(lam)
        if ep is None:
            ep = _examine_root(cfg, w, grid, lam, opts)
            examined[lam] = ep
        return ep

    def settle():
        """Recover scan-invisible roots until counts are contiguous."""
        nonlocal roots
        for _ in range(64):
            insertion = None
            for i, lam in enumerate(roots):
                n = offset + i
                ep = ep_of(lam)
                if ep.zero_count == n:
                    continue
                if ep.zero_count > n:
                    lo = roots[i - 1] if i > 0 else opts.lambda_min
                    insertion = _recover_between(cfg, w, grid, opts, lo, lam)
                    break
                raise CertificationError(
                    f"zero count {ep.zero_count} at lam={lam!r} is below its "
                    f"scan position {n}; spurious bracket"
                )
            if insertion is None:
                return
            roots = _merge_roots(roots, insertion, opts)
        raise CertificationError("pair recovery did not converge")

    def done() -> bool:
        if n_cap is not None:
            return len(roots) >= n_cap + 1 - offset
        return bool(roots) and roots[-1] > lam_cap

    cursor = opts.lambda_min
    s_cursor, cursor = _sign_at(cfg, w, grid, cursor, opts)
    tail_swept = False
    while True:
        settle()
        if done():
            break
        # hunt the next visible sign change
        bracket = None
        while bracket is None:
            nxt = cursor * ratio
            s_nxt, nxt = _sign_at(cfg, w, grid, nxt, opts)
            if s_nxt != 0 and s_cursor != 0 and s_nxt != s_cursor:
                bracket = (cursor, nxt, s_cursor)
            cursor = nxt
            if s_nxt != 0:
                s_cursor = s_nxt
            if bracket is not None:
                break
            if lam_cap is not None and cursor > 4.0 * lam_cap:
                break
            if cursor > opts.hard_cap:
                if n_cap is not None:
                    raise SolverError(
                        f"bracket exhaustion below hard cap {opts.hard_cap:g} "
                        f"while hunting index {offset + len(roots)}"
                    )
                break
        if bracket is not None:
            roots = _merge_roots(
                roots, [_bisect(cfg, w, grid, opts, *bracket)], opts
            )
            continue
        # no visible bracket near the cap: sweep the tail densely for
        # clustered pairs, then stop once it comes back clean
        if tail_swept:
            break
        lo = roots[-1] if roots else opts.lambda_min
        hi = (lam_cap if lam_cap is not None else opts.hard_cap) * 1.02
        eps = max(1e4 * opts.tol, 1e-8)
        lo_probe = lo * (1.0 + eps)
        s_lo, lo_probe = _sign_at(cfg, w, grid, lo_probe, opts)
        s_hi, hi_probe = _sign_at(cfg, w, grid, hi, opts)
        found = _recover_window(cfg, w, grid, opts, lo_probe, s_lo, hi_probe, s_hi)
        kept = [r for r in found if abs(r - lo) / lo >= max(5.0 * eps, 1e-6)]
        if not kept:
            tail_swept = True
            continue
        roots = _merge_roots(roots, kept, opts)

    out = []
    for i, lam in enumerate(roots):
        n = offset + i
        if n_cap is not None and n > n_cap:
            break
        if lam_cap is not None and lam > lam_cap:
            break
        ep = examined[lam]
        ep.index = n
        rq = rayleigh_quotient(cfg, w, ep.trajectory)
        ep.rayleigh_gap = abs(rq - lam) / max(abs(lam), 1e-300)
        out.append(ep)
    return out


def spectrum(
    cfg: BVPConfig,
    w: WeightParams,
    *,
    n_max: int | None = None,
    lambda_max: float | None = None,
    options: SolverOptions | None = None,
) -> SpectrumTable:
    """All certified eigenpairs up to an index or eigenvalue cap.

    Eigenvalues are bracketed by the sign changes of the characteristic
    determinant along a geometric scan and refined by bisection.  Every
    root is certified by the zero count of its eigenfunction; count gaps
    reveal pairs the scan stepped over (the spectrum clusters into near
    pairs at large lam) and those are recovered by a determinant-dip
    search before falling back to a full rescan at ratio sqrt(r).
    """
    if (n_max is None) == (lambda_max is None):
        raise ConfigError("specify exactly one of n_max / lambda_max")
    if n_max is not None and n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    if lambda_max is not None and not (lambda_max > 0):
        raise DomainError(f"lambda_max must be > 0, got {lambda_max}")
    opts = options or SolverOptions()
    grid = build_grid(w, opts.generation, opts.substeps, opts.max_nodes)
    offset = 1 if cfg.alpha == 0.0 else 0

    ratio = opts.scan_ratio
    last_err: Exception | None = None
    for _ in range(opts.max_rescans + 1):
        try:
            pairs: list[Eigenpair] = []
            if cfg.alpha == 0.0:
                pairs.append(_zero_mode_pair(cfg, w, grid, opts))
            if n_max is None or n_max + 1 - offset > 0:
                pairs.extend(
                    _certified_roots(
                        cfg, w, grid, opts, ratio, offset, n_max, lambda_max
                    )
                )
            lams = [p.lam for p in pairs]
            if any(lams[i] >= lams[i + 1] for i in range(len(lams) - 1)):
                raise CertificationError("located eigenvalues are not strictly increasing")
            if n_max is not None and pairs and pairs[-1].index < n_max:
                raise CertificationError(
                    f"requested index {n_max} not reached (got {pairs[-1].index})"
                )
            cap = lambda_max if lambda_max is not None else (lams[-1] if lams else 0.0)
            return SpectrumTable(
                config=cfg,
                weight=w,
                pairs=pairs,
                options=opts,
                lambda_cap=cap,
                scan_ratio_used=ratio,
            )
        except (CertificationError, ZeroCountAmbiguous) as err:
            last_err = err
            ratio = math.sqrt(ratio)
    raise CertificationError(
        f"spectrum certification failed after {opts.max_rescans} rescans: {last_err}"
    )


def locate_eigenvalue(
    cfg: BVPConfig,
    w: WeightParams,
    n: int,
    options: SolverOptions | None = None,
) -> Eigenpair:
    """Locate and certify the n-th eigenvalue of one configuration.

    For alpha = 0 the kernel is the constants, so index 0 is the exact
    zero mode with a constant eigenfunction.  Certification of index n
    requires the whole contiguous sequence below it, so this solves the
    spectrum up to n and returns the last pair.
    """
    if n < 0:
        raise DomainError(f"index must be >= 0, got {n}")
    table = spectrum(cfg, w, n_max=n, options=options)
    return table.pair(n)
