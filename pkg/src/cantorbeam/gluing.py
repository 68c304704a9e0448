"""Eigenfunction gluing across the self-similar cell structure and the
spectral rescaling identities it proves.

An eigenfunction y of a small problem at mu is copied (up to sign) onto
the kappa cells and joined over the constancy gaps by explicit polynomial
arcs; the result z is an eigenfunction of the rescaled problem at
Lambda = (kappa/a^3) * mu.  Two boundary families support this:

* quadratic arcs: small (alpha, beta) = (0, 2a/b), large (0, 2/b);
  z keeps every copy's zeros and gains none, so it has kappa*n zeros and
  Lambda is the large problem's eigenvalue of index kappa*n.
* cubic arcs: small (12a^2/b^2, 6a/b), large (12/b^2, 6/b); each arc
  crosses zero exactly once, giving kappa*(n+1) - 1 zeros.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConfigError, SolverError
from .measure import WeightParams
from .ode import Grid, QuasiState, build_grid, propagate
from .shooting import BVPConfig, Eigenpair, SpectrumTable
from .zeros import count_zero_crossings

JUNCTION_TOL = 1e-6


@dataclass(eq=False)
class GluedFunction:
    """Scaled-copy eigenfunction candidate on the refined grid.

    ``states`` holds quasi-derivative samples of z at ``target_lambda``
    (v uses the large problem's weight values).
    """

    grid: Grid
    states: np.ndarray
    target_lambda: float
    copy_signs: tuple[int, ...]
    filler_signs: tuple[int, ...]
    source: Eigenpair
    mode: str
    junction_defect: float
    zero_count: int


def quadratic_pair_configs(w: WeightParams) -> tuple[BVPConfig, BVPConfig]:
    """(small, large) boundary configurations of the quadratic family."""
    b = w.b_exact
    return (
        BVPConfig(0.0, float(2 * w.a_exact / b)),
        BVPConfig(0.0, float(2 / b)),
    )


def cubic_pair_configs(w: WeightParams) -> tuple[BVPConfig, BVPConfig]:
    """(small, large) boundary configurations of the cubic family."""
    a, b = w.a_exact, w.b_exact
    return (
        BVPConfig(float(12 * a * a / (b * b)), float(6 * a / b)),
        BVPConfig(float(12 / (b * b)), float(6 / b)),
    )


def rescale_factor(w: WeightParams) -> float:
    """Eigenvalue scale kappa / a^3 between the paired problems."""
    return float(Fraction(w.kappa) / w.a_exact**3)


def _expect_config(actual: BVPConfig | None, expected: BVPConfig, what: str):
    if actual is None:
        raise ConfigError(f"{what}: eigenpair carries no boundary configuration")
    if not (
        math.isclose(actual.alpha, expected.alpha, rel_tol=1e-9, abs_tol=1e-12)
        and math.isclose(actual.beta, expected.beta, rel_tol=1e-9)
    ):
        raise ConfigError(
            f"{what}: expected (alpha, beta) = ({expected.alpha:g}, {expected.beta:g}),"
            f" got ({actual.alpha:g}, {actual.beta:g})"
        )


class _Filler:
    """Polynomial arc over one constancy gap, exact closed form."""

    def __init__(self, mode: str, glo: float, ghi: float, y0: float, d2y0: float, a: float, b: float):
        self.mode = mode
        self.glo = glo
        self.ghi = ghi
        self.y0 = y0
        if mode == "quadratic":
            self.c = d2y0 / (2.0 * a * a)
        else:
            self.mid = 0.5 * (glo + ghi)
            self.ca = d2y0 / (3.0 * a * a * b)
            self.cb = 2.0 * y0 / b
            self.b2 = b * b / 4.0

    def value(self, x: float) -> float:
        if self.mode == "quadratic":
            return self.y0 + self.c * (x - self.glo) * (x - self.ghi)
        z = x - self.mid
        return z * (self.ca * (z * z - self.b2) + self.cb)

    def slope(self, x: float) -> float:
        if self.mode == "quadratic":
            return self.c * (2.0 * x - self.glo - self.ghi)
        z = x - self.mid
        return self.ca * (3.0 * z * z - self.b2) + self.cb

    def curvature(self, x: float) -> float:
        if self.mode == "quadratic":
            return 2.0 * self.c
        return 6.0 * self.ca * (x - self.mid)

    def third(self) -> float:
        return 0.0 if self.mode == "quadratic" else 6.0 * self.ca


def _sign_of(ratio: float, what: str) -> int:
    if not np.isfinite(ratio) or ratio == 0.0:
        raise SolverError(f"cannot resolve copy sign at {what}")
    return 1 if ratio > 0 else -1


def _glue(w: WeightParams, src: Eigenpair, mode: str, tol: float) -> GluedFunction:
    if src.trajectory is None:
        raise ConfigError("source eigenpair carries no trajectory (rehydrate it)")
    traj = src.trajectory
    gsrc = traj.grid
    big = build_grid(w, gsrc.generation + 1, gsrc.substeps)
    a = w.a
    b = w.b
    kappa = w.kappa
    mu = src.lam
    lam_big = rescale_factor(w) * mu

    y = traj.y
    dy = traj.dy
    d2y = traj.d2y
    y3 = traj.third_derivatives()
    y0 = float(y[0])
    d2y0 = float(d2y[0])
    if mode == "cubic" and not (y0 * d2y0 < 0.0):
        raise SolverError(
            "cubic gluing requires opposite signs of y(0) and y''(0); "
            f"got {y0:g} and {d2y0:g} (source eigenpair suspect)"
        )

    n_src_steps = gsrc.n_steps
    sub = gsrc.substeps
    stride = n_src_steps + sub  # steps consumed by one cell plus one gap
    states = np.empty((big.n_nodes, 4), dtype=np.float64)

    sup_y = float(np.max(np.abs(y)))
    sup_dy = float(np.max(np.abs(dy))) / a
    sup_d2y = float(np.max(np.abs(d2y))) / (a * a)

    copy_signs = [1]
    filler_signs: list[int] = []
    defect = 0.0

    for k in range(kappa):
        start = k * stride
        rng = slice(start, start + n_src_steps + 1)
        sc = float(copy_signs[k])
        states[rng, 0] = sc * y
        states[rng, 1] = sc * dy / a
        states[rng, 2] = sc * d2y / (a * a)
        z3 = sc * y3 / (a * a * a)
        states[rng, 3] = z3 - lam_big * big.p_nodes[rng] * states[rng, 0]
        if k == kappa - 1:
            break

        # gap k+1 spans nodes [start + n_src_steps, start + stride]
        g0 = start + n_src_steps
        glo = float(big.nodes[g0])
        ghi = float(big.nodes[g0 + sub])
        filler = _Filler(mode, glo, ghi, y0, d2y0, a, b)
        end_val = sc * float(y[-1])
        fv = filler.value(glo)
        sg = _sign_of(end_val / fv, f"gap {k + 1} left junction")
        filler_signs.append(sg)
        # continuity of z, z', z'' at both junctions, scaled per derivative
        for xj, node, side in ((glo, g0, "left"), (ghi, g0 + sub, "right")):
            if side == "left":
                zj = (end_val, sc * float(dy[-1]) / a, sc * float(d2y[-1]) / (a * a))
            else:
                nsc = _sign_of(sg * filler.value(ghi) / y0, f"gap {k + 1} right junction")
                zj = (nsc * y0, nsc * float(dy[0]) / a, nsc * float(d2y[0]) / (a * a))
            defect = max(
                defect,
                abs(zj[0] - sg * filler.value(xj)) / max(sup_y, 1e-300),
                abs(zj[1] - sg * filler.slope(xj)) / max(sup_dy, 1e-300),
                abs(zj[2] - sg * filler.curvature(xj)) / max(sup_d2y, 1e-300),
            )
        copy_signs.append(_sign_of(sg * filler.value(ghi) / y0, f"copy {k + 1} sign"))
        p_gap = float(big.p_nodes[g0 + 1])
        for j in range(1, sub):
            xg = float(big.nodes[g0 + j])
            val = sg * filler.value(xg)
            states[g0 + j, 0] = val
            states[g0 + j, 1] = sg * filler.slope(xg)
            states[g0 + j, 2] = sg * filler.curvature(xg)
            states[g0 + j, 3] = sg * filler.third() - lam_big * p_gap * val

    if defect > tol:
        raise SolverError(
            f"{mode} gluing junction mismatch {defect:.2e} exceeds {tol:g} "
            "(source eigenpair not accurate enough)"
        )

    zc = count_zero_crossings(big.h, states[:, 0], states[:, 1])
    return GluedFunction(
        grid=big,
        states=states,
        target_lambda=lam_big,
        copy_signs=tuple(copy_signs),
        filler_signs=tuple(filler_signs),
        source=src,
        mode=mode,
        junction_defect=defect,
        zero_count=zc,
    )


def glue_quadratic(w: WeightParams, src: Eigenpair, tol: float = JUNCTION_TOL) -> GluedFunction:
    """Glue a small-problem eigenfunction with quadratic gap arcs.

    The arcs never vanish (their offset pushes away from zero because
    y(0) and y''(0) have opposite signs), so the glued function keeps
    kappa * n zeros and targets index kappa * n of the large problem.
    """
    small, _ = quadratic_pair_configs(w)
    _expect_config(src.config, small, "quadratic gluing source")
    return _glue(w, src, "quadratic", tol)


def glue_cubic(w: WeightParams, src: Eigenpair, tol: float = JUNCTION_TOL) -> GluedFunction:
    """Glue a small-problem eigenfunction with cubic gap arcs.

    Each arc vanishes exactly once (at the gap midpoint), so the glued
    function has kappa * (n + 1) - 1 zeros.
    """
    small, _ = cubic_pair_configs(w)
    _expect_config(src.config, small, "cubic gluing source")
    return _glue(w, src, "cubic", tol)


def glued_residual(w: WeightParams, glued: GluedFunction, grid: Grid | None = None) -> float:
    """Sup-norm defect of the glued function against the rescaled equation.

    Each top-level piece (cell or gap) is re-propagated from the glued
    function's state at the piece start and compared against the glued
    samples along the piece, relative to sup |z|.
    """
    if grid is None:
        grid = glued.grid
    if grid is not glued.grid and grid.n_nodes != glued.grid.n_nodes:
        raise ConfigError("evaluation grid does not match the glued function's grid")
    lam = glued.target_lambda
    sup = float(np.max(np.abs(glued.states[:, 0])))
    n_src_steps = (grid.n_steps - (w.kappa - 1) * grid.substeps) // w.kappa
    stride = n_src_steps + grid.substeps
    worst = 0.0
    for k in range(w.kappa):
        start = k * stride
        pieces = [(start, start + n_src_steps)]
        if k < w.kappa - 1:
            pieces.append((start + n_src_steps, start + stride))
        for n0, n1 in pieces:
            s0 = QuasiState.from_array(glued.states[n0])
            traj = propagate(w, lam, s0, grid, renorm_every=64, node_from=n0, node_to=n1)
            vals = traj.states[:, 0] * math.exp(traj.scale_log)
            worst = max(
                worst,
                float(np.max(np.abs(vals - glued.states[n0 : n1 + 1, 0]))) / sup,
            )
    return worst


@dataclass(frozen=True)
class IdentityRow:
    n: int
    mu: float
    scaled_mu: float
    big_index: int
    big_lambda: float
    deviation: float


@dataclass(eq=False)
class IdentityReport:
    mode: str
    scale: float
    rows: list[IdentityRow]
    tolerance: float

    @property
    def max_deviation(self) -> float:
        return max((r.deviation for r in self.rows), default=0.0)

    @property
    def ok(self) -> bool:
        return self.max_deviation <= self.tolerance


def verify_identity(
    big: SpectrumTable,
    small: SpectrumTable,
    mode: str,
    tolerance: float = 1e-3,
) -> IdentityReport:
    """Check the index-rescaling identity between a paired solve.

    quadratic: large index kappa*n carries (kappa/a^3) * mu_n;
    cubic:     large index kappa*(n+1) - 1 carries (kappa/a^3) * mu_n.
    """
    if mode not in ("quadratic", "cubic"):
        raise ConfigError(f"unknown identity mode {mode!r}")
    if big.weight != small.weight:
        raise ConfigError("identity check needs matching weight parameters")
    w = big.weight
    small_cfg, big_cfg = (
        quadratic_pair_configs(w) if mode == "quadratic" else cubic_pair_configs(w)
    )
    _expect_config(small.config, small_cfg, "small problem")
    _expect_config(big.config, big_cfg, "large problem")

    scale = rescale_factor(w)
    kappa = w.kappa
    rows = []
    for p in small.pairs:
        n = p.index
        j = kappa * n if mode == "quadratic" else kappa * (n + 1) - 1
        if j > big.max_index:
            break
        lam_big = big.pair(j).lam
        scaled = scale * p.lam
        if p.lam == 0.0:
            dev = abs(lam_big)  # both must be the exact zero mode
        else:
            dev = abs(lam_big - scaled) / scaled
        rows.append(
            IdentityRow(
                n=n,
                mu=p.lam,
                scaled_mu=scaled,
                big_index=j,
                big_lambda=lam_big,
                deviation=dev,
            )
        )
    return IdentityReport(mode=mode, scale=scale, rows=rows, tolerance=tolerance)


def boundary_defect(cfg: BVPConfig, glued: GluedFunction) -> float:
    """Relative residual of the glued function in the large problem's
    boundary conditions."""
    from .shooting import right_residual  # local import to avoid cycle

    z = glued.states
    lam = glued.target_lambda
    sup_y = float(np.max(np.abs(z[:, 0])))
    sup_dy = float(np.max(np.abs(z[:, 1])))
    sup_d2y = float(np.max(np.abs(z[:, 2])))
    p = glued.grid.p_nodes
    sup_y3 = float(np.max(np.abs(z[:, 3] + lam * p * z[:, 0])))

    l1 = z[0, 2] + cfg.alpha * z[0, 0] - cfg.beta * z[0, 1]
    y3_0 = z[0, 3] + lam * p[0] * z[0, 0]
    l2 = -cfg.beta * y3_0 + cfg.alpha * z[0, 2]
    r1, r2 = right_residual(cfg, lam, QuasiState.from_array(z[-1]))
    s1 = max(sup_d2y + cfg.alpha * sup_y + cfg.beta * sup_dy, 1e-300)
    s2 = max(cfg.beta * sup_y3 + cfg.alpha * sup_d2y, 1e-300)
    return max(abs(l1) / s1, abs(l2) / s2, abs(r1) / s1, abs(r2) / s2)
