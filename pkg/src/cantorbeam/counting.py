"""Eigenvalue counting function and its log-periodic structure.

N(lam) counts eigenvalues <= lam (the zero mode included when alpha = 0).
Under the self-similar rescaling the counting function repeats with
multiplicative period e^nu, nu = ln(kappa) - 3 ln(a): the profiles
sigma_k(t) = kappa^-k * N(e^(k nu + t)) on t in [0, nu] converge uniformly
(|sigma_{k+1} - sigma_k| <= kappa^-k), the growth exponent is
D = ln(kappa) / nu, and s(t) = e^(-D t) * sigma(t) is the periodic
amplitude in N(lam) = lam^D * (s(ln lam) + o(1)).
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .errors import CapError, ConfigError, SolverError
from .measure import WeightParams
from .shooting import SpectrumTable


def log_period(w: WeightParams) -> float:
    """Multiplicative log-period nu = ln(kappa) - 3 ln(a)."""
    return math.log(w.kappa) - 3.0 * math.log(w.a)


def dimension_analytic(w: WeightParams) -> float:
    """Counting exponent D = ln(kappa) / nu."""
    return math.log(w.kappa) / log_period(w)


def counting_function(table: SpectrumTable, lam: float) -> int:
    """Number of eigenvalues <= lam (closed count)."""
    if lam > table.lambda_cap * (1.0 + 1e-12):
        raise CapError(
            f"lam={lam:g} beyond the certified range {table.lambda_cap:g}"
        )
    lams = [p.lam for p in table.pairs]
    return bisect_right(lams, lam)


@dataclass(eq=False)
class SigmaProfile:
    """Sampled rescaled counting profile sigma_k on one period."""

    k: int
    nu: float
    D: float
    t: np.ndarray
    sigma: np.ndarray

    def s_values(self) -> np.ndarray:
        """Pointwise periodic amplitude s(t) = e^(-D t) * sigma_k(t)."""
        return np.exp(-self.D * self.t) * self.sigma


def sigma_profile(
    table: SpectrumTable,
    k: int,
    samples: int = 257,
    t_grid: np.ndarray | None = None,
) -> SigmaProfile:
    """Sample sigma_k(t) = kappa^-k N(e^(k nu + t)) on a uniform t-grid.

    Pass an explicit ``t_grid`` to evaluate several k on identical grids
    (cauchy_gap requires that).
    """
    if k < 0:
        raise ConfigError(f"profile index k must be >= 0, got {k}")
    w = table.weight
    nu = log_period(w)
    need = math.exp((k + 1) * nu)
    if need > table.lambda_cap * (1.0 + 1e-12):
        raise CapError(
            f"sigma_{k} needs the spectrum certified up to {need:g}, "
            f"cap is {table.lambda_cap:g}"
        )
    if t_grid is None:
        if samples < 2:
            raise ConfigError("samples must be >= 2")
        t = np.linspace(0.0, nu, samples)
    else:
        t = np.asarray(t_grid, dtype=np.float64)
        if t.ndim != 1 or t[0] < -1e-12 or t[-1] > nu * (1 + 1e-12):
            raise ConfigError("t_grid must lie within [0, nu]")
    scale = float(w.kappa) ** (-k)
    sigma = np.array(
        [counting_function(table, math.exp(k * nu + ti)) * scale for ti in t]
    )
    return SigmaProfile(k=k, nu=nu, D=dimension_analytic(w), t=t, sigma=sigma)


def cauchy_gap(p1: SigmaProfile, p2: SigmaProfile) -> float:
    """Sup over shared t-samples of |sigma_{k+1}(t) - sigma_k(t)|.

    The self-similar structure guarantees the bound kappa^-k for the true
    profiles; sampled counts are exact integers scaled by kappa^-k, so the
    comparison carries no numerical slack.
    """
    if p2.k != p1.k + 1:
        raise ConfigError(f"profiles must be consecutive, got k={p1.k} and k={p2.k}")
    if not math.isclose(p1.nu, p2.nu, rel_tol=1e-12):
        raise ConfigError("profiles have different periods")
    if p1.t.shape != p2.t.shape or not np.array_equal(p1.t, p2.t):
        raise ConfigError("profiles sampled on different t-grids")
    return float(np.max(np.abs(p2.sigma - p1.sigma)))


def profile_mismatch_fraction(p1: SigmaProfile, p2: SigmaProfile) -> float:
    """Fraction of t-samples where consecutive profiles disagree."""
    if p1.t.shape != p2.t.shape or not np.array_equal(p1.t, p2.t):
        raise ConfigError("profiles sampled on different t-grids")
    return float(np.mean(p2.sigma != p1.sigma))


def estimate_D(
    table: SpectrumTable,
    t0: float | None = None,
    min_positive: int = 5,
) -> tuple[float, float]:
    """(empirical, analytic) counting exponents.

    The analytic value is ln(kappa)/nu.  The empirical one is the slope of
    the least-squares fit of ln N against ln lam sampled at period-aligned
    points lam = e^(k nu + t0), which cancels the periodic amplitude;
    t0 defaults to nu/2.
    """
    w = table.weight
    nu = log_period(w)
    analytic = dimension_analytic(w)
    if t0 is None:
        t0 = nu / 2.0
    positives = sum(1 for p in table.pairs if p.lam > 0)
    if positives < min_positive:
        raise SolverError(
            f"need at least {min_positive} positive eigenvalues, have {positives}"
        )
    xs = []
    ys = []
    k = 0
    while True:
        x = k * nu + t0
        lam = math.exp(x)
        if lam > table.lambda_cap * (1.0 + 1e-12):
            break
        n = counting_function(table, lam)
        if n > 0:
            xs.append(x)
            ys.append(math.log(n))
        k += 1
    if len(xs) < 2:
        raise SolverError(
            "spectrum cap leaves fewer than two period-aligned sample points"
        )
    slope = float(np.polyfit(np.array(xs), np.array(ys), 1)[0])
    return slope, analytic
