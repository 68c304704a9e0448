"""Cantor-type self-similar staircase weights and their singular measures.

The weight is a nondecreasing continuous P on [0, 1] with P(0) = 0 and
P(1) = 1, built from ``kappa`` affine copies of itself on closed cells of
width ``a`` separated by ``kappa - 1`` constancy gaps of width
``b = (1 - kappa*a) / (kappa - 1)``.  The classical middle-thirds
staircase is ``kappa = 2, a = 1/3``.  The induced Stieltjes measure dP is
the uniform self-similar probability measure on the cell structure.

All cell arithmetic is exact: parameters and evaluation points are carried
as rationals (every float is one), so tiling identities hold with no
rounding and descent never drifts across a cell boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, fsum, log
from typing import Callable, Union

from .errors import DomainError, ResourceError

Rationalish = Union[int, float, str, Fraction]

MAX_CELLS_DEFAULT = 1 << 20


def _as_fraction(value: Rationalish, name: str) -> Fraction:
    try:
        return Fraction(value)
    except (ValueError, TypeError, ZeroDivisionError, OverflowError) as exc:
        raise DomainError(f"{name} must be a finite rational, got {value!r}") from exc


@dataclass(frozen=True)
class WeightParams:
    """Parameters of a Cantor-type self-similar weight.

    kappa copies of scale ``a`` and ``kappa - 1`` gaps of width ``b`` tile
    [0, 1] exactly: kappa*a + (kappa - 1)*b == 1.
    """

    kappa: int
    a_exact: Fraction
    b_exact: Fraction

    @property
    def a(self) -> float:
        return float(self.a_exact)

    @property
    def b(self) -> float:
        return float(self.b_exact)

    @property
    def period_exact(self) -> Fraction:
        """Exact pitch a + b between consecutive cell left endpoints."""
        return self.a_exact + self.b_exact

    def cell_origin(self, k: int) -> Fraction:
        """Exact left endpoint k*(a+b) of cell k."""
        return k * self.period_exact

    def __repr__(self) -> str:
        return f"WeightParams(kappa={self.kappa}, a={self.a_exact}, b={self.b_exact})"


def make_weight(kappa: int, a: Rationalish) -> WeightParams:
    """Validate (kappa, a) and derive the gap width b.

    Raises DomainError unless kappa >= 2 and 0 < a < 1/kappa (otherwise no
    Cantor-type gap structure exists).
    """
    if not isinstance(kappa, int) or isinstance(kappa, bool):
        raise DomainError(f"kappa must be an integer >= 2, got {kappa!r}")
    if kappa < 2:
        raise DomainError(f"kappa must be >= 2, got {kappa}")
    a_exact = _as_fraction(a, "a")
    if not (0 < a_exact < Fraction(1, kappa)):
        raise DomainError(f"a must lie in (0, 1/{kappa}), got {a_exact}")
    b_exact = (1 - kappa * a_exact) / (kappa - 1)
    w = WeightParams(kappa=kappa, a_exact=a_exact, b_exact=b_exact)
    assert kappa * a_exact + (kappa - 1) * b_exact == 1
    return w


def default_depth(kappa: int) -> int:
    """Descent depth at which the undecided tail kappa**-depth is below 2**-52."""
    return ceil(52 * log(2) / log(kappa))


def p_eval(w: WeightParams, x: Rationalish, depth_cap: int | None = None) -> float:
    """Evaluate the staircase P(x) by exact recursive descent.

    Descends into the cell containing x, accumulating the copy offsets,
    until x lands in a constancy gap (exact value) or depth_cap levels are
    exhausted (absolute error <= kappa**-depth_cap).
    """
    if depth_cap is None:
        depth_cap = default_depth(w.kappa)
    if depth_cap < 1:
        raise DomainError(f"depth_cap must be >= 1, got {depth_cap}")
    xf = _as_fraction(x, "x")
    if not (0 <= xf <= 1):
        raise DomainError(f"x must lie in [0, 1], got {x!r}")
    kappa = w.kappa
    a = w.a_exact
    pitch = w.period_exact
    acc = Fraction(0)
    scale = Fraction(1)
    for _ in range(depth_cap):
        k = int(xf / pitch)
        if k > kappa - 1:
            k = kappa - 1
        t = xf - k * pitch
        if t >= a:
            # in the gap right of cell k; P is constant (k+1)/kappa there
            return float(acc + scale * Fraction(k + 1, kappa))
        acc += scale * Fraction(k, kappa)
        scale /= kappa
        xf = t / a
    # undecided tail of size <= kappa**-depth_cap; estimating it by the
    # rescaled coordinate keeps P(0) = 0, P(1) = 1 and the mirror identity
    # P(x) = 1 - P(1-x) exact even when the cap is hit
    return float(acc + scale * xf)


@dataclass(frozen=True)
class CellDecomposition:
    """Generation-g cell/gap structure of [0, 1].

    ``cells`` are the kappa**g closed intervals (exact endpoints), each
    carrying measure kappa**-g; ``gaps`` are the complementary open
    intervals with the constant P value on each.
    """

    level: int
    cells: tuple[tuple[Fraction, Fraction], ...]
    gaps: tuple[tuple[Fraction, Fraction, Fraction], ...]
    cell_measure: Fraction


def decompose(w: WeightParams, level: int, max_cells: int = MAX_CELLS_DEFAULT) -> CellDecomposition:
    """Materialize all level-g cells and the gaps between them."""
    if level < 0:
        raise DomainError(f"level must be >= 0, got {level}")
    n_cells = w.kappa**level
    if n_cells > max_cells:
        raise ResourceError(f"kappa**level = {n_cells} exceeds cap {max_cells}")
    width = w.a_exact**level
    lefts = [Fraction(0)]
    for g in range(level):
        step = w.period_exact * w.a_exact**g
        lefts = [left + k * step for left in lefts for k in range(w.kappa)]
    cells = tuple((left, left + width) for left in lefts)
    gaps = tuple(
        (cells[i][1], cells[i + 1][0], Fraction(i + 1, n_cells))
        for i in range(n_cells - 1)
    )
    return CellDecomposition(
        level=level, cells=cells, gaps=gaps, cell_measure=Fraction(1, n_cells)
    )


def stieltjes_integral(
    w: WeightParams,
    f: Callable[[float], float],
    level: int,
    max_cells: int = MAX_CELLS_DEFAULT,
) -> float:
    """Generation-``level`` quadrature of integral f dP.

    Sums f at cell midpoints weighted by the cell measure kappa**-level.
    Converges as level grows for continuous f; exact for f == 1.
    """
    if level < 1:
        raise DomainError(f"level must be >= 1, got {level}")
    dec = decompose(w, level, max_cells=max_cells)
    total = fsum(f(float((lo + hi) / 2)) for lo, hi in dec.cells)
    return total / w.kappa**level
