from fractions import Fraction

import numpy as np
import pytest

from cantorbeam import (
    DomainError,
    ResourceError,
    decompose,
    make_weight,
    p_eval,
    stieltjes_integral,
)


def test_make_weight_cantor():
    w = make_weight(2, Fraction(1, 3))
    assert w.kappa == 2
    assert w.a_exact == Fraction(1, 3)
    assert w.b_exact == Fraction(1, 3)
    assert w.kappa * w.a_exact + (w.kappa - 1) * w.b_exact == 1


def test_make_weight_derived_gap():
    w = make_weight(3, Fraction(1, 5))
    assert w.b_exact == Fraction(1, 5)  # (1 - 3/5) / 2


def test_make_weight_rejects_bad_scale():
    with pytest.raises(DomainError):
        make_weight(2, 0.5)
    with pytest.raises(DomainError):
        make_weight(2, 0.0)
    with pytest.raises(DomainError):
        make_weight(1, 0.3)
    with pytest.raises(DomainError):
        make_weight(2, float("nan"))


def test_p_eval_endpoints_and_midpoint():
    w = make_weight(2, Fraction(1, 3))
    assert p_eval(w, 0) == 0.0
    assert p_eval(w, 1) == 1.0
    assert p_eval(w, 0.5, 1) == 0.5  # midpoint of the central gap
    assert p_eval(w, Fraction(1, 9), 20) == 0.25


def test_p_eval_domain_checks():
    w = make_weight(2, Fraction(1, 3))
    with pytest.raises(DomainError):
        p_eval(w, -0.1)
    with pytest.raises(DomainError):
        p_eval(w, 1.1)
    with pytest.raises(DomainError):
        p_eval(w, 0.5, 0)


def test_self_similarity_and_symmetry_exact():
    w = make_weight(2, Fraction(1, 3))
    rng = np.random.default_rng(7)
    for xr in rng.random(500):
        x = Fraction(float(xr))
        for k in range(w.kappa):
            lhs = p_eval(w, k * w.period_exact + w.a_exact * x)
            rhs = (k + p_eval(w, x)) / w.kappa
            assert abs(lhs - rhs) <= 1e-12
        assert abs(p_eval(w, x) - (1.0 - p_eval(w, 1 - x))) <= 1e-12


def test_monotonicity_sampled():
    w = make_weight(3, Fraction(1, 5))
    rng = np.random.default_rng(11)
    xs = np.sort(rng.random(400))
    vals = [p_eval(w, float(x)) for x in xs]
    assert all(v1 <= v2 + 1e-15 for v1, v2 in zip(vals, vals[1:]))


def test_gap_constancy():
    w = make_weight(2, Fraction(1, 3))
    rng = np.random.default_rng(3)
    for level in (1, 2, 3, 5):
        dec = decompose(w, level)
        for lo, hi, pval in dec.gaps:
            for t in rng.random(3):
                x = lo + Fraction(float(t)) * (hi - lo)
                assert p_eval(w, x) == float(pval)


def test_decompose_levels():
    w = make_weight(2, Fraction(1, 3))
    d0 = decompose(w, 0)
    assert d0.cells == ((Fraction(0), Fraction(1)),)
    assert d0.gaps == ()

    d1 = decompose(w, 1)
    assert d1.cells == (
        (Fraction(0), Fraction(1, 3)),
        (Fraction(2, 3), Fraction(1)),
    )
    assert d1.gaps == ((Fraction(1, 3), Fraction(2, 3), Fraction(1, 2)),)

    d2 = decompose(w, 2)
    assert len(d2.cells) == 4
    assert all(hi - lo == Fraction(1, 9) for lo, hi in d2.cells)
    assert [g[2] for g in d2.gaps] == [Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)]


def test_decompose_resource_cap():
    w = make_weight(2, Fraction(1, 3))
    with pytest.raises(ResourceError):
        decompose(w, 12, max_cells=1000)


def test_stieltjes_total_mass_exact():
    w = make_weight(2, Fraction(1, 3))
    for level in (1, 4, 8, 12):
        assert stieltjes_integral(w, lambda x: 1.0, level) == 1.0
    w3 = make_weight(3, Fraction(1, 5))
    assert stieltjes_integral(w3, lambda x: 1.0, 6) == 1.0


def _moment_oracle(w, order):
    """First and second moments of dP from the self-similar recursion."""
    kappa, a, ab = w.kappa, w.a_exact, w.period_exact
    m1 = ab * (kappa - 1) / (2 * (1 - a))
    if order == 1:
        return m1
    mean_k2 = Fraction((kappa - 1) * (2 * kappa - 1), 6)
    m2 = (ab**2 * mean_k2 + a * ab * (kappa - 1) * m1) / (1 - a * a)
    return m2


def test_stieltjes_moments_match_recursion_oracle():
    w = make_weight(2, Fraction(1, 3))
    assert _moment_oracle(w, 1) == Fraction(1, 2)
    assert _moment_oracle(w, 2) == Fraction(3, 8)
    assert abs(stieltjes_integral(w, lambda x: x, 10) - 0.5) <= 1e-3
    assert abs(stieltjes_integral(w, lambda x: x * x, 12) - 0.375) <= 1e-3

    w3 = make_weight(3, Fraction(1, 4))
    m1 = float(_moment_oracle(w3, 1))
    m2 = float(_moment_oracle(w3, 2))
    assert abs(stieltjes_integral(w3, lambda x: x, 8) - m1) <= 1e-3
    assert abs(stieltjes_integral(w3, lambda x: x * x, 8) - m2) <= 1e-3


def test_quadrature_consistency_across_levels():
    w = make_weight(2, Fraction(1, 3))
    f = np.sin
    for g in (4, 6, 8):
        i1 = stieltjes_integral(w, f, g)
        i2 = stieltjes_integral(w, f, g + 1)
        # modulus of continuity of sin at the cell scale
        assert abs(i1 - i2) <= w.a**g


def test_stieltjes_propagates_integrand_failure():
    w = make_weight(2, Fraction(1, 3))

    def bad(x):
        raise ValueError("boom")

    with pytest.raises(ValueError, match="boom"):
        stieltjes_integral(w, bad, 2)


def test_stieltjes_level_precondition():
    w = make_weight(2, Fraction(1, 3))
    with pytest.raises(DomainError):
        stieltjes_integral(w, lambda x: 1.0, 0)
