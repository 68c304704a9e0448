import math
from fractions import Fraction

import numpy as np
import pytest

from cantorbeam import (
    BVPConfig,
    ConfigError,
    QuasiState,
    SolverOptions,
    build_grid,
    char_det,
    count_sign_changes,
    left_basis,
    locate_eigenvalue,
    make_weight,
    rayleigh_quotient,
    right_basis,
    right_residual,
    spectrum,
)
from cantorbeam.zeros import count_zero_crossings


@pytest.fixture(scope="module")
def w():
    return make_weight(2, Fraction(1, 3))


@pytest.fixture(scope="module")
def grid(w):
    return build_grid(w, 10, 4)


def test_config_validation():
    with pytest.raises(ConfigError):
        BVPConfig(-1.0, 2.0)
    with pytest.raises(ConfigError):
        BVPConfig(0.0, 0.0)
    with pytest.raises(ConfigError):
        BVPConfig(0.0, -2.0)


def test_left_basis_examples():
    u1, u2 = left_basis(BVPConfig(0.0, 6.0))
    assert (u1.y, u1.dy, u1.d2y, u1.v) == (1.0, 0.0, 0.0, 0.0)
    assert (u2.y, u2.dy, u2.d2y, u2.v) == (0.0, 1.0, 6.0, 0.0)
    u1, u2 = left_basis(BVPConfig(12.0, 6.0))
    assert (u1.y, u1.dy, u1.d2y, u1.v) == (1.0, 0.0, -12.0, -24.0)
    assert (u2.y, u2.dy, u2.d2y, u2.v) == (0.0, 1.0, 6.0, 12.0)


def test_left_basis_satisfies_left_conditions():
    for alpha, beta in ((0.0, 2.0), (12.0, 6.0), (3.5, 0.7), (108.0, 18.0)):
        cfg = BVPConfig(alpha, beta)
        for u in left_basis(cfg):
            # P(0) = 0, so y'''(0) = v
            assert u.d2y + alpha * u.y - beta * u.dy == pytest.approx(0.0, abs=1e-12)
            assert -beta * u.v + alpha * u.d2y == pytest.approx(0.0, abs=1e-12)


def test_right_basis_satisfies_right_conditions():
    for alpha, beta in ((0.0, 2.0), (12.0, 6.0), (108.0, 18.0)):
        cfg = BVPConfig(alpha, beta)
        for lam in (0.0, 7.0, 4.9e3):
            for v in right_basis(cfg, lam):
                r1, r2 = right_residual(cfg, lam, v)
                assert abs(r1) <= 1e-9 and abs(r2) <= 1e-9


def test_right_residual_examples():
    cfg = BVPConfig(0.0, 6.0)
    assert right_residual(cfg, 0.0, QuasiState(1.0, 0.0, 0.0, 0.0)) == (0.0, 0.0)
    # state with y'''(1) = 2 at lam = 1: v = 2 - 1*1 = 1
    r1, r2 = right_residual(cfg, 1.0, QuasiState(1.0, 1.0, 1.0, 1.0))
    assert (r1, r2) == (7.0, 12.0)
    # scaling the end state scales the residuals
    r1c, r2c = right_residual(cfg, 1.0, QuasiState(3.0, 3.0, 3.0, 3.0))
    assert (r1c, r2c) == (3 * r1, 3 * r2)


def test_char_det_zero_mode_sign(w, grid):
    cd = char_det(BVPConfig(0.0, 6.0), w, 0.0, grid)
    assert cd.sign == 0


def test_char_det_sign_changes_at_benchmarks(w, grid):
    cfg = BVPConfig(0.0, 6.0)
    s40 = char_det(cfg, w, 40.0, grid).sign
    s42 = char_det(cfg, w, 42.0, grid).sign
    assert s40 != 0 and s42 != 0 and s40 != s42  # crossing 40.965

    cfg = BVPConfig(12.0, 6.0)
    s80 = char_det(cfg, w, 8.0, grid).sign
    s86 = char_det(cfg, w, 8.6, grid).sign
    assert s80 != 0 and s86 != 0 and s80 != s86  # crossing 8.2987


def test_locate_first_eigenvalue(w):
    p = locate_eigenvalue(BVPConfig(0.0, 2.0), w, 1)
    assert abs(p.lam - 22.131) <= 1e-2
    assert p.zero_count == 1
    assert p.det_residual <= 1e-6


def test_zero_mode_pair(w):
    p = locate_eigenvalue(BVPConfig(0.0, 2.0), w, 0)
    assert p.lam == 0.0
    assert p.zero_count == 0
    assert np.all(p.trajectory.y == 1.0)


def test_spectrum_requires_single_cap(w):
    with pytest.raises(ConfigError):
        spectrum(BVPConfig(0.0, 2.0), w)
    with pytest.raises(ConfigError):
        spectrum(BVPConfig(0.0, 2.0), w, n_max=2, lambda_max=100.0)


def test_alpha_positive_spectra_strictly_positive(spec_12_6, spec_108_18):
    for tab in (spec_12_6, spec_108_18):
        assert all(p.lam > 0 for p in tab.pairs)


def test_oscillation_indexing(spec_12_6):
    for p in spec_12_6.pairs:
        assert p.zero_count == p.index


def test_endpoint_nonvanishing(spec_12_6, spec_06):
    for tab in (spec_12_6, spec_06):
        for p in tab.pairs:
            y = p.trajectory.y
            sup = np.max(np.abs(y))
            assert abs(y[0]) >= 1e-6 * sup
            assert abs(y[-1]) >= 1e-6 * sup


def test_simplicity_sign_change_at_roots(w, grid, spec_12_6):
    for p in spec_12_6.pairs[:3]:
        lo = char_det(spec_12_6.config, w, p.lam * (1 - 1e-3), grid).sign
        hi = char_det(spec_12_6.config, w, p.lam * (1 + 1e-3), grid).sign
        assert lo != 0 and hi != 0 and lo != hi


def test_interlacing_no_roots_between(w, grid, spec_12_6):
    lams = [p.lam for p in spec_12_6.pairs]
    for a, b in zip(lams, lams[1:]):
        signs = {
            char_det(spec_12_6.config, w, a + t * (b - a), grid).sign
            for t in (0.08, 0.35, 0.5, 0.65, 0.92)
        }
        assert len(signs) == 1 and 0 not in signs


def test_zero_count_stability_under_noise(spec_12_6):
    rng = np.random.default_rng(17)
    for p in spec_12_6.pairs:
        t = p.trajectory
        y = t.y.copy()
        dy = t.dy.copy()
        sup = np.max(np.abs(y))
        y += 1e-9 * sup * rng.standard_normal(len(y))
        dy += 1e-9 * np.max(np.abs(dy)) * rng.standard_normal(len(dy))
        noisy = count_zero_crossings(t.grid.h, y, dy)
        assert noisy == p.zero_count


def test_rayleigh_on_kernel_function(w, grid):
    from cantorbeam.ode import propagate

    traj = propagate(w, 0.0, QuasiState(1.0, 0.0, 0.0, 0.0), grid)
    assert rayleigh_quotient(BVPConfig(0.0, 2.0), w, traj) == pytest.approx(0.0, abs=1e-15)


def test_rayleigh_scale_invariance(spec_12_6, w):
    p = spec_12_6.pair(1)
    t = p.trajectory
    rq1 = rayleigh_quotient(spec_12_6.config, w, t)
    from cantorbeam.ode import Trajectory

    scaled = Trajectory(grid=t.grid, states=5.0 * t.states, lam=t.lam)
    rq2 = rayleigh_quotient(spec_12_6.config, w, scaled)
    assert rq2 == pytest.approx(rq1, rel=1e-12)


def test_rayleigh_matches_eigenvalues(spec_12_6):
    for p in spec_12_6.pairs:
        if p.lam > 0:
            assert p.rayleigh_gap <= 1e-3


def test_eigenfunction_counts(spec_06):
    # direct re-count through the public counter
    for p in spec_06.pairs[:6]:
        if p.trajectory is not None:
            assert count_sign_changes(p.trajectory) == p.index
