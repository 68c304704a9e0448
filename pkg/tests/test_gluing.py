import math
from fractions import Fraction

import numpy as np
import pytest

from cantorbeam import BVPConfig, ConfigError, SolverError, make_weight
from cantorbeam.gluing import (
    GluedFunction,
    boundary_defect,
    cubic_pair_configs,
    glue_cubic,
    glue_quadratic,
    glued_residual,
    quadratic_pair_configs,
    rescale_factor,
    verify_identity,
)
from cantorbeam.shooting import Eigenpair, SpectrumTable


@pytest.fixture(scope="module")
def w():
    return make_weight(2, Fraction(1, 3))


def test_pair_configs(w):
    small, big = quadratic_pair_configs(w)
    assert (small.alpha, small.beta) == (0.0, 2.0)
    assert (big.alpha, big.beta) == (0.0, 6.0)
    small, big = cubic_pair_configs(w)
    assert (small.alpha, small.beta) == (12.0, 6.0)
    assert (big.alpha, big.beta) == (108.0, 18.0)
    assert rescale_factor(w) == 54.0


def test_glue_rejects_wrong_config(w, spec_12_6):
    with pytest.raises(ConfigError):
        glue_quadratic(w, spec_12_6.pair(0))


def test_zero_mode_glues_exactly(w, spec_02):
    g = glue_quadratic(w, spec_02.pair(0))
    assert g.target_lambda == 0.0
    assert g.zero_count == 0
    assert g.junction_defect == 0.0
    assert glued_residual(w, g) == 0.0
    assert np.all(g.states[:, 0] == g.states[0, 0])


def test_quadratic_glue_structure(w, spec_02):
    src = spec_02.pair(1)
    g = glue_quadratic(w, src)
    assert g.mode == "quadratic"
    assert g.zero_count == 2
    assert g.target_lambda == pytest.approx(54.0 * src.lam, rel=1e-14)
    assert g.junction_defect <= 1e-6
    # gap samples match the closed-form arc built independently here
    y0 = src.trajectory.y[0]
    d2y0 = src.trajectory.d2y[0]
    c = d2y0 / (2.0 * w.a * w.a)
    glo, ghi = 1 / 3, 2 / 3
    grid = g.grid
    sub = grid.substeps
    gap_first = grid.n_steps // 2 - sub // 2  # central gap spans the middle steps
    # locate the gap by nodes instead of index arithmetic
    i0 = int(np.searchsorted(grid.nodes, glo - 1e-12))
    for j in range(sub + 1):
        x = grid.nodes[i0 + j]
        want = abs(y0 + c * (x - glo) * (x - ghi))
        assert abs(abs(g.states[i0 + j, 0]) - want) <= 1e-8


def test_quadratic_glue_copies_match_source(w, spec_02):
    src = spec_02.pair(2)
    g = glue_quadratic(w, src)
    n_src = src.trajectory.states.shape[0]
    for k, sign in enumerate(g.copy_signs):
        start = k * (n_src - 1 + g.grid.substeps)
        copy = g.states[start : start + n_src, 0]
        assert np.allclose(copy, sign * src.trajectory.y, atol=1e-12)


def test_cubic_glue_structure(w, spec_12_6):
    src = spec_12_6.pair(0)
    g = glue_cubic(w, src)
    assert g.zero_count == 1
    assert g.target_lambda == pytest.approx(54.0 * src.lam, rel=1e-14)
    assert abs(g.target_lambda - 448.13) <= 0.05
    src2 = spec_12_6.pair(2)
    g2 = glue_cubic(w, src2)
    assert g2.zero_count == 5
    assert g2.target_lambda == pytest.approx(88080.0, rel=1e-3)


def test_cubic_gap_arc_has_single_zero(w, spec_12_6):
    from cantorbeam.zeros import count_zero_crossings

    g = glue_cubic(w, spec_12_6.pair(1))
    grid = g.grid
    sub = grid.substeps
    i0 = int(np.searchsorted(grid.nodes, 1 / 3 - 1e-12))
    zc = count_zero_crossings(
        grid.h[i0 : i0 + sub],
        g.states[i0 : i0 + sub + 1, 0],
        g.states[i0 : i0 + sub + 1, 1],
    )
    assert zc == 1


def test_cubic_sign_precondition(w, spec_12_6):
    src = spec_12_6.pair(0)
    bad_states = src.trajectory.states.copy()
    bad_states[:, 2] *= -1.0  # flip y'' so y(0), y''(0) no longer oppose
    from cantorbeam.ode import Trajectory

    fake_traj = Trajectory(grid=src.trajectory.grid, states=bad_states, lam=src.lam)
    fake = Eigenpair(
        index=src.index,
        lam=src.lam,
        trajectory=fake_traj,
        zero_count=src.zero_count,
        det_residual=src.det_residual,
        rayleigh_gap=src.rayleigh_gap,
        config=src.config,
        weight=src.weight,
    )
    with pytest.raises(SolverError, match="opposite signs"):
        glue_cubic(w, fake)


def test_glued_residuals_small(w, spec_02, spec_12_6):
    g = glue_quadratic(w, spec_02.pair(1))
    assert glued_residual(w, g) <= 1e-4
    g = glue_cubic(w, spec_12_6.pair(0))
    assert glued_residual(w, g) <= 1e-4


def test_glued_boundary_conditions(w, spec_02, spec_12_6):
    _, big_q = quadratic_pair_configs(w)
    assert boundary_defect(big_q, glue_quadratic(w, spec_02.pair(1))) <= 1e-6
    _, big_c = cubic_pair_configs(w)
    assert boundary_defect(big_c, glue_cubic(w, spec_12_6.pair(1))) <= 1e-6


def test_identity_quadratic(w, spec_02, spec_06):
    report = verify_identity(spec_06, spec_02, "quadratic")
    assert report.scale == 54.0
    by_n = {r.n: r for r in report.rows}
    assert by_n[0].deviation == 0.0
    assert by_n[1].deviation <= 1e-4
    assert abs(by_n[1].big_lambda - 1195.1) <= 0.2
    assert report.ok


def test_identity_cubic(w, spec_12_6, spec_108_18):
    report = verify_identity(spec_108_18, spec_12_6, "cubic")
    by_n = {r.n: r for r in report.rows}
    assert by_n[1].deviation <= 1e-3
    assert abs(by_n[1].big_lambda - 7443.0) <= 2.0
    assert report.ok


def test_identity_rejects_mismatched_weight(spec_06, spec_02):
    w3 = make_weight(3, Fraction(1, 5))
    fake = SpectrumTable(
        config=spec_02.config,
        weight=w3,
        pairs=[],
        options=spec_02.options,
        lambda_cap=0.0,
        scan_ratio_used=1.15,
    )
    with pytest.raises(ConfigError):
        verify_identity(spec_06, fake, "quadratic")


def test_identity_rejects_wrong_mode(spec_06, spec_02):
    with pytest.raises(ConfigError):
        verify_identity(spec_06, spec_02, "cubic")
    with pytest.raises(ConfigError):
        verify_identity(spec_06, spec_02, "parabolic")


def test_shared_values_between_families(spec_06, spec_108_18):
    # the two large-problem spectra share values at shifted indices; the
    # benchmark tables show the same numbers in both columns
    assert spec_108_18.pair(0).lam == pytest.approx(spec_06.pair(1).lam, rel=1e-9)
    assert spec_108_18.pair(2).lam == pytest.approx(spec_06.pair(3).lam, rel=1e-9)
