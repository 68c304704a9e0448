import os
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest

from cantorbeam import build_grid, make_weight
from cantorbeam import _kernel_py

try:
    from cantorbeam import _kernel_fast
except ImportError:
    _kernel_fast = None

needs_fast = pytest.mark.skipif(_kernel_fast is None, reason="compiled kernel not built")


def _random_steps(rng, n):
    kinds = rng.integers(0, 2, size=n).astype(np.int8)
    h = rng.uniform(1e-4, 2e-2, size=n)
    p0 = rng.random(n)
    p1 = rng.random(n)
    p2 = rng.random(n)
    return kinds, h, p0, p1, p2


@needs_fast
def test_backends_bit_identical_random():
    rng = np.random.default_rng(123)
    for m in (1, 2, 4):
        kinds, h, p0, p1, p2 = _random_steps(rng, 400)
        y0 = rng.standard_normal((4, m))
        ya = np.ascontiguousarray(y0)
        yb = np.ascontiguousarray(y0.copy())
        ta = np.zeros((401, 4, m))
        tb = np.zeros((401, 4, m))
        _kernel_py.run_steps(kinds, h, p0, p1, p2, 321.5, ya, 0, 400, ta)
        _kernel_fast.run_steps(kinds, h, p0, p1, p2, 321.5, yb, 0, 400, tb)
        assert np.array_equal(ya, yb)
        assert np.array_equal(ta[1:], tb[1:])


@needs_fast
def test_backends_bit_identical_on_real_grid():
    w = make_weight(2, Fraction(1, 3))
    g = build_grid(w, 8, 2)
    y0 = np.array([[1.0], [0.5], [-0.3], [0.2]])
    ya = y0.copy()
    yb = y0.copy()
    _kernel_py.run_steps(g.kinds, g.h, g.p_left, g.p_mid, g.p_right, 97.0,
                         ya, 0, g.n_steps)
    _kernel_fast.run_steps(g.kinds, g.h, g.p_left, g.p_mid, g.p_right, 97.0,
                           yb, 0, g.n_steps)
    assert np.array_equal(ya, yb)


def test_pure_backend_env_selection():
    code = "import cantorbeam; print(cantorbeam.BACKEND)"
    env = dict(os.environ, CANTORBEAM_PURE="1")
    res = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, env=env
    )
    assert res.stdout.strip() == "python"


@needs_fast
def test_default_backend_is_compiled():
    env = {k: v for k, v in os.environ.items() if k != "CANTORBEAM_PURE"}
    res = subprocess.run(
        [sys.executable, "-c", "import cantorbeam; print(cantorbeam.BACKEND)"],
        capture_output=True,
        text=True,
        env=env,
    )
    assert res.stdout.strip() == "cython"
