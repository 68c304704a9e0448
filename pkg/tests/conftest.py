import pytest
from fractions import Fraction

from cantorbeam import BVPConfig, SolverOptions, make_weight, spectrum


@pytest.fixture(scope="session")
def cantor():
    return make_weight(2, Fraction(1, 3))


@pytest.fixture(scope="session")
def tight_opts():
    # tight bisection keeps junction defects in the gluing checks near
    # rounding level; grid settings stay at their defaults
    return SolverOptions(tol=1e-12)


@pytest.fixture(scope="session")
def spec_02(cantor, tight_opts):
    """alpha=0, beta=2 up to lam = 8.7e6 (feeds tables, gluing, counting)."""
    return spectrum(BVPConfig(0.0, 2.0), cantor, lambda_max=8.7e6, options=tight_opts)


@pytest.fixture(scope="session")
def spec_06(cantor, tight_opts):
    """alpha=0, beta=6 up to index 15 (oscillation + identity partner)."""
    return spectrum(BVPConfig(0.0, 6.0), cantor, n_max=15, options=tight_opts)


@pytest.fixture(scope="session")
def spec_12_6(cantor, tight_opts):
    return spectrum(BVPConfig(12.0, 6.0), cantor, n_max=5, options=tight_opts)


@pytest.fixture(scope="session")
def spec_108_18(cantor, tight_opts):
    return spectrum(BVPConfig(108.0, 18.0), cantor, n_max=11, options=tight_opts)
