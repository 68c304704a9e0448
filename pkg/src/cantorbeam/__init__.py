"""Spectral solver for y'''' = lam * y dP with Cantor-type self-similar mass.

Public surface: self-similar weight construction and quadrature
(cantorbeam.measure), quasi-derivative integration (cantorbeam.ode),
oscillation-certified shooting (cantorbeam.shooting), eigenfunction gluing
and spectral rescaling identities (cantorbeam.gluing), eigenvalue counting
asymptotics (cantorbeam.counting), and archives plus a CLI
(cantorbeam.archive, cantorbeam.cli).
"""

from ._kernel import BACKEND
from .errors import (
    CantorBeamError,
    CapError,
    CertificationError,
    ConfigError,
    DomainError,
    OverflowAtNode,
    ResourceError,
    SolverError,
    ZeroCountAmbiguous,
)
from .measure import (
    CellDecomposition,
    WeightParams,
    decompose,
    default_depth,
    make_weight,
    p_eval,
    stieltjes_integral,
)
from .ode import (
    Grid,
    QuasiState,
    Trajectory,
    build_grid,
    fundamental_determinant,
    propagate,
    system_rhs,
)
from .shooting import (
    BVPConfig,
    CharDet,
    Eigenpair,
    SolverOptions,
    SpectrumTable,
    char_det,
    extract_eigenfunction,
    left_basis,
    locate_eigenvalue,
    rayleigh_quotient,
    right_basis,
    right_residual,
    spectrum,
)
from .zeros import count_sign_changes, count_zero_crossings

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BVPConfig",
    "CantorBeamError",
    "CapError",
    "CellDecomposition",
    "CertificationError",
    "CharDet",
    "ConfigError",
    "DomainError",
    "Eigenpair",
    "Grid",
    "OverflowAtNode",
    "QuasiState",
    "ResourceError",
    "SolverError",
    "SolverOptions",
    "SpectrumTable",
    "Trajectory",
    "WeightParams",
    "ZeroCountAmbiguous",
    "build_grid",
    "char_det",
    "count_sign_changes",
    "count_zero_crossings",
    "decompose",
    "default_depth",
    "extract_eigenfunction",
    "fundamental_determinant",
    "left_basis",
    "locate_eigenvalue",
    "make_weight",
    "p_eval",
    "propagate",
    "rayleigh_quotient",
    "right_basis",
    "right_residual",
    "spectrum",
    "stieltjes_integral",
    "system_rhs",
]
