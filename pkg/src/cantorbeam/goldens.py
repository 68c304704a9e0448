"""Reference eigenvalues for the middle-thirds staircase (kappa=2, a=1/3).

Benchmark values with absolute uncertainties, used by the CLI table
command and the regression suite.  Keys are (alpha, beta); each entry maps
index -> (value, uncertainty).
"""

GOLDEN_EIGENVALUES = {
    (0.0, 2.0): {
        1: (22.131, 1e-3),
        2: (817.17, 1e-2),
        3: (3175.0, 1.0),
        4: (38490.0, 10.0),
    },
    (0.0, 6.0): {
        1: (40.965, 1e-3),
        2: (1195.1, 0.1),
        3: (3867.0, 1.0),
        4: (44120.0, 10.0),
    },
    (12.0, 6.0): {
        0: (8.2987, 1e-4),
        1: (137.84, 1e-2),
        2: (1631.1, 0.1),
        3: (4380.0, 1.0),
        4: (45860.0, 10.0),
        5: (64650.0, 10.0),
    },
    (108.0, 18.0): {
        0: (40.965, 1e-3),
        1: (448.13, 1e-2),
        2: (3867.0, 1.0),
        3: (7443.0, 1.0),
        4: (62510.0, 10.0),
        5: (88080.0, 10.0),
    },
}

# 54 * mu_n benchmarks for the rescaling identity, by gluing family
GOLDEN_SCALED = {
    "quadratic": {
        1: (1195.1, 0.1),
        2: (44127.0, 1.0),
        3: (171400.0, 100.0),
        4: (2078000.0, 1000.0),
    },
    "cubic": {
        0: (448.13, 1e-2),
        1: (7443.0, 1.0),
        2: (88080.0, 10.0),
        3: (236500.0, 100.0),
        4: (2476000.0, 1000.0),
        5: (3491000.0, 1000.0),
    },
}


def golden_for(alpha: float, beta: float) -> dict | None:
    """Benchmark table for a boundary configuration, if one exists."""
    for (a, b), table in GOLDEN_EIGENVALUES.items():
        if abs(alpha - a) <= 1e-9 * max(1.0, a) and abs(beta - b) <= 1e-9 * b:
            return table
    return None
