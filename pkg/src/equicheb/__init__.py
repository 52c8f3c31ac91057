"""Chebyshev polynomials on equipotential level curves.

Computes monic Chebyshev (minimax) polynomials on discretized level
curves of explicit exterior-map families, the associated Faber
polynomials from truncated Laurent series, and ships experiment
harnesses for the convergence/invariance behavior that connects them.
"""

from .series import (
    ComplexPolynomial,
    DepthExhaustionError,
    FaberExpansion,
    LaurentSeries,
    LaurentSeriesAtInfinity,
    NotMonicError,
    compose_at_infinity,
    faber_basis_expand,
    faber_polynomial,
    laurent_mul,
    laurent_pow,
    monic_faber,
    polynomial_part,
    revert_series,
)
from .curves import (
    Circle,
    CurveFamily,
    CurveSample,
    ExplicitMap,
    Interval,
    InversePolynomialImage,
    Lemniscate,
    capacity_leading_coefficient,
    joukowski,
    phi_series,
    sample_level_curve,
)
from .minimax import (
    MinimaxSolution,
    RankDeficiencyError,
    SolveOptions,
    chebyshev_on_points,
    solve_chebyshev,
    sup_norm_on_curve,
    weighted_ls_monic,
)
from .rootfind import RootFindingError, RootSet, all_roots
from .experiments import (
    ExperimentError,
    FaberErrorReport,
    InvarianceReport,
    RateReport,
    RivlinReport,
    TrajectorySet,
    WidomReport,
    faber_error_decay,
    invariance_experiment,
    monic_classical_chebyshev,
    rate_experiment,
    rivlin_check,
    widom_experiment,
    zero_trajectories,
)

__version__ = "0.1.0"
